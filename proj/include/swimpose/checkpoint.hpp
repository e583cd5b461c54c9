#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "swimpose/core.hpp"

namespace swimpose {

// Single-file checkpoint archive:
//
//   8-byte magic, uint64 header length, JSON header, raw doubles.
//
// The header carries format_version, a "kind" tag, the model config, optional
// run metadata and a tensor directory (name + shape per entry). Payload order
// matches the directory. Doubles are stored little-endian.

struct CheckpointTensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> values;
};

struct Checkpoint {
    std::string kind;
    nlohmann::ordered_json config;
    nlohmann::ordered_json extra;  // free-form run metadata, may be null
    std::vector<CheckpointTensor> tensors;

    const CheckpointTensor& find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Throws ValidationError on missing file, bad magic, unsupported
/// format_version, or a payload that does not match the directory.
Checkpoint load_checkpoint(const std::string& path);

nlohmann::ordered_json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace swimpose
