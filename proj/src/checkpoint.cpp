#include "swimpose/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

namespace swimpose {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is written as raw little-endian doubles");

namespace {

constexpr char kMagic[8] = {'S', 'W', 'P', 'C', 'K', 'P', 'T', '\n'};
constexpr int kFormatVersion = 1;

size_t shape_size(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
}

}  // namespace

const CheckpointTensor& Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw ValidationError("checkpoint: no tensor named '" + name + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    nlohmann::ordered_json header;
    header["format_version"] = kFormatVersion;
    header["kind"] = ckpt.kind;
    header["config"] = ckpt.config;
    header["extra"] = ckpt.extra;
    auto& dir = header["tensors"] = nlohmann::ordered_json::array();
    for (const auto& t : ckpt.tensors) {
        if (t.values.size() != shape_size(t.shape))
            throw ValidationError("checkpoint: tensor '" + t.name + "' shape/value mismatch");
        dir.push_back({{"name", t.name}, {"shape", t.shape}});
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("checkpoint: cannot open '" + path + "' for writing");
    const std::string head = header.dump();
    const uint64_t head_len = head.size();
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& t : ckpt.tensors)
        out.write(reinterpret_cast<const char*>(t.values.data()),
                  static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!out) throw ValidationError("checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("checkpoint: cannot open '" + path + "'");

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kMagic))
        throw ValidationError("checkpoint: '" + path + "' is not a checkpoint file");

    uint64_t head_len = 0;
    in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
    if (!in) throw ValidationError("checkpoint: truncated header in '" + path + "'");
    std::string head(head_len, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head_len));
    if (!in) throw ValidationError("checkpoint: truncated header in '" + path + "'");

    nlohmann::ordered_json header;
    try {
        header = nlohmann::ordered_json::parse(head);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("checkpoint: bad header JSON in '" + path + "': " + e.what());
    }
    const int version = header.value("format_version", -1);
    if (version != kFormatVersion)
        throw ValidationError("checkpoint: unsupported format_version " +
                              std::to_string(version) + " in '" + path + "'");

    Checkpoint ckpt;
    ckpt.kind = header.value("kind", "");
    ckpt.config = header.value("config", nlohmann::ordered_json());
    ckpt.extra = header.value("extra", nlohmann::ordered_json());
    for (const auto& entry : header.at("tensors")) {
        CheckpointTensor t;
        t.name = entry.at("name").get<std::string>();
        t.shape = entry.at("shape").get<std::vector<int>>();
        t.values.resize(shape_size(t.shape));
        in.read(reinterpret_cast<char*>(t.values.data()),
                static_cast<std::streamsize>(t.values.size() * sizeof(double)));
        if (!in)
            throw ValidationError("checkpoint: truncated payload for tensor '" + t.name +
                                  "' in '" + path + "'");
        ckpt.tensors.push_back(std::move(t));
    }
    return ckpt;
}

nlohmann::ordered_json model_config_to_json(const ModelConfig& cfg) {
    nlohmann::ordered_json j;
    j["num_stages"] = cfg.num_stages;
    j["num_joints"] = cfg.num_joints;
    j["input_size"] = cfg.input_size;
    j["heatmap_size"] = cfg.heatmap_size;
    j["gaussian_sigma"] = cfg.gaussian_sigma;
    j["conditioning_mode"] = conditioning_mode_name(cfg.conditioning_mode);
    j["first_conditioned_stage"] = cfg.first_conditioned_stage;
    j["temporal_l"] = cfg.seq_spec.l;
    j["channel_mult"] = cfg.channel_mult;
    return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    try {
        cfg.num_stages = j.value("num_stages", cfg.num_stages);
        cfg.num_joints = j.value("num_joints", cfg.num_joints);
        cfg.input_size = j.value("input_size", cfg.input_size);
        cfg.heatmap_size = j.value("heatmap_size", cfg.heatmap_size);
        cfg.gaussian_sigma = j.value("gaussian_sigma", cfg.gaussian_sigma);
        if (j.contains("conditioning_mode"))
            cfg.conditioning_mode =
                conditioning_mode_from_name(j.at("conditioning_mode").get<std::string>());
        cfg.first_conditioned_stage = j.value("first_conditioned_stage", cfg.first_conditioned_stage);
        cfg.seq_spec = SequenceSpec{j.value("temporal_l", cfg.seq_spec.l)};
        cfg.channel_mult = j.value("channel_mult", cfg.channel_mult);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

}  // namespace swimpose
