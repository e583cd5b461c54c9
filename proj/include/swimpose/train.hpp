#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swimpose/core.hpp"
#include "swimpose/metrics.hpp"
#include "swimpose/posenet.hpp"
#include "swimpose/temporal.hpp"

namespace swimpose {

/// Everything one training run needs; serialized next to every checkpoint.
struct RunConfig {
    std::string mode = "baseline";  // baseline | conditioned-once | conditioned-repeated
                                    // | temporal-phase1 | temporal-phase2
    ModelConfig model;
    double learning_rate = 3e-3;
    int iterations = 1200;
    int batch_size = 4;
    uint64_t seed = 1;
    double grad_clip = 5.0;
    std::string dataset;          // manifest path or dataset directory
    std::string output_dir;
    std::string init_checkpoint;  // estimator for phase 1, phase-1 net for phase 2

    void validate() const;
};

nlohmann::ordered_json run_config_to_json(const RunConfig& rc);
RunConfig run_config_from_json(const nlohmann::json& j);

struct TrainResult {
    std::vector<double> losses;  // mean batch loss per iteration
    std::string checkpoint_path;
};

/// Trains the single-frame estimator (baseline or conditioned per
/// rc.mode) and writes checkpoint, loss CSV and run config into
/// rc.output_dir. Training batches are sampled deterministically from
/// rc.seed, so a run reproduces bit for bit.
TrainResult train_posenet(const RunConfig& rc, const std::vector<VideoClip>& train_clips);

/// Phase 1 (branches) or phase 2 (pooling exclusively) per rc.mode, on top
/// of the frozen checkpoint named by rc.init_checkpoint.
TrainResult train_temporal(const RunConfig& rc, const std::vector<VideoClip>& train_clips);

/// Frozen-estimator heatmaps for every frame of a clip; input to sequence
/// assembly. style handed to the net iff conditioning is enabled.
std::vector<HeatmapStack> compute_clip_estimates(const PoseNet& net, const VideoClip& clip);

ClipPredictions predict_clip(const PoseNet& net, const VideoClip& clip);
ClipPredictions predict_clip(const TemporalNet& net, const VideoClip& clip);

/// Per-joint peak confidences accompanying predict_clip, same frame order.
struct ClipConfidences {
    std::vector<std::array<double, kNumJoints>> per_frame;
};

ClipPredictions predict_clip(const PoseNet& net, const VideoClip& clip, ClipConfidences* conf);
ClipPredictions predict_clip(const TemporalNet& net, const VideoClip& clip, ClipConfidences* conf);

}  // namespace swimpose
