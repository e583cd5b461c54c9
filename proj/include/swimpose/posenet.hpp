#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swimpose/conditioning.hpp"
#include "swimpose/core.hpp"
#include "swimpose/heatmap_codec.hpp"
#include "swimpose/layers.hpp"
#include "swimpose/tensor.hpp"

namespace swimpose {

/// Everything one pass produces: the belief maps of every stage (the last
/// entry is the final estimate) and the shared trunk features they were
/// computed from.
struct StageOutput {
    std::vector<HeatmapStack> per_stage;
    Tensor shared_features;

    const HeatmapStack& final_stage() const { return per_stage.back(); }
};

// Stage-wise heatmap regressor.
//
// A small convolutional trunk downsamples the image to the heatmap grid and
// produces features shared by all stages. Stage 1 predicts one belief map per
// joint from those features alone; every later stage re-reads the features
// together with the previous stage's maps and refines them, so training
// supervises each stage against the same rendered target (intermediate
// supervision).
//
// Layer plan (channel widths scale with config.channel_mult):
//   trunk    conv3x3 -> relu, then per halving step [maxpool2, conv3x3 -> relu]
//   stage 1  conv3x3 -> relu, conv1x1
//   stage s>=2  on concat(features, prev maps): 3x [conv5x5 -> relu], conv1x1
//
// With conditioning enabled, class label maps are appended to the input of
// the selected convolutions of stages >= first_conditioned_stage.
class PoseNet {
public:
    PoseNet() = default;
    PoseNet(const ModelConfig& cfg, uint64_t seed);

    struct Cache {
        std::vector<ConvLayer::Cache> trunk;
        std::vector<std::vector<int>> pool_idx;
        std::vector<std::vector<ConvLayer::Cache>> stage;
    };

    const ModelConfig& config() const { return cfg_; }
    int feature_channels() const { return trunk_.back().out_channels(); }

    /// 8-bit RGB frame to a [3, H, W] tensor in [-0.5, 0.5].
    static Tensor normalize(const Image& frame);

    /// Inference entry point. style is required iff conditioning is enabled.
    StageOutput forward(const Image& frame, std::optional<StyleLabel> style = {}) const;

    /// Input must be [3, input_size, input_size]. Pass a cache to keep the
    /// intermediates needed by backward().
    StageOutput forward(const Tensor& input, std::optional<StyleLabel> style,
                        Cache* cache = nullptr) const;

    /// Trunk only; what the temporal model consumes per frame.
    Tensor compute_features(const Tensor& input) const;

    /// Sum over stages of the mean squared error against the rendered target.
    double loss(const StageOutput& out, const HeatmapStack& target) const;

    /// Accumulates d(loss)/d(params) into grads; returns the loss.
    double backward(const StageOutput& out, const HeatmapStack& target,
                    const Cache& cache, GradVec& grads) const;

    /// Parameter blocks in fixed construction order (also checkpoint order).
    std::vector<ParamBlock*> params();

    void save(const std::string& path, const nlohmann::ordered_json& extra = {}) const;
    static PoseNet load(const std::string& path, nlohmann::ordered_json* extra = nullptr);

private:
    friend class TemporalNet;

    void build();
    Tensor trunk_forward(const Tensor& input, Cache* cache) const;
    /// Belief maps of one stage. prev is null for stage 1.
    Tensor stage_forward(int s, const Tensor& features, const Tensor* prev,
                         const ClassLabelMaps* labels, Cache* cache) const;
    bool stage_is_conditioned(int s) const;

    ModelConfig cfg_;
    std::vector<ConvLayer> trunk_;               // pooling steps sit between convs
    std::vector<std::vector<ConvLayer>> stage_;  // [num_stages][convs]
};

}  // namespace swimpose
