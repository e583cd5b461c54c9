#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swimpose/core.hpp"
#include "swimpose/layers.hpp"
#include "swimpose/posenet.hpp"

namespace swimpose {

/// Strided window of single-frame estimates around frame center_t: sampled
/// indices center_t - 2l, center_t - 2(l-1), ..., center_t + 2l (every other
/// frame), clamped to the clip, so the window always holds k' = 2l+1 stacks.
struct PoseSequence {
    int center_t = 0;
    std::vector<int> indices;  // clamped 1-based frame indices, non-decreasing
    std::vector<HeatmapStack> stacks;
    SequenceSpec spec;
};

/// Window into precomputed per-frame estimates for one clip.
/// Throws when the clip is empty or t is outside [1, T].
PoseSequence assemble_sequence(const std::vector<HeatmapStack>& clip_estimates,
                               int t, const SequenceSpec& spec);

// Three-branch temporal refinement over a frozen single-frame estimator.
//
// The past branch reads the l estimate stacks before t (channel-concatenated
// in temporal order), the future branch the l stacks after t, and the present
// branch mirrors one estimator refinement stage on concat(features(x_t),
// estimate at t). A per-joint pooling layer blends the three branch maps:
//
//   pooled_j = w_past_j * past_j + w_present_j * present_j
//            + w_future_j * future_j + b_j        (elementwise)
//
// Outer branches: four 7x7 convolutions around one x2 max-pool/upsample pair;
// the last convolution is linear and emits one map per joint. With l = 0 the
// outer branches have no input and contribute all-zero maps, so the network
// collapses to one extra refinement stage. Conditioning, when enabled in the
// base config, injects class label maps into every branch by the same
// first/every-convolution rule as the estimator stages.
//
// Training is two-phase: phase 1 fits each branch to the rendered target of
// frame t with the pooling layer ignored; phase 2 fits the pooling layer
// exclusively, branches frozen. Both phases share one params() list, so a
// phase simply leaves the other group's gradients at zero.
class TemporalNet {
public:
    struct BranchOutputs {
        HeatmapStack past, present, future;
    };

    struct Cache {
        std::vector<ConvLayer::Cache> past, present, future;
        std::vector<int> past_pool, future_pool;
    };

    TemporalNet() = default;
    /// Copies (and thereby freezes) the estimator. l comes from its config
    /// unless spec overrides it (the estimator itself never reads l).
    TemporalNet(const PoseNet& base, uint64_t seed,
                std::optional<SequenceSpec> spec = {});

    const PoseNet& base() const { return base_; }
    const ModelConfig& config() const { return base_.config(); }

    /// Branch predictions plus the pooled stack for frame center_t.
    /// style is required iff conditioning is enabled in the base config.
    std::pair<BranchOutputs, HeatmapStack> refine(const Tensor& x_t,
                                                  const PoseSequence& seq,
                                                  std::optional<StyleLabel> style = {},
                                                  Cache* cache = nullptr) const;

    /// The pooling layer alone.
    HeatmapStack pool(const BranchOutputs& branches) const;

    /// Phase 1: sum of the three per-branch MSEs against the target.
    /// Accumulates branch gradients; pooling entries stay untouched.
    double phase1_backward(const BranchOutputs& out, const HeatmapStack& target,
                           const Cache& cache, GradVec& grads) const;
    double phase1_loss(const BranchOutputs& out, const HeatmapStack& target) const;

    /// Phase 2: MSE of the pooled stack against the target. Accumulates
    /// pooling gradients only; branches stay frozen.
    double phase2_backward(const BranchOutputs& out, const HeatmapStack& pooled,
                           const HeatmapStack& target, GradVec& grads) const;

    /// Branch parameter blocks first, then pooling weights and bias.
    std::vector<ParamBlock*> params();

    ParamBlock& pooling_weights() { return pool_w_; }  // [J, 3] past/present/future
    ParamBlock& pooling_bias() { return pool_b_; }     // [J]

    void save(const std::string& path, const nlohmann::ordered_json& extra = {}) const;
    static TemporalNet load(const std::string& path, nlohmann::ordered_json* extra = nullptr);

private:
    void build(uint64_t seed);
    Tensor outer_forward(const std::vector<ConvLayer>& convs, const Tensor& input,
                         const ClassLabelMaps* labels,
                         std::vector<ConvLayer::Cache>* caches,
                         std::vector<int>* pool_idx) const;
    Tensor present_forward(const Tensor& input, const ClassLabelMaps* labels,
                           std::vector<ConvLayer::Cache>* caches) const;
    void outer_backward(const std::vector<ConvLayer>& convs, Tensor d,
                        const std::vector<ConvLayer::Cache>& caches,
                        const std::vector<int>& pool_idx, GradVec& grads) const;
    void present_backward(Tensor d, const std::vector<ConvLayer::Cache>& caches,
                          GradVec& grads) const;

    PoseNet base_;
    std::vector<ConvLayer> past_, present_, future_;  // past_/future_ empty when l == 0
    ParamBlock pool_w_, pool_b_;
};

}  // namespace swimpose
