#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "swimpose/kernels.hpp"
#include "swimpose/tensor.hpp"

namespace swimpose {

/// One named parameter tensor of a network, checkpointed by name.
struct ParamBlock {
    std::string name;
    std::vector<int> shape;
    std::vector<double> w;

    size_t size() const { return w.size(); }
};

/// Per-parameter gradient buffers aligned with a network's params() list.
using GradVec = std::vector<std::vector<double>>;

GradVec make_grads(const std::vector<ParamBlock*>& params);
void zero_grads(GradVec& g);
void add_grads(GradVec& dst, const GradVec& src);
void scale_grads(GradVec& g, double s);
double grad_global_norm(const GradVec& g);
/// Scales gradients down so the global norm does not exceed max_norm.
void clip_grads(GradVec& g, double max_norm);

/// Same-padding stride-1 convolution layer with optional fused ReLU.
class ConvLayer {
public:
    ConvLayer() = default;
    ConvLayer(std::string name, int in_c, int out_c, int k, bool relu);

    struct Cache {
        Tensor in;
        std::vector<uint8_t> mask;
    };

    /// out is allocated by the call; cache may be null for inference.
    void forward(const Tensor& in, Tensor& out, Cache* cache) const;

    /// Returns d(in); accumulates parameter gradients into grads at this
    /// layer's param indices. d_out is consumed (ReLU mask applied in place).
    Tensor backward(Tensor d_out, const Cache& cache, GradVec& grads) const;

    /// He-normal weights, zero bias.
    void init(std::mt19937_64& rng);

    /// Clears the kernel columns for the last n input channels.
    void zero_trailing_input_channels(int n);

    int in_channels() const { return in_c_; }
    int out_channels() const { return out_c_; }
    int kernel() const { return k_; }

    void register_params(std::vector<ParamBlock*>& list);

    ParamBlock& weights() { return W_; }
    ParamBlock& bias() { return b_; }
    const ParamBlock& weights() const { return W_; }
    const ParamBlock& bias() const { return b_; }

private:
    int in_c_ = 0, out_c_ = 0, k_ = 0;
    bool relu_ = false;
    ParamBlock W_, b_;
    int pidx_w_ = -1, pidx_b_ = -1;
};

/// Adam with bias correction; state is aligned with the params() list.
class AdamOptimizer {
public:
    explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                           double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void attach(const std::vector<ParamBlock*>& params);
    void step(std::vector<ParamBlock*>& params, const GradVec& grads);

    void set_lr(double lr) { lr_ = lr; }
    double lr() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace swimpose
