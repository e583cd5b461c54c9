#include "swimpose/layers.hpp"

#include <cmath>

namespace swimpose {

GradVec make_grads(const std::vector<ParamBlock*>& params) {
    GradVec g;
    g.reserve(params.size());
    for (const ParamBlock* p : params) g.emplace_back(p->size(), 0.0);
    return g;
}

void zero_grads(GradVec& g) {
    for (auto& v : g) std::fill(v.begin(), v.end(), 0.0);
}

void add_grads(GradVec& dst, const GradVec& src) {
    for (size_t i = 0; i < dst.size(); ++i)
        for (size_t j = 0; j < dst[i].size(); ++j) dst[i][j] += src[i][j];
}

void scale_grads(GradVec& g, double s) {
    for (auto& v : g)
        for (double& x : v) x *= s;
}

double grad_global_norm(const GradVec& g) {
    double acc = 0.0;
    for (const auto& v : g)
        for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

void clip_grads(GradVec& g, double max_norm) {
    const double norm = grad_global_norm(g);
    if (norm > max_norm && norm > 0.0) scale_grads(g, max_norm / norm);
}

ConvLayer::ConvLayer(std::string name, int in_c, int out_c, int k, bool relu)
    : in_c_(in_c), out_c_(out_c), k_(k), relu_(relu) {
    W_.name = name + ".w";
    W_.shape = {out_c, in_c, k, k};
    W_.w.assign(static_cast<size_t>(out_c) * in_c * k * k, 0.0);
    b_.name = name + ".b";
    b_.shape = {out_c};
    b_.w.assign(out_c, 0.0);
}

void ConvLayer::forward(const Tensor& in, Tensor& out, Cache* cache) const {
    out = Tensor(out_c_, in.height(), in.width());
    kernels::conv2d_forward(in, W_.w, b_.w, out_c_, k_, out);
    if (cache) cache->in = in;
    if (relu_) {
        std::vector<uint8_t> local;
        kernels::relu_forward(out, cache ? cache->mask : local);
    }
}

Tensor ConvLayer::backward(Tensor d_out, const Cache& cache, GradVec& grads) const {
    if (relu_) kernels::relu_backward(d_out, cache.mask);
    kernels::conv2d_backward_params(d_out, cache.in, k_, grads[pidx_w_], grads[pidx_b_]);
    Tensor d_in(in_c_, d_out.height(), d_out.width());
    kernels::conv2d_backward_input(d_out, W_.w, in_c_, k_, d_in);
    return d_in;
}

void ConvLayer::init(std::mt19937_64& rng) {
    const double stddev = std::sqrt(2.0 / (static_cast<double>(in_c_) * k_ * k_));
    std::normal_distribution<double> dist(0.0, stddev);
    for (double& w : W_.w) w = dist(rng);
    std::fill(b_.w.begin(), b_.w.end(), 0.0);
}

void ConvLayer::zero_trailing_input_channels(int n) {
    const size_t kk = static_cast<size_t>(k_) * k_;
    for (int co = 0; co < out_c_; ++co)
        for (int ci = in_c_ - n; ci < in_c_; ++ci)
            std::fill_n(W_.w.begin() + (static_cast<size_t>(co) * in_c_ + ci) * kk, kk, 0.0);
}

void ConvLayer::register_params(std::vector<ParamBlock*>& list) {
    pidx_w_ = static_cast<int>(list.size());
    list.push_back(&W_);
    pidx_b_ = static_cast<int>(list.size());
    list.push_back(&b_);
}

void AdamOptimizer::attach(const std::vector<ParamBlock*>& params) {
    m_.clear();
    v_.clear();
    for (const ParamBlock* p : params) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
    t_ = 0;
}

void AdamOptimizer::step(std::vector<ParamBlock*>& params, const GradVec& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        std::vector<double>& w = params[i]->w;
        for (size_t j = 0; j < w.size(); ++j) {
            const double g = grads[i][j];
            m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
            v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            w[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace swimpose
