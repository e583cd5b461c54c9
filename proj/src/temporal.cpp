#include "swimpose/temporal.hpp"

#include <algorithm>
#include <cmath>

#include "swimpose/checkpoint.hpp"
#include "swimpose/conditioning.hpp"
#include "swimpose/kernels.hpp"

namespace swimpose {

PoseSequence assemble_sequence(const std::vector<HeatmapStack>& clip_estimates,
                               int t, const SequenceSpec& spec) {
    const int T = static_cast<int>(clip_estimates.size());
    if (T == 0) throw ValidationError("assemble_sequence: empty clip");
    if (t < 1 || t > T)
        throw ValidationError("assemble_sequence: frame " + std::to_string(t) +
                              " outside [1, " + std::to_string(T) + "]");
    PoseSequence seq;
    seq.center_t = t;
    seq.spec = spec;
    seq.indices.reserve(spec.k_prime());
    seq.stacks.reserve(spec.k_prime());
    for (int j = -spec.l; j <= spec.l; ++j) {
        const int idx = std::clamp(t + 2 * j, 1, T);
        seq.indices.push_back(idx);
        seq.stacks.push_back(clip_estimates[idx - 1]);
    }
    return seq;
}

TemporalNet::TemporalNet(const PoseNet& base, uint64_t seed,
                         std::optional<SequenceSpec> spec)
    : base_(base) {
    if (spec) base_.cfg_.seq_spec = *spec;
    const ModelConfig& cfg = base_.config();
    if (cfg.seq_spec.l > 0 && cfg.heatmap_size % 2 != 0)
        throw ValidationError("temporal: heatmap_size must be even for the "
                              "outer branches' pool/upsample pair");
    build(seed);
}

void TemporalNet::build(uint64_t seed) {
    const ModelConfig& cfg = base_.config();
    const int J = cfg.num_joints;
    const int l = cfg.seq_spec.l;
    const int C = std::max(1, static_cast<int>(std::lround(16 * cfg.channel_mult)));
    const int Fc = base_.feature_channels();
    const auto extra = [&](int i) {
        return cfg.conditioning_mode != ConditioningMode::none &&
                       conv_is_conditioned(cfg.conditioning_mode, i)
                   ? kNumStyles
                   : 0;
    };

    const auto outer = [&](const std::string& name) {
        std::vector<ConvLayer> convs;
        convs.emplace_back(name + ".conv0", l * J + extra(0), C, 7, true);
        convs.emplace_back(name + ".conv1", C + extra(1), C, 7, true);
        convs.emplace_back(name + ".conv2", C + extra(2), C, 7, true);
        convs.emplace_back(name + ".conv3", C + extra(3), J, 7, false);
        return convs;
    };
    if (l > 0) {
        past_ = outer("past");
        future_ = outer("future");
    }
    present_.emplace_back("present.conv0", Fc + J + extra(0), C, 5, true);
    present_.emplace_back("present.conv1", C + extra(1), C, 5, true);
    present_.emplace_back("present.conv2", C + extra(2), C, 5, true);
    present_.emplace_back("present.conv3", C + extra(3), J, 1, false);

    pool_w_.name = "pooling.w";
    pool_w_.shape = {J, 3};
    pool_w_.w.assign(static_cast<size_t>(J) * 3, 1.0 / 3.0);
    pool_b_.name = "pooling.b";
    pool_b_.shape = {J};
    pool_b_.w.assign(J, 0.0);

    std::mt19937_64 rng(seed);
    for (auto& c : past_) c.init(rng);
    for (auto& c : present_) c.init(rng);
    for (auto& c : future_) c.init(rng);
    // Same convention as the estimator: label planes start with zero weight
    // so conditioning begins as a no-op instead of a random per-style bias.
    for (auto* branch : {&past_, &present_, &future_})
        for (size_t i = 0; i < branch->size(); ++i)
            if (extra(static_cast<int>(i)) > 0)
                (*branch)[i].zero_trailing_input_channels(kNumStyles);
}

std::vector<ParamBlock*> TemporalNet::params() {
    std::vector<ParamBlock*> list;
    for (auto& c : past_) c.register_params(list);
    for (auto& c : present_) c.register_params(list);
    for (auto& c : future_) c.register_params(list);
    list.push_back(&pool_w_);
    list.push_back(&pool_b_);
    return list;
}

Tensor TemporalNet::outer_forward(const std::vector<ConvLayer>& convs, const Tensor& input,
                                  const ClassLabelMaps* labels,
                                  std::vector<ConvLayer::Cache>* caches,
                                  std::vector<int>* pool_idx) const {
    const ConditioningMode mode = base_.config().conditioning_mode;
    // Half-resolution label maps for the convolutions inside the pooled block.
    std::optional<ClassLabelMaps> half;
    if (labels)
        half = make_label_maps(labels->style, input.height() / 2, input.width() / 2);

    const auto in_for = [&](const Tensor& cur, int i, const ClassLabelMaps* maps) {
        return maps ? inject(cur, *maps, mode, /*stage=*/2, i) : cur;
    };

    Tensor cur;
    convs[0].forward(in_for(input, 0, labels), cur, caches ? &(*caches)[0] : nullptr);

    Tensor pooled(cur.channels(), cur.height() / 2, cur.width() / 2);
    std::vector<int> scratch;
    kernels::maxpool2_forward(cur, pooled, pool_idx ? *pool_idx : scratch);
    cur = std::move(pooled);

    for (int i = 1; i <= 2; ++i) {
        Tensor next;
        convs[i].forward(in_for(cur, i, half ? &*half : nullptr), next,
                         caches ? &(*caches)[i] : nullptr);
        cur = std::move(next);
    }

    Tensor wide(cur.channels(), cur.height() * 2, cur.width() * 2);
    kernels::upsample2_forward(cur, wide);

    Tensor out;
    convs[3].forward(in_for(wide, 3, labels), out, caches ? &(*caches)[3] : nullptr);
    return out;
}

Tensor TemporalNet::present_forward(const Tensor& input, const ClassLabelMaps* labels,
                                    std::vector<ConvLayer::Cache>* caches) const {
    const ConditioningMode mode = base_.config().conditioning_mode;
    Tensor cur = input;
    for (size_t i = 0; i < present_.size(); ++i) {
        if (labels) cur = inject(cur, *labels, mode, /*stage=*/2, static_cast<int>(i));
        Tensor next;
        present_[i].forward(cur, next, caches ? &(*caches)[i] : nullptr);
        cur = std::move(next);
    }
    return cur;
}

std::pair<TemporalNet::BranchOutputs, HeatmapStack> TemporalNet::refine(
    const Tensor& x_t, const PoseSequence& seq, std::optional<StyleLabel> style,
    Cache* cache) const {
    const ModelConfig& cfg = base_.config();
    const int l = cfg.seq_spec.l;
    if (seq.spec.l != l)
        throw ValidationError("temporal: sequence was assembled with l=" +
                              std::to_string(seq.spec.l) + " but the network expects l=" +
                              std::to_string(l));
    if (static_cast<int>(seq.stacks.size()) != seq.spec.k_prime())
        throw ValidationError("temporal: sequence holds " +
                              std::to_string(seq.stacks.size()) + " stacks, expected " +
                              std::to_string(seq.spec.k_prime()));
    const bool conditioned = cfg.conditioning_mode != ConditioningMode::none;
    if (conditioned && !style)
        throw ValidationError("temporal: conditioning is enabled but no style label was given");
    if (!conditioned && style)
        throw ValidationError("temporal: a style label was given but conditioning is off");

    const int H = cfg.heatmap_size;
    for (const auto& s : seq.stacks)
        if (s.data.channels() != cfg.num_joints || s.data.height() != H ||
            s.data.width() != H)
            throw ValidationError("temporal: sequence stack shape does not match the config");

    if (cache) {
        cache->past.assign(past_.size(), {});
        cache->present.assign(present_.size(), {});
        cache->future.assign(future_.size(), {});
        cache->past_pool.clear();
        cache->future_pool.clear();
    }

    std::optional<ClassLabelMaps> labels;
    if (conditioned) labels = make_label_maps(*style, H, H);
    const ClassLabelMaps* lbl = labels ? &*labels : nullptr;

    const double stride = cfg.grid_stride();
    BranchOutputs out{HeatmapStack(H, H, stride), HeatmapStack(H, H, stride),
                      HeatmapStack(H, H, stride)};

    if (l > 0) {
        std::vector<const Tensor*> past_parts, future_parts;
        for (int i = 0; i < l; ++i) past_parts.push_back(&seq.stacks[i].data);
        for (int i = l + 1; i <= 2 * l; ++i) future_parts.push_back(&seq.stacks[i].data);
        out.past.data = outer_forward(past_, concat_channels(past_parts), lbl,
                                      cache ? &cache->past : nullptr,
                                      cache ? &cache->past_pool : nullptr);
        out.future.data = outer_forward(future_, concat_channels(future_parts), lbl,
                                        cache ? &cache->future : nullptr,
                                        cache ? &cache->future_pool : nullptr);
    }
    // With l == 0 the outer branches have no input; their maps stay all-zero.

    const Tensor features = base_.compute_features(x_t);
    const Tensor present_in = concat_channels({&features, &seq.stacks[l].data});
    out.present.data =
        present_forward(present_in, lbl, cache ? &cache->present : nullptr);

    HeatmapStack pooled = pool(out);
    return {std::move(out), std::move(pooled)};
}

HeatmapStack TemporalNet::pool(const BranchOutputs& branches) const {
    const ModelConfig& cfg = base_.config();
    const Tensor& p = branches.past.data;
    if (!p.same_shape(branches.present.data) || !p.same_shape(branches.future.data))
        throw ValidationError("temporal: branch output shapes differ");

    HeatmapStack out(p.height(), p.width(), branches.present.grid_stride);
    const int plane = p.height() * p.width();
    for (int j = 0; j < cfg.num_joints; ++j) {
        const double wp = pool_w_.w[j * 3 + 0];
        const double wc = pool_w_.w[j * 3 + 1];
        const double wf = pool_w_.w[j * 3 + 2];
        const double b = pool_b_.w[j];
        const double* past = branches.past.data.channel(j);
        const double* pres = branches.present.data.channel(j);
        const double* fut = branches.future.data.channel(j);
        double* dst = out.data.channel(j);
        for (int i = 0; i < plane; ++i)
            dst[i] = wp * past[i] + wc * pres[i] + wf * fut[i] + b;
    }
    return out;
}

namespace {

double mse(const Tensor& pred, const Tensor& target) {
    double sq = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data()[i] - target.data()[i];
        sq += d * d;
    }
    return sq / static_cast<double>(pred.size());
}

Tensor mse_grad(const Tensor& pred, const Tensor& target) {
    Tensor d(pred.channels(), pred.height(), pred.width());
    const double inv = 2.0 / static_cast<double>(pred.size());
    for (size_t i = 0; i < pred.size(); ++i)
        d.data()[i] = inv * (pred.data()[i] - target.data()[i]);
    return d;
}

}  // namespace

double TemporalNet::phase1_loss(const BranchOutputs& out, const HeatmapStack& target) const {
    double total = mse(out.present.data, target.data);
    if (!past_.empty())
        total += mse(out.past.data, target.data) + mse(out.future.data, target.data);
    return total;
}

void TemporalNet::outer_backward(const std::vector<ConvLayer>& convs, Tensor d,
                                 const std::vector<ConvLayer::Cache>& caches,
                                 const std::vector<int>& pool_idx, GradVec& grads) const {
    const ConditioningMode mode = base_.config().conditioning_mode;
    const bool conditioned = mode != ConditioningMode::none;
    const auto strip = [&](Tensor t, int i) {
        if (conditioned && conv_is_conditioned(mode, i))
            return slice_channels(t, 0, t.channels() - kNumStyles);
        return t;
    };

    d = strip(convs[3].backward(std::move(d), caches[3], grads), 3);

    Tensor narrow(d.channels(), d.height() / 2, d.width() / 2);
    kernels::upsample2_backward(d, narrow);
    d = std::move(narrow);

    for (int i = 2; i >= 1; --i)
        d = strip(convs[i].backward(std::move(d), caches[i], grads), i);

    Tensor wide(d.channels(), d.height() * 2, d.width() * 2);
    kernels::maxpool2_backward(d, pool_idx, wide);
    d = std::move(wide);

    convs[0].backward(std::move(d), caches[0], grads);  // input is frozen upstream
}

void TemporalNet::present_backward(Tensor d, const std::vector<ConvLayer::Cache>& caches,
                                   GradVec& grads) const {
    const ConditioningMode mode = base_.config().conditioning_mode;
    const bool conditioned = mode != ConditioningMode::none;
    for (int i = static_cast<int>(present_.size()) - 1; i >= 0; --i) {
        d = present_[i].backward(std::move(d), caches[i], grads);
        if (conditioned && conv_is_conditioned(mode, i))
            d = slice_channels(d, 0, d.channels() - kNumStyles);
    }
    // d now matches concat(features, estimate), both frozen in phase 1.
}

double TemporalNet::phase1_backward(const BranchOutputs& out, const HeatmapStack& target,
                                    const Cache& cache, GradVec& grads) const {
    const double L = phase1_loss(out, target);
    present_backward(mse_grad(out.present.data, target.data), cache.present, grads);
    if (!past_.empty()) {
        outer_backward(past_, mse_grad(out.past.data, target.data), cache.past,
                       cache.past_pool, grads);
        outer_backward(future_, mse_grad(out.future.data, target.data), cache.future,
                       cache.future_pool, grads);
    }
    return L;
}

double TemporalNet::phase2_backward(const BranchOutputs& out, const HeatmapStack& pooled,
                                    const HeatmapStack& target, GradVec& grads) const {
    const ModelConfig& cfg = base_.config();
    if (grads.size() < 2 || grads[grads.size() - 2].size() != pool_w_.size() ||
        grads[grads.size() - 1].size() != pool_b_.size())
        throw ValidationError("temporal: gradient buffers do not match params()");

    const double L = mse(pooled.data, target.data);
    const Tensor d = mse_grad(pooled.data, target.data);
    std::vector<double>& dw = grads[grads.size() - 2];
    std::vector<double>& db = grads[grads.size() - 1];
    const int plane = d.height() * d.width();
    for (int j = 0; j < cfg.num_joints; ++j) {
        const double* dj = d.channel(j);
        const double* past = out.past.data.channel(j);
        const double* pres = out.present.data.channel(j);
        const double* fut = out.future.data.channel(j);
        double sp = 0.0, sc = 0.0, sf = 0.0, sb = 0.0;
        for (int i = 0; i < plane; ++i) {
            sp += dj[i] * past[i];
            sc += dj[i] * pres[i];
            sf += dj[i] * fut[i];
            sb += dj[i];
        }
        dw[j * 3 + 0] += sp;
        dw[j * 3 + 1] += sc;
        dw[j * 3 + 2] += sf;
        db[j] += sb;
    }
    return L;
}

void TemporalNet::save(const std::string& path, const nlohmann::ordered_json& extra) const {
    Checkpoint ckpt;
    ckpt.kind = "temporal";
    ckpt.config = model_config_to_json(base_.config());
    ckpt.extra = extra;
    const auto push = [&](const std::string& prefix, const ParamBlock& b) {
        ckpt.tensors.push_back({prefix + b.name, b.shape, b.w});
    };
    for (const auto& c : base_.trunk_) {
        push("base.", c.weights());
        push("base.", c.bias());
    }
    for (const auto& stage : base_.stage_)
        for (const auto& c : stage) {
            push("base.", c.weights());
            push("base.", c.bias());
        }
    for (const auto* branch : {&past_, &present_, &future_})
        for (const auto& c : *branch) {
            push("", c.weights());
            push("", c.bias());
        }
    push("", pool_w_);
    push("", pool_b_);
    save_checkpoint(path, ckpt);
}

TemporalNet TemporalNet::load(const std::string& path, nlohmann::ordered_json* extra) {
    const Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.kind != "temporal")
        throw ValidationError("checkpoint: '" + path + "' holds a '" + ckpt.kind +
                              "' model, expected 'temporal'");
    PoseNet base(model_config_from_json(ckpt.config), 0);
    const auto fill = [&](const std::string& prefix, ParamBlock* b) {
        const CheckpointTensor& t = ckpt.find(prefix + b->name);
        if (t.shape != b->shape || t.values.size() != b->w.size())
            throw ValidationError("checkpoint: tensor '" + prefix + b->name +
                                  "' does not match the configured architecture");
        b->w = t.values;
    };
    for (ParamBlock* b : base.params()) fill("base.", b);
    TemporalNet net(base, 0);
    for (ParamBlock* b : net.params()) fill("", b);
    if (extra) *extra = ckpt.extra;
    return net;
}

}  // namespace swimpose
