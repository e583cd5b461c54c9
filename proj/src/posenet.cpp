#include "swimpose/posenet.hpp"

#include <cmath>

#include "swimpose/checkpoint.hpp"
#include "swimpose/kernels.hpp"

namespace swimpose {

namespace {

int pool_steps(const ModelConfig& cfg) {
    int p = 0;
    while ((1 << p) < cfg.grid_stride()) ++p;
    return p;
}

void axpy(Tensor& dst, const Tensor& src) {
    for (size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

}  // namespace

PoseNet::PoseNet(const ModelConfig& cfg, uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    build();
    std::mt19937_64 rng(seed);
    for (auto& c : trunk_) c.init(rng);
    for (auto& stage : stage_)
        for (auto& c : stage) c.init(rng);
    // Label planes start at zero weight: a fresh conditioned model computes
    // exactly what the unconditioned one would. Random weights on a constant
    // plane act as a per-style bias that can park whole feature channels on
    // the wrong side of a ReLU for one style while the others train fine.
    for (int s = 2; s <= cfg_.num_stages; ++s) {
        if (!stage_is_conditioned(s)) continue;
        auto& convs = stage_[s - 1];
        for (size_t i = 0; i < convs.size(); ++i)
            if (conv_is_conditioned(cfg_.conditioning_mode, static_cast<int>(i)))
                convs[i].zero_trailing_input_channels(kNumStyles);
    }
}

void PoseNet::build() {
    const auto scale = [&](int c) {
        return std::max(1, static_cast<int>(std::lround(c * cfg_.channel_mult)));
    };
    const int c0 = scale(8);
    const int ct = scale(16);
    const int cs = scale(16);
    const int J = cfg_.num_joints;
    const int P = pool_steps(cfg_);

    trunk_.emplace_back("trunk.conv0", 3, c0, 3, true);
    for (int p = 1; p <= P; ++p)
        trunk_.emplace_back("trunk.conv" + std::to_string(p),
                            p == 1 ? c0 : ct, ct, 3, true);
    if (P == 0) trunk_.emplace_back("trunk.conv1", c0, ct, 3, true);

    const auto extra = [&](int s, int i) {
        return stage_is_conditioned(s) && conv_is_conditioned(cfg_.conditioning_mode, i)
                   ? kNumStyles
                   : 0;
    };

    for (int s = 1; s <= cfg_.num_stages; ++s) {
        const std::string prefix = "stage" + std::to_string(s) + ".conv";
        std::vector<ConvLayer> convs;
        if (s == 1) {
            convs.emplace_back(prefix + "0", ct, cs, 3, true);
            convs.emplace_back(prefix + "1", cs, J, 1, false);
        } else {
            convs.emplace_back(prefix + "0", ct + J + extra(s, 0), cs, 5, true);
            convs.emplace_back(prefix + "1", cs + extra(s, 1), cs, 5, true);
            convs.emplace_back(prefix + "2", cs + extra(s, 2), cs, 5, true);
            convs.emplace_back(prefix + "3", cs + extra(s, 3), J, 1, false);
        }
        stage_.push_back(std::move(convs));
    }
}

bool PoseNet::stage_is_conditioned(int s) const {
    return cfg_.conditioning_mode != ConditioningMode::none &&
           s >= cfg_.first_conditioned_stage;
}

std::vector<ParamBlock*> PoseNet::params() {
    std::vector<ParamBlock*> list;
    for (auto& c : trunk_) c.register_params(list);
    for (auto& stage : stage_)
        for (auto& c : stage) c.register_params(list);
    return list;
}

Tensor PoseNet::normalize(const Image& frame) {
    Tensor t(3, frame.height, frame.width);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x)
            for (int c = 0; c < 3; ++c)
                t.at(c, y, x) = frame.at(y, x, c) / 255.0 - 0.5;
    return t;
}

Tensor PoseNet::trunk_forward(const Tensor& input, Cache* cache) const {
    const int P = pool_steps(cfg_);
    Tensor cur;
    trunk_[0].forward(input, cur, cache ? &cache->trunk[0] : nullptr);
    for (size_t i = 1; i < trunk_.size(); ++i) {
        if (static_cast<int>(i) <= P) {
            Tensor pooled(cur.channels(), cur.height() / 2, cur.width() / 2);
            std::vector<int> scratch;
            kernels::maxpool2_forward(cur, pooled, cache ? cache->pool_idx[i - 1] : scratch);
            cur = std::move(pooled);
        }
        Tensor next;
        trunk_[i].forward(cur, next, cache ? &cache->trunk[i] : nullptr);
        cur = std::move(next);
    }
    return cur;
}

Tensor PoseNet::stage_forward(int s, const Tensor& features, const Tensor* prev,
                              const ClassLabelMaps* labels, Cache* cache) const {
    Tensor cur = (s == 1) ? features : concat_channels({&features, prev});
    const auto& convs = stage_[s - 1];
    const bool conditioned = labels != nullptr && stage_is_conditioned(s);
    for (size_t i = 0; i < convs.size(); ++i) {
        if (conditioned)
            cur = inject(cur, *labels, cfg_.conditioning_mode, s, static_cast<int>(i));
        Tensor next;
        convs[i].forward(cur, next, cache ? &cache->stage[s - 1][i] : nullptr);
        cur = std::move(next);
    }
    return cur;
}

StageOutput PoseNet::forward(const Image& frame, std::optional<StyleLabel> style) const {
    return forward(normalize(frame), style, nullptr);
}

StageOutput PoseNet::forward(const Tensor& input, std::optional<StyleLabel> style,
                             Cache* cache) const {
    if (input.channels() != 3 || input.height() != cfg_.input_size ||
        input.width() != cfg_.input_size)
        throw ValidationError("posenet: input must be [3, " +
                              std::to_string(cfg_.input_size) + ", " +
                              std::to_string(cfg_.input_size) + "]");
    const bool conditioned = cfg_.conditioning_mode != ConditioningMode::none;
    if (conditioned && !style)
        throw ValidationError("posenet: conditioning is enabled but no style label was given");
    if (!conditioned && style)
        throw ValidationError("posenet: a style label was given but conditioning is off");

    if (cache) {
        cache->trunk.assign(trunk_.size(), {});
        cache->pool_idx.assign(pool_steps(cfg_), {});
        cache->stage.assign(stage_.size(), {});
        for (size_t s = 0; s < stage_.size(); ++s) cache->stage[s].resize(stage_[s].size());
    }

    StageOutput out;
    out.shared_features = trunk_forward(input, cache);

    std::optional<ClassLabelMaps> labels;
    if (conditioned)
        labels = make_label_maps(*style, cfg_.heatmap_size, cfg_.heatmap_size);

    out.per_stage.reserve(cfg_.num_stages);
    const Tensor* prev = nullptr;
    for (int s = 1; s <= cfg_.num_stages; ++s) {
        HeatmapStack h(cfg_.heatmap_size, cfg_.heatmap_size, cfg_.grid_stride());
        h.data = stage_forward(s, out.shared_features, prev,
                               labels ? &*labels : nullptr, cache);
        out.per_stage.push_back(std::move(h));
        prev = &out.per_stage.back().data;
    }
    return out;
}

Tensor PoseNet::compute_features(const Tensor& input) const {
    if (input.channels() != 3 || input.height() != cfg_.input_size ||
        input.width() != cfg_.input_size)
        throw ValidationError("posenet: input must be [3, " +
                              std::to_string(cfg_.input_size) + ", " +
                              std::to_string(cfg_.input_size) + "]");
    return trunk_forward(input, nullptr);
}

double PoseNet::loss(const StageOutput& out, const HeatmapStack& target) const {
    if (static_cast<int>(out.per_stage.size()) != cfg_.num_stages)
        throw ValidationError("posenet: output stage count does not match the config");
    double total = 0.0;
    for (const auto& stage : out.per_stage) {
        if (!stage.data.same_shape(target.data))
            throw ValidationError("posenet: stage output and target shapes differ");
        double sq = 0.0;
        for (size_t i = 0; i < target.data.size(); ++i) {
            const double d = stage.data.data()[i] - target.data.data()[i];
            sq += d * d;
        }
        total += sq / static_cast<double>(target.data.size());
    }
    return total;
}

double PoseNet::backward(const StageOutput& out, const HeatmapStack& target,
                         const Cache& cache, GradVec& grads) const {
    const double L = loss(out, target);
    const int S = cfg_.num_stages;
    const double inv = 2.0 / static_cast<double>(target.data.size());

    // d(loss)/d(stage maps), the direct MSE term; each stage s >= 2 later adds
    // the part flowing back through its first convolution into stage s-1.
    std::vector<Tensor> d_maps(S);
    for (int s = 0; s < S; ++s) {
        const Tensor& p = out.per_stage[s].data;
        d_maps[s] = Tensor(p.channels(), p.height(), p.width());
        for (size_t i = 0; i < p.size(); ++i)
            d_maps[s].data()[i] = inv * (p.data()[i] - target.data.data()[i]);
    }

    const Tensor& F = out.shared_features;
    Tensor d_features(F.channels(), F.height(), F.width());

    for (int s = S; s >= 1; --s) {
        Tensor d = std::move(d_maps[s - 1]);
        const auto& convs = stage_[s - 1];
        for (int i = static_cast<int>(convs.size()) - 1; i >= 0; --i) {
            d = convs[i].backward(std::move(d), cache.stage[s - 1][i], grads);
            if (stage_is_conditioned(s) &&
                conv_is_conditioned(cfg_.conditioning_mode, i))
                d = slice_channels(d, 0, d.channels() - kNumStyles);
        }
        if (s == 1) {
            axpy(d_features, d);
        } else {
            axpy(d_features, slice_channels(d, 0, F.channels()));
            axpy(d_maps[s - 2], slice_channels(d, F.channels(), cfg_.num_joints));
        }
    }

    const int P = pool_steps(cfg_);
    Tensor d = std::move(d_features);
    for (int i = static_cast<int>(trunk_.size()) - 1; i >= 1; --i) {
        d = trunk_[i].backward(std::move(d), cache.trunk[i], grads);
        if (i <= P) {
            Tensor wide(d.channels(), d.height() * 2, d.width() * 2);
            kernels::maxpool2_backward(d, cache.pool_idx[i - 1], wide);
            d = std::move(wide);
        }
    }
    trunk_[0].backward(std::move(d), cache.trunk[0], grads);  // image gradient, unused
    return L;
}

void PoseNet::save(const std::string& path, const nlohmann::ordered_json& extra) const {
    Checkpoint ckpt;
    ckpt.kind = "posenet";
    ckpt.config = model_config_to_json(cfg_);
    ckpt.extra = extra;
    const auto push = [&](const ParamBlock& b) {
        ckpt.tensors.push_back({b.name, b.shape, b.w});
    };
    for (const auto& c : trunk_) {
        push(c.weights());
        push(c.bias());
    }
    for (const auto& stage : stage_)
        for (const auto& c : stage) {
            push(c.weights());
            push(c.bias());
        }
    save_checkpoint(path, ckpt);
}

PoseNet PoseNet::load(const std::string& path, nlohmann::ordered_json* extra) {
    const Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.kind != "posenet")
        throw ValidationError("checkpoint: '" + path + "' holds a '" + ckpt.kind +
                              "' model, expected 'posenet'");
    PoseNet net(model_config_from_json(ckpt.config), 0);
    for (ParamBlock* b : net.params()) {
        const CheckpointTensor& t = ckpt.find(b->name);
        if (t.shape != b->shape || t.values.size() != b->w.size())
            throw ValidationError("checkpoint: tensor '" + b->name +
                                  "' does not match the configured architecture");
        b->w = t.values;
    }
    if (extra) *extra = ckpt.extra;
    return net;
}

}  // namespace swimpose
