#include "swimpose/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "swimpose/checkpoint.hpp"
#include "swimpose/heatmap_codec.hpp"

namespace fs = std::filesystem;

namespace swimpose {

namespace {

const char* kModes[] = {"baseline", "conditioned-once", "conditioned-repeated",
                        "temporal-phase1", "temporal-phase2"};

bool is_temporal_mode(const std::string& mode) {
    return mode == "temporal-phase1" || mode == "temporal-phase2";
}

ConditioningMode conditioning_for_mode(const std::string& mode) {
    if (mode == "conditioned-once") return ConditioningMode::once;
    if (mode == "conditioned-repeated") return ConditioningMode::repeated;
    return ConditioningMode::none;
}

void check_frames(const std::vector<VideoClip>& clips, int input_size) {
    for (const auto& clip : clips) {
        if (clip.frames.size() != clip.annotations.size())
            throw ValidationError("train: clip '" + clip.clip_id +
                                  "' frames/annotations count mismatch");
        for (const auto& f : clip.frames)
            if (f.width != input_size || f.height != input_size)
                throw ValidationError(
                    "train: clip '" + clip.clip_id + "' frames are " +
                    std::to_string(f.width) + "x" + std::to_string(f.height) +
                    " but the model expects " + std::to_string(input_size) + "x" +
                    std::to_string(input_size));
    }
}

std::optional<StyleLabel> style_for(const ModelConfig& cfg, const VideoClip& clip) {
    if (cfg.conditioning_mode == ConditioningMode::none) return std::nullopt;
    return clip.style;
}

struct Sample {
    int clip = 0;
    int frame = 0;  // 1-based
};

std::vector<Sample> all_samples(const std::vector<VideoClip>& clips) {
    std::vector<Sample> samples;
    for (int c = 0; c < static_cast<int>(clips.size()); ++c)
        for (int t = 1; t <= clips[c].length(); ++t) samples.push_back({c, t});
    if (samples.empty()) throw ValidationError("train: the training split has no frames");
    return samples;
}

// Cosine decay from the configured rate down to 5% of it over the run;
// constant lr leaves the extremity joints oscillating near convergence.
double cosine_lr(double base, int it, int total) {
    if (total <= 1) return base;
    const double progress = static_cast<double>(it) / (total - 1);
    return base * (0.05 + 0.95 * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
}

void write_logs(const RunConfig& rc, const std::vector<double>& losses) {
    fs::create_directories(rc.output_dir);
    std::ofstream csv(fs::path(rc.output_dir) / "loss.csv");
    csv << "iteration,loss\n";
    for (size_t i = 0; i < losses.size(); ++i) csv << i + 1 << "," << losses[i] << "\n";
    std::ofstream cfg(fs::path(rc.output_dir) / "run_config.json");
    cfg << run_config_to_json(rc).dump(2) << "\n";
}

}  // namespace

void RunConfig::validate() const {
    bool known = false;
    for (const char* m : kModes) known = known || mode == m;
    if (!known) throw ValidationError("train: unknown mode '" + mode + "'");
    if (!(learning_rate > 0.0)) throw ValidationError("train: learning_rate must be > 0");
    if (iterations < 1) throw ValidationError("train: iterations must be >= 1");
    if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
    model.validate();
}

nlohmann::ordered_json run_config_to_json(const RunConfig& rc) {
    nlohmann::ordered_json j;
    j["mode"] = rc.mode;
    j["model"] = model_config_to_json(rc.model);
    j["learning_rate"] = rc.learning_rate;
    j["iterations"] = rc.iterations;
    j["batch_size"] = rc.batch_size;
    j["seed"] = rc.seed;
    j["grad_clip"] = rc.grad_clip;
    j["dataset"] = rc.dataset;
    j["output_dir"] = rc.output_dir;
    j["init_checkpoint"] = rc.init_checkpoint;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig rc;
    try {
        rc.mode = j.value("mode", rc.mode);
        if (j.contains("model")) rc.model = model_config_from_json(j.at("model"));
        rc.learning_rate = j.value("learning_rate", rc.learning_rate);
        rc.iterations = j.value("iterations", rc.iterations);
        rc.batch_size = j.value("batch_size", rc.batch_size);
        rc.seed = j.value("seed", rc.seed);
        rc.grad_clip = j.value("grad_clip", rc.grad_clip);
        rc.dataset = j.value("dataset", rc.dataset);
        rc.output_dir = j.value("output_dir", rc.output_dir);
        rc.init_checkpoint = j.value("init_checkpoint", rc.init_checkpoint);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("run config: ") + e.what());
    }
    rc.validate();
    return rc;
}

TrainResult train_posenet(const RunConfig& rc, const std::vector<VideoClip>& clips) {
    rc.validate();
    if (is_temporal_mode(rc.mode))
        throw ValidationError("train: temporal modes go through train_temporal");
    if (!rc.init_checkpoint.empty())
        throw ValidationError("train: init_checkpoint is only used by the temporal phases");

    ModelConfig mc = rc.model;
    mc.conditioning_mode = conditioning_for_mode(rc.mode);
    mc.validate();
    check_frames(clips, mc.input_size);

    PoseNet net(mc, rc.seed);
    std::vector<ParamBlock*> params = net.params();
    AdamOptimizer opt(rc.learning_rate);
    opt.attach(params);
    GradVec grads = make_grads(params);

    // Targets are reused across epochs; render them once.
    std::vector<std::vector<HeatmapStack>> targets(clips.size());
    for (size_t c = 0; c < clips.size(); ++c)
        for (const Pose& pose : clips[c].annotations)
            targets[c].push_back(render_target(pose, mc));

    const std::vector<Sample> samples = all_samples(clips);
    std::mt19937_64 rng(rc.seed ^ 0x74726e5fULL);
    std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);

    TrainResult result;
    for (int it = 0; it < rc.iterations; ++it) {
        opt.set_lr(cosine_lr(rc.learning_rate, it, rc.iterations));
        zero_grads(grads);
        double loss_sum = 0.0;
        for (int b = 0; b < rc.batch_size; ++b) {
            const Sample s = samples[pick(rng)];
            const VideoClip& clip = clips[s.clip];
            const Tensor x = PoseNet::normalize(clip.frames[s.frame - 1]);
            PoseNet::Cache cache;
            const StageOutput out = net.forward(x, style_for(mc, clip), &cache);
            loss_sum += net.backward(out, targets[s.clip][s.frame - 1], cache, grads);
        }
        scale_grads(grads, 1.0 / rc.batch_size);
        if (rc.grad_clip > 0.0) clip_grads(grads, rc.grad_clip);
        opt.step(params, grads);
        result.losses.push_back(loss_sum / rc.batch_size);
    }

    write_logs(rc, result.losses);
    result.checkpoint_path = (fs::path(rc.output_dir) / "checkpoint.ckpt").string();
    net.save(result.checkpoint_path, run_config_to_json(rc));
    return result;
}

TrainResult train_temporal(const RunConfig& rc, const std::vector<VideoClip>& clips) {
    rc.validate();
    if (!is_temporal_mode(rc.mode))
        throw ValidationError("train: mode '" + rc.mode + "' goes through train_posenet");
    if (rc.init_checkpoint.empty())
        throw ValidationError(
            rc.mode == "temporal-phase1"
                ? "train: temporal-phase1 needs an estimator checkpoint (init_checkpoint)"
                : "train: temporal-phase2 needs a phase-1 checkpoint (init_checkpoint)");

    TemporalNet net;
    if (rc.mode == "temporal-phase1") {
        const PoseNet base = PoseNet::load(rc.init_checkpoint);
        net = TemporalNet(base, rc.seed, rc.model.seq_spec);
    } else {
        net = TemporalNet::load(rc.init_checkpoint);
    }
    const ModelConfig& mc = net.config();
    check_frames(clips, mc.input_size);

    std::vector<ParamBlock*> params = net.params();
    AdamOptimizer opt(rc.learning_rate);
    opt.attach(params);
    GradVec grads = make_grads(params);

    std::vector<std::vector<HeatmapStack>> targets(clips.size());
    std::vector<std::vector<HeatmapStack>> estimates(clips.size());
    for (size_t c = 0; c < clips.size(); ++c) {
        for (const Pose& pose : clips[c].annotations)
            targets[c].push_back(render_target(pose, mc));
        estimates[c] = compute_clip_estimates(net.base(), clips[c]);
    }

    const std::vector<Sample> samples = all_samples(clips);
    std::mt19937_64 rng(rc.seed ^ 0x74726e5fULL);
    std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
    const bool phase1 = rc.mode == "temporal-phase1";

    TrainResult result;
    for (int it = 0; it < rc.iterations; ++it) {
        opt.set_lr(cosine_lr(rc.learning_rate, it, rc.iterations));
        zero_grads(grads);
        double loss_sum = 0.0;
        for (int b = 0; b < rc.batch_size; ++b) {
            const Sample s = samples[pick(rng)];
            const VideoClip& clip = clips[s.clip];
            const Tensor x = PoseNet::normalize(clip.frames[s.frame - 1]);
            const PoseSequence seq =
                assemble_sequence(estimates[s.clip], s.frame, mc.seq_spec);
            const std::optional<StyleLabel> style = style_for(mc, clip);
            const HeatmapStack& target = targets[s.clip][s.frame - 1];
            if (phase1) {
                TemporalNet::Cache cache;
                const auto [branches, pooled] = net.refine(x, seq, style, &cache);
                loss_sum += net.phase1_backward(branches, target, cache, grads);
            } else {
                const auto [branches, pooled] = net.refine(x, seq, style, nullptr);
                loss_sum += net.phase2_backward(branches, pooled, target, grads);
            }
        }
        scale_grads(grads, 1.0 / rc.batch_size);
        if (rc.grad_clip > 0.0) clip_grads(grads, rc.grad_clip);
        opt.step(params, grads);
        result.losses.push_back(loss_sum / rc.batch_size);
    }

    write_logs(rc, result.losses);
    result.checkpoint_path = (fs::path(rc.output_dir) / "checkpoint.ckpt").string();
    net.save(result.checkpoint_path, run_config_to_json(rc));
    return result;
}

std::vector<HeatmapStack> compute_clip_estimates(const PoseNet& net, const VideoClip& clip) {
    std::vector<HeatmapStack> estimates;
    estimates.reserve(clip.length());
    for (int t = 1; t <= clip.length(); ++t) {
        const Tensor x = PoseNet::normalize(clip.frames[t - 1]);
        StageOutput out = net.forward(x, style_for(net.config(), clip), nullptr);
        estimates.push_back(std::move(out.per_stage.back()));
    }
    return estimates;
}

ClipPredictions predict_clip(const PoseNet& net, const VideoClip& clip,
                             ClipConfidences* conf) {
    ClipPredictions pred;
    pred.clip_id = clip.clip_id;
    for (const HeatmapStack& h : compute_clip_estimates(net, clip)) {
        const DecodedPose d = decode_pose(h);
        pred.poses.push_back(d.pose);
        if (conf) conf->per_frame.push_back(d.peak_confidence);
    }
    return pred;
}

ClipPredictions predict_clip(const TemporalNet& net, const VideoClip& clip,
                             ClipConfidences* conf) {
    const ModelConfig& mc = net.config();
    const std::vector<HeatmapStack> estimates = compute_clip_estimates(net.base(), clip);
    ClipPredictions pred;
    pred.clip_id = clip.clip_id;
    for (int t = 1; t <= clip.length(); ++t) {
        const Tensor x = PoseNet::normalize(clip.frames[t - 1]);
        const PoseSequence seq = assemble_sequence(estimates, t, mc.seq_spec);
        const auto [branches, pooled] =
            net.refine(x, seq, style_for(mc, clip), nullptr);
        const DecodedPose d = decode_pose(pooled);
        pred.poses.push_back(d.pose);
        if (conf) conf->per_frame.push_back(d.peak_confidence);
    }
    return pred;
}

ClipPredictions predict_clip(const PoseNet& net, const VideoClip& clip) {
    return predict_clip(net, clip, nullptr);
}

ClipPredictions predict_clip(const TemporalNet& net, const VideoClip& clip) {
    return predict_clip(net, clip, nullptr);
}

}  // namespace swimpose
