#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "swimpose/temporal.hpp"

using namespace swimpose;

namespace {

ModelConfig tiny_config(int l) {
    ModelConfig cfg;
    cfg.input_size = 8;
    cfg.heatmap_size = 4;
    cfg.num_stages = 2;
    cfg.channel_mult = 0.25;
    cfg.seq_spec = SequenceSpec{l};
    return cfg;
}

Tensor random_input(int size, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    Tensor t(3, size, size);
    for (size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
    return t;
}

std::vector<HeatmapStack> fake_estimates(int T, int h, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<HeatmapStack> est;
    for (int t = 1; t <= T; ++t) {
        HeatmapStack s(h, h, 2.0);
        for (size_t i = 0; i < s.data.size(); ++i) s.data.data()[i] = dist(rng);
        est.push_back(std::move(s));
    }
    return est;
}

HeatmapStack tiny_target(const ModelConfig& cfg, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> cell(0, cfg.heatmap_size - 1);
    Pose p;
    for (int j = 0; j < kNumJoints; ++j)
        p.joints[j] = {cell_to_pixel(cell(rng), cfg.grid_stride()),
                       cell_to_pixel(cell(rng), cfg.grid_stride()), true};
    return render_target(p, cfg);
}

}  // namespace

TEST_SUITE("temporal") {

TEST_CASE("assemble_sequence samples every other frame around the center") {
    const auto est = fake_estimates(100, 4, 1);

    // l=1 at t=10: frames 8, 10, 12
    PoseSequence s = assemble_sequence(est, 10, SequenceSpec{1});
    CHECK(s.indices == std::vector<int>{8, 10, 12});
    CHECK(s.center_t == 10);
    CHECK(s.stacks.size() == 3);
    CHECK(s.stacks[0].data == est[7].data);
    CHECK(s.stacks[1].data == est[9].data);
    CHECK(s.stacks[2].data == est[11].data);

    // l=7 at t=50: a 29-frame span sampled at 36, 38, ..., 64
    s = assemble_sequence(est, 50, SequenceSpec{7});
    REQUIRE(s.indices.size() == 15);
    CHECK(s.indices.front() == 36);
    CHECK(s.indices.back() == 64);
    for (size_t i = 1; i < s.indices.size(); ++i)
        CHECK(s.indices[i] - s.indices[i - 1] == 2);

    // clamping at the clip start: l=1 at t=1 reuses frame 1
    s = assemble_sequence(est, 1, SequenceSpec{1});
    CHECK(s.indices == std::vector<int>{1, 1, 3});
    CHECK(s.stacks[0].data == est[0].data);

    // clamping at the clip end
    s = assemble_sequence(est, 100, SequenceSpec{2});
    CHECK(s.indices == std::vector<int>{96, 98, 100, 100, 100});

    // l=0 degenerates to the center frame alone
    s = assemble_sequence(est, 42, SequenceSpec{0});
    CHECK(s.indices == std::vector<int>{42});

    CHECK_THROWS_AS(assemble_sequence(est, 0, SequenceSpec{1}), ValidationError);
    CHECK_THROWS_AS(assemble_sequence(est, 101, SequenceSpec{1}), ValidationError);
    CHECK_THROWS_AS(assemble_sequence({}, 1, SequenceSpec{1}), ValidationError);
}

TEST_CASE("refine emits branch and pooled stacks at heatmap shape") {
    const ModelConfig cfg = tiny_config(2);
    TemporalNet net(PoseNet(cfg, 31), 32);
    const auto est = fake_estimates(20, cfg.heatmap_size, 2);
    const PoseSequence seq = assemble_sequence(est, 10, cfg.seq_spec);
    const auto [branches, pooled] = net.refine(random_input(cfg.input_size, 3), seq);

    for (const HeatmapStack* s : {&branches.past, &branches.present, &branches.future,
                                  &pooled}) {
        CHECK(s->data.channels() == kNumJoints);
        CHECK(s->data.height() == cfg.heatmap_size);
        CHECK(s->data.width() == cfg.heatmap_size);
    }
}

TEST_CASE("pooling weights start at one third and the bias at zero") {
    TemporalNet net(PoseNet(tiny_config(1), 33), 34);
    const ParamBlock& w = net.pooling_weights();
    const ParamBlock& b = net.pooling_bias();
    REQUIRE(w.w.size() == static_cast<size_t>(kNumJoints) * 3);
    REQUIRE(b.w.size() == static_cast<size_t>(kNumJoints));
    for (double v : w.w) CHECK(v == doctest::Approx(1.0 / 3.0));
    for (double v : b.w) CHECK(v == 0.0);
}

TEST_CASE("pooling blends branches per joint: worked example") {
    // Constant all-ones branch maps with weights (0.289, 0.300, 0.306):
    // every pooled cell reads 0.895.
    TemporalNet net(PoseNet(tiny_config(1), 35), 36);
    const int h = net.config().heatmap_size;
    TemporalNet::BranchOutputs branches{HeatmapStack(h, h, 2.0),
                                        HeatmapStack(h, h, 2.0),
                                        HeatmapStack(h, h, 2.0)};
    branches.past.data.fill(1.0);
    branches.present.data.fill(1.0);
    branches.future.data.fill(1.0);

    ParamBlock& w = net.pooling_weights();
    for (int j = 0; j < kNumJoints; ++j) {
        w.w[j * 3 + 0] = 0.289;
        w.w[j * 3 + 1] = 0.300;
        w.w[j * 3 + 2] = 0.306;
    }
    const HeatmapStack pooled = net.pool(branches);
    for (size_t i = 0; i < pooled.data.size(); ++i)
        CHECK(pooled.data.data()[i] == doctest::Approx(0.895).epsilon(1e-12));

    // degenerate weights (1, 0, 0) copy the past branch through
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto* s : {&branches.past, &branches.present, &branches.future})
        for (size_t i = 0; i < s->data.size(); ++i) s->data.data()[i] = dist(rng);
    for (int j = 0; j < kNumJoints; ++j) {
        w.w[j * 3 + 0] = 1.0;
        w.w[j * 3 + 1] = 0.0;
        w.w[j * 3 + 2] = 0.0;
    }
    CHECK(net.pool(branches).data == branches.past.data);

    // per-joint weights act on their own joint only
    for (int j = 0; j < kNumJoints; ++j) {
        w.w[j * 3 + 0] = (j == 4) ? 0.0 : 1.0;
        net.pooling_bias().w[j] = (j == 4) ? 2.5 : 0.0;
    }
    const HeatmapStack mixed = net.pool(branches);
    CHECK(mixed.data.at(4, 0, 0) == doctest::Approx(2.5));
    CHECK(mixed.data.at(3, 0, 0) == doctest::Approx(branches.past.data.at(3, 0, 0)));
}

TEST_CASE("fresh pooling averages the branches exactly") {
    const ModelConfig cfg = tiny_config(1);
    TemporalNet net(PoseNet(cfg, 37), 38);
    const auto est = fake_estimates(12, cfg.heatmap_size, 4);
    const PoseSequence seq = assemble_sequence(est, 6, cfg.seq_spec);
    const auto [branches, pooled] = net.refine(random_input(cfg.input_size, 5), seq);
    for (size_t i = 0; i < pooled.data.size(); ++i) {
        const double mean = (branches.past.data.data()[i] + branches.present.data.data()[i] +
                             branches.future.data.data()[i]) /
                            3.0;
        CHECK(pooled.data.data()[i] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("l=0 collapses to the present branch with zero outer maps") {
    const ModelConfig cfg = tiny_config(0);
    TemporalNet net(PoseNet(cfg, 39), 40);
    const auto est = fake_estimates(5, cfg.heatmap_size, 6);
    const PoseSequence seq = assemble_sequence(est, 3, cfg.seq_spec);
    const auto [branches, pooled] = net.refine(random_input(cfg.input_size, 7), seq);

    for (size_t i = 0; i < branches.past.data.size(); ++i) {
        CHECK(branches.past.data.data()[i] == 0.0);
        CHECK(branches.future.data.data()[i] == 0.0);
    }
    // pooled = w_present * present + bias, with the fresh 1/3 weights
    for (size_t i = 0; i < pooled.data.size(); ++i)
        CHECK(pooled.data.data()[i] ==
              doctest::Approx(branches.present.data.data()[i] / 3.0).epsilon(1e-12));
}

TEST_CASE("past and future branches read their own window halves") {
    const ModelConfig cfg = tiny_config(2);
    TemporalNet net(PoseNet(cfg, 41), 42);
    const auto est = fake_estimates(20, cfg.heatmap_size, 8);
    const Tensor x = random_input(cfg.input_size, 9);

    const PoseSequence seq = assemble_sequence(est, 10, cfg.seq_spec);
    const auto [base_out, base_pooled] = net.refine(x, seq);

    // perturb the last (future-most) stack: past must not move
    PoseSequence bumped = seq;
    bumped.stacks.back().data.fill(3.0);
    const auto [with_future, p1] = net.refine(x, bumped);
    CHECK(with_future.past.data == base_out.past.data);
    CHECK(with_future.present.data == base_out.present.data);
    CHECK_FALSE(with_future.future.data == base_out.future.data);

    // perturb the first (past-most) stack: future must not move
    bumped = seq;
    bumped.stacks.front().data.fill(3.0);
    const auto [with_past, p2] = net.refine(x, bumped);
    CHECK_FALSE(with_past.past.data == base_out.past.data);
    CHECK(with_past.present.data == base_out.present.data);
    CHECK(with_past.future.data == base_out.future.data);

    // perturb the center stack: only the present branch reads it
    bumped = seq;
    bumped.stacks[2].data.fill(3.0);
    const auto [with_center, p3] = net.refine(x, bumped);
    CHECK(with_center.past.data == base_out.past.data);
    CHECK_FALSE(with_center.present.data == base_out.present.data);
    CHECK(with_center.future.data == base_out.future.data);
}

TEST_CASE("refine validates its sequence and style inputs") {
    const ModelConfig cfg = tiny_config(2);
    TemporalNet net(PoseNet(cfg, 43), 44);
    const auto est = fake_estimates(20, cfg.heatmap_size, 10);
    const Tensor x = random_input(cfg.input_size, 11);

    // l mismatch between net and sequence
    CHECK_THROWS_AS(net.refine(x, assemble_sequence(est, 10, SequenceSpec{1})),
                    ValidationError);
    // stack of the wrong spatial shape
    PoseSequence bad = assemble_sequence(est, 10, cfg.seq_spec);
    bad.stacks[1] = HeatmapStack(cfg.heatmap_size + 2, cfg.heatmap_size + 2, 2.0);
    CHECK_THROWS_AS(net.refine(x, bad), ValidationError);
    // dropped stack
    bad = assemble_sequence(est, 10, cfg.seq_spec);
    bad.stacks.pop_back();
    CHECK_THROWS_AS(net.refine(x, bad), ValidationError);

    // conditioned base demands a style at refine time
    ModelConfig ccfg = tiny_config(1);
    ccfg.conditioning_mode = ConditioningMode::once;
    TemporalNet cnet(PoseNet(ccfg, 45), 46);
    const PoseSequence cseq = assemble_sequence(est, 10, ccfg.seq_spec);
    CHECK_THROWS_AS(cnet.refine(x, cseq), ValidationError);
    CHECK_NOTHROW(cnet.refine(x, cseq, StyleLabel::freestyle));
    // ...and an unconditioned one refuses a label
    const PoseSequence useq = assemble_sequence(est, 10, cfg.seq_spec);
    CHECK_THROWS_AS(net.refine(x, useq, StyleLabel::freestyle), ValidationError);

    // fresh label weights are zero, so the choice of style is a no-op
    CHECK(cnet.refine(x, cseq, StyleLabel::freestyle).second.data ==
          cnet.refine(x, cseq, StyleLabel::butterfly).second.data);
}

TEST_CASE("constructor spec override and odd-size rejection") {
    const ModelConfig cfg = tiny_config(3);
    const PoseNet base(cfg, 47);
    TemporalNet net(base, 48, SequenceSpec{1});
    CHECK(net.config().seq_spec.l == 1);  // override wins over the base config

    ModelConfig odd = cfg;
    odd.input_size = 40;
    odd.heatmap_size = 5;  // cannot halve for the outer branches
    const PoseNet odd_base(odd, 49);
    CHECK_THROWS_AS(TemporalNet(odd_base, 50), ValidationError);
    CHECK_NOTHROW(TemporalNet(odd_base, 51, SequenceSpec{0}));  // no outer branches
}

TEST_CASE("phase 1 gradients match finite differences, pooling untouched") {
    const ModelConfig cfg = tiny_config(1);
    TemporalNet net(PoseNet(cfg, 53), 54);
    const auto est = fake_estimates(12, cfg.heatmap_size, 12);
    const PoseSequence seq = assemble_sequence(est, 6, cfg.seq_spec);
    const Tensor x = random_input(cfg.input_size, 13);
    const HeatmapStack target = tiny_target(cfg, 14);

    TemporalNet::Cache cache;
    const auto [out, pooled] = net.refine(x, seq, {}, &cache);
    auto params = net.params();
    REQUIRE(params.size() >= 2);
    GradVec grads = make_grads(params);
    const double loss = net.phase1_backward(out, target, cache, grads);
    CHECK(loss == doctest::Approx(net.phase1_loss(out, target)));

    // the last two blocks are the pooling weights and bias: untouched
    for (size_t g : {params.size() - 2, params.size() - 1})
        for (double v : grads[g]) CHECK(v == 0.0);

    std::mt19937_64 pick(15);
    const double eps = 1e-6;
    double worst = 0.0;
    for (size_t pi = 0; pi + 2 < params.size(); ++pi) {
        for (int probe = 0; probe < 2; ++probe) {
            const size_t i = pick() % params[pi]->w.size();
            const double saved = params[pi]->w[i];
            params[pi]->w[i] = saved + eps;
            const auto [up_out, up_pooled] = net.refine(x, seq);
            const double up = net.phase1_loss(up_out, target);
            params[pi]->w[i] = saved - eps;
            const auto [dn_out, dn_pooled] = net.refine(x, seq);
            const double down = net.phase1_loss(dn_out, target);
            params[pi]->w[i] = saved;
            const double fd = (up - down) / (2 * eps);
            const double rel = std::abs(grads[pi][i] - fd) /
                               std::max(1e-4, std::abs(fd) + std::abs(grads[pi][i]));
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("phase 2 gradients match finite differences, branches untouched") {
    const ModelConfig cfg = tiny_config(1);
    TemporalNet net(PoseNet(cfg, 55), 56);
    const auto est = fake_estimates(12, cfg.heatmap_size, 16);
    const PoseSequence seq = assemble_sequence(est, 6, cfg.seq_spec);
    const Tensor x = random_input(cfg.input_size, 17);
    const HeatmapStack target = tiny_target(cfg, 18);

    const auto [out, pooled] = net.refine(x, seq);
    auto params = net.params();
    GradVec grads = make_grads(params);
    net.phase2_backward(out, pooled, target, grads);

    for (size_t g = 0; g + 2 < params.size(); ++g)
        for (double v : grads[g]) CHECK(v == 0.0);

    const size_t wi = params.size() - 2, bi = params.size() - 1;
    const double eps = 1e-6;
    double worst = 0.0;
    const auto phase2_loss = [&] {
        const HeatmapStack p = net.pool(out);
        double mse = 0.0;
        for (size_t i = 0; i < p.data.size(); ++i) {
            const double d = p.data.data()[i] - target.data.data()[i];
            mse += d * d;
        }
        return mse / static_cast<double>(p.data.size());
    };
    for (const size_t g : {wi, bi}) {
        for (size_t i = 0; i < params[g]->w.size(); ++i) {
            const double saved = params[g]->w[i];
            params[g]->w[i] = saved + eps;
            const double up = phase2_loss();
            params[g]->w[i] = saved - eps;
            const double down = phase2_loss();
            params[g]->w[i] = saved;
            const double fd = (up - down) / (2 * eps);
            const double rel = std::abs(grads[g][i] - fd) /
                               std::max(1e-4, std::abs(fd) + std::abs(grads[g][i]));
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("checkpoint round-trip preserves refine outputs") {
    namespace fs = std::filesystem;
    const ModelConfig cfg = tiny_config(2);
    TemporalNet net(PoseNet(cfg, 57), 58);
    const auto est = fake_estimates(20, cfg.heatmap_size, 19);
    const PoseSequence seq = assemble_sequence(est, 9, cfg.seq_spec);
    const Tensor x = random_input(cfg.input_size, 20);
    const auto [before, before_pooled] = net.refine(x, seq);

    const fs::path path = fs::temp_directory_path() / "swimpose_temporal_roundtrip.ckpt";
    net.save(path.string());
    TemporalNet loaded = TemporalNet::load(path.string());
    CHECK(loaded.config().seq_spec.l == 2);
    const auto [after, after_pooled] = loaded.refine(x, seq);
    CHECK(after.past.data == before.past.data);
    CHECK(after.present.data == before.present.data);
    CHECK(after.future.data == before.future.data);
    CHECK(after_pooled.data == before_pooled.data);
    fs::remove(path);
}

}  // TEST_SUITE
