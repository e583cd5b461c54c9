#include <doctest.h>

#include <cmath>
#include <random>

#include "swimpose/heatmap_codec.hpp"

using namespace swimpose;

namespace {

ModelConfig desk_config() {
    ModelConfig c;
    c.input_size = 64;
    c.heatmap_size = 16;
    return c;
}

}  // namespace

TEST_SUITE("codec") {

TEST_CASE("cell/pixel transforms are inverses and pin the grid alignment") {
    // stride 4: cell 0 is centered on pixel 1.5, not on pixel 0
    CHECK(cell_to_pixel(0.0, 4.0) == doctest::Approx(1.5));
    CHECK(cell_to_pixel(15.0, 4.0) == doctest::Approx(61.5));
    CHECK(pixel_to_cell(1.5, 4.0) == doctest::Approx(0.0));
    for (double p : {0.0, 17.25, 40.0, 63.0})
        CHECK(cell_to_pixel(pixel_to_cell(p, 4.0), 4.0) == doctest::Approx(p));
}

TEST_CASE("render_target peaks at the joint cell with unit height") {
    const ModelConfig cfg = desk_config();
    Pose pose;
    for (int j = 0; j < kNumJoints; ++j)
        pose.joints[j] = {1.5 + 4.0 * (j % 8), 1.5 + 4.0 * (j / 2), true};
    const HeatmapStack target = render_target(pose, cfg);
    CHECK(target.grid_stride == 4.0);
    CHECK(target.data.height() == 16);

    for (int j = 0; j < kNumJoints; ++j) {
        const int cx = (j % 8), cy = (j / 2);
        CHECK(target.data.at(j, cy, cx) == doctest::Approx(1.0));
        // one cell away decays by exp(-0.5) for sigma 1
        if (cx + 1 < 16)
            CHECK(target.data.at(j, cy, cx + 1) ==
                  doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }
}

TEST_CASE("render/decode round-trips cell-center positions exactly") {
    const ModelConfig cfg = desk_config();
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> cell(0, 15);
    for (int trial = 0; trial < 20; ++trial) {
        Pose pose;
        for (int j = 0; j < kNumJoints; ++j)
            pose.joints[j] = {cell_to_pixel(cell(rng), 4.0), cell_to_pixel(cell(rng), 4.0),
                              true};
        const DecodedPose dec = decode_pose(render_target(pose, cfg));
        for (int j = 0; j < kNumJoints; ++j) {
            CHECK(dec.pose.joints[j].x == doctest::Approx(pose.joints[j].x));
            CHECK(dec.pose.joints[j].y == doctest::Approx(pose.joints[j].y));
            CHECK(dec.peak_confidence[j] == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("decode error for off-center positions is bounded by half a cell") {
    const ModelConfig cfg = desk_config();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pix(0.0, 63.0);
    for (int trial = 0; trial < 20; ++trial) {
        Pose pose;
        for (int j = 0; j < kNumJoints; ++j) pose.joints[j] = {pix(rng), pix(rng), true};
        const DecodedPose dec = decode_pose(render_target(pose, cfg));
        for (int j = 0; j < kNumJoints; ++j) {
            CHECK(std::abs(dec.pose.joints[j].x - pose.joints[j].x) <= 2.0 + 1e-9);
            CHECK(std::abs(dec.pose.joints[j].y - pose.joints[j].y) <= 2.0 + 1e-9);
        }
    }
}

TEST_CASE("out-of-bounds coordinates are clamped into the image") {
    const ModelConfig cfg = desk_config();
    Pose pose;
    pose.joints[0] = {-25.0, 10.0, true};
    pose.joints[1] = {500.0, 63.9, true};
    const HeatmapStack target = render_target(pose, cfg);
    const DecodedPose dec = decode_pose(target);
    CHECK(dec.pose.joints[0].x == doctest::Approx(cell_to_pixel(0.0, 4.0)));
    CHECK(dec.pose.joints[1].x == doctest::Approx(cell_to_pixel(15.0, 4.0)));
    // peak is still unit height after clamping
    CHECK(dec.peak_confidence[0] == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("argmax ties break to the lowest row-major cell") {
    HeatmapStack maps(8, 8, 4.0);
    maps.data.fill(0.0);
    // joint 0: two equal peaks; the earlier row-major one must win
    maps.data.at(0, 5, 6) = 0.7;
    maps.data.at(0, 2, 3) = 0.7;
    // joint 1: all-zero map decodes to cell (0,0)
    const DecodedPose dec = decode_pose(maps);
    CHECK(dec.pose.joints[0].x == doctest::Approx(cell_to_pixel(3.0, 4.0)));
    CHECK(dec.pose.joints[0].y == doctest::Approx(cell_to_pixel(2.0, 4.0)));
    CHECK(dec.peak_confidence[0] == doctest::Approx(0.7));
    CHECK(dec.pose.joints[1].x == doctest::Approx(cell_to_pixel(0.0, 4.0)));
    CHECK(dec.pose.joints[1].y == doctest::Approx(cell_to_pixel(0.0, 4.0)));
}

TEST_CASE("rendered target is independent of the visibility flag") {
    // Occluded joints keep coordinates; supervision covers them identically.
    const ModelConfig cfg = desk_config();
    Pose a, b;
    for (int j = 0; j < kNumJoints; ++j) {
        a.joints[j] = {8.0 + j, 30.0, true};
        b.joints[j] = {8.0 + j, 30.0, false};
    }
    CHECK(render_target(a, cfg).data == render_target(b, cfg).data);
}

}  // TEST_SUITE
