#include <doctest.h>

#include "swimpose/core.hpp"

using namespace swimpose;

TEST_SUITE("core") {

TEST_CASE("mirror_joint swaps sides and fixes the midline") {
    CHECK(mirror_joint(JointId::head) == JointId::head);
    CHECK(mirror_joint(JointId::neck) == JointId::neck);
    CHECK(mirror_joint(JointId::left_shoulder) == JointId::right_shoulder);
    CHECK(mirror_joint(JointId::right_wrist) == JointId::left_wrist);
    CHECK(mirror_joint(JointId::left_ankle) == JointId::right_ankle);
    for (int j = 0; j < kNumJoints; ++j)
        CHECK(mirror_joint(mirror_joint(static_cast<JointId>(j))) ==
              static_cast<JointId>(j));
}

TEST_CASE("mirror_pose is an involution and reflects x") {
    Pose p;
    for (int j = 0; j < kNumJoints; ++j) {
        p.joints[j].x = 3.0 * j + 0.25;
        p.joints[j].y = 40.0 - j;
        p.joints[j].visible = (j % 3 != 0);
    }
    const double w = 64.0;
    const Pose m = mirror_pose(p, w);
    // x reflects about the pixel-center axis, y and visibility follow the joint
    CHECK(m[JointId::right_wrist].x ==
          doctest::Approx(w - 1.0 - p[JointId::left_wrist].x));
    CHECK(m[JointId::right_wrist].y == p[JointId::left_wrist].y);
    CHECK(m[JointId::right_wrist].visible == p[JointId::left_wrist].visible);
    CHECK(m[JointId::head].x == doctest::Approx(w - 1.0 - p[JointId::head].x));

    const Pose back = mirror_pose(m, w);
    for (int j = 0; j < kNumJoints; ++j) {
        CHECK(back.joints[j].x == doctest::Approx(p.joints[j].x));
        CHECK(back.joints[j].y == doctest::Approx(p.joints[j].y));
        CHECK(back.joints[j].visible == p.joints[j].visible);
    }
}

TEST_CASE("joint and style names round-trip") {
    CHECK(std::string(joint_name(JointId::left_hip)) == "left_hip");
    CHECK(std::string(joint_name(JointId::right_ankle)) == "right_ankle");
    for (int s = 0; s < kNumStyles; ++s) {
        const auto label = static_cast<StyleLabel>(s);
        CHECK(style_from_name(style_name(label)) == label);
    }
    CHECK(style_from_name("butterfly") == StyleLabel::butterfly);
    CHECK_THROWS_AS(style_from_name("doggy_paddle"), ValidationError);
    CHECK_THROWS_AS(style_from_name(""), ValidationError);
}

TEST_CASE("symmetric styles are exactly breaststroke and butterfly") {
    CHECK_FALSE(is_symmetric_style(StyleLabel::backstroke));
    CHECK(is_symmetric_style(StyleLabel::breaststroke));
    CHECK(is_symmetric_style(StyleLabel::butterfly));
    CHECK_FALSE(is_symmetric_style(StyleLabel::freestyle));
}

TEST_CASE("one_hot puts a single one at the style index") {
    for (int s = 0; s < kNumStyles; ++s) {
        const auto v = one_hot(static_cast<StyleLabel>(s));
        double sum = 0.0;
        for (int i = 0; i < kNumStyles; ++i) {
            CHECK(v[i] == (i == s ? 1.0 : 0.0));
            sum += v[i];
        }
        CHECK(sum == 1.0);
    }
}

TEST_CASE("conditioning mode names round-trip") {
    for (ConditioningMode m : {ConditioningMode::none, ConditioningMode::once,
                               ConditioningMode::repeated})
        CHECK(conditioning_mode_from_name(conditioning_mode_name(m)) == m);
    CHECK_THROWS_AS(conditioning_mode_from_name("twice"), ValidationError);
}

TEST_CASE("sequence spec computes span and effective length") {
    // l=7 -> a 29-frame span feeding 15 estimate stacks
    CHECK(SequenceSpec{7}.k() == 29);
    CHECK(SequenceSpec{7}.k_prime() == 15);
    CHECK(SequenceSpec{2}.k() == 9);
    CHECK(SequenceSpec{2}.k_prime() == 5);
    CHECK(SequenceSpec{0}.k() == 1);
    CHECK(SequenceSpec{0}.k_prime() == 1);
    CHECK_THROWS_AS(SequenceSpec{-1}, ValidationError);
}

TEST_CASE("model config validation") {
    ModelConfig c;
    c.input_size = 64;
    c.heatmap_size = 16;
    CHECK_NOTHROW(c.validate());

    ModelConfig bad = c;
    bad.num_stages = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = c;
    bad.heatmap_size = 15;  // stride would not be a power of two
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = c;
    bad.input_size = 60;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = c;
    bad.gaussian_sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = c;
    bad.first_conditioned_stage = 1;  // stage 1 can never take label maps
    bad.conditioning_mode = ConditioningMode::once;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = c;
    bad.channel_mult = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("tensor slicing and concatenation invert each other") {
    Tensor a(2, 3, 3), b(3, 3, 3);
    for (size_t i = 0; i < a.size(); ++i) a.data()[i] = 1.0 + i;
    for (size_t i = 0; i < b.size(); ++i) b.data()[i] = 100.0 + i;
    const Tensor cat = concat_channels({&a, &b});
    CHECK(cat.channels() == 5);
    CHECK(slice_channels(cat, 0, 2) == a);
    CHECK(slice_channels(cat, 2, 3) == b);
    CHECK(cat.at(2, 1, 1) == b.at(0, 1, 1));
}

}  // TEST_SUITE
