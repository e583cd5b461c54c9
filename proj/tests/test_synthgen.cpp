#include <doctest.h>

#include <cmath>
#include <set>

#include "swimpose/metrics.hpp"
#include "swimpose/synthgen.hpp"

using namespace swimpose;

namespace {

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.seed = 77;
    cfg.clips_per_style = 2;
    cfg.frames_per_clip = 45;  // > 2 periods
    cfg.image_size = 64;
    return cfg;
}

bool same_frame(const Image& a, const Image& b) {
    return a.width == b.width && a.height == b.height && a.rgb == b.rgb;
}

bool same_annotation(const Pose& a, const Pose& b) {
    for (int j = 0; j < kNumJoints; ++j)
        if (a.joints[j].x != b.joints[j].x || a.joints[j].y != b.joints[j].y ||
            a.joints[j].visible != b.joints[j].visible)
            return false;
    return true;
}

const VideoClip& find_clip(const std::vector<VideoClip>& clips, const std::string& id) {
    for (const auto& c : clips)
        if (c.clip_id == id) return c;
    REQUIRE(false);
    return clips.front();
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("equal configs generate bitwise-equal datasets") {
    const SynthConfig cfg = small_config();
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].clip_id == b[i].clip_id);
        CHECK(a[i].style == b[i].style);
        REQUIRE(a[i].length() == b[i].length());
        for (int t = 0; t < a[i].length(); ++t) {
            CHECK(same_frame(a[i].frames[t], b[i].frames[t]));
            CHECK(same_annotation(a[i].annotations[t], b[i].annotations[t]));
        }
    }

    SynthConfig other = cfg;
    other.seed = 78;
    const auto c = generate(other);
    CHECK_FALSE(same_frame(a[0].frames[0], c[0].frames[0]));
}

TEST_CASE("dataset shape, ids and split") {
    const SynthConfig cfg = small_config();
    const auto clips = generate(cfg);
    REQUIRE(clips.size() == cfg.styles.size() * cfg.clips_per_style);

    std::set<std::string> ids;
    for (const auto& c : clips) {
        ids.insert(c.clip_id);
        CHECK(c.length() == cfg.frames_per_clip);
        CHECK(static_cast<int>(c.annotations.size()) == cfg.frames_per_clip);
        for (const auto& f : c.frames) {
            CHECK(f.width == cfg.image_size);
            CHECK(f.height == cfg.image_size);
        }
    }
    CHECK(ids.size() == clips.size());
    CHECK(ids.count(synth_clip_id(StyleLabel::backstroke, 1)) == 1);
    CHECK(synth_clip_id(StyleLabel::freestyle, 2) == "freestyle_02");

    const auto split = default_split(cfg);
    CHECK(split.size() == clips.size());
    for (const auto& style : cfg.styles) {
        CHECK(split.at(synth_clip_id(style, 1)) == "train");
        CHECK(split.at(synth_clip_id(style, cfg.clips_per_style)) == "test");
    }
}

TEST_CASE("poses repeat exactly every period, visibility included") {
    const SynthConfig cfg = small_config();
    for (const auto& clip : generate(cfg))
        for (int t = 0; t + cfg.period < clip.length(); ++t)
            CHECK(same_annotation(clip.annotations[t], clip.annotations[t + cfg.period]));
}

TEST_CASE("every joint stays inside the frame") {
    SynthConfig cfg = small_config();
    cfg.frames_per_clip = cfg.period;  // one full cycle covers all poses
    for (const auto& clip : generate(cfg))
        for (const auto& pose : clip.annotations)
            for (const auto& j : pose.joints) {
                CHECK(j.x >= 0.0);
                CHECK(j.y >= 0.0);
                CHECK(j.x <= cfg.image_size - 1.0);
                CHECK(j.y <= cfg.image_size - 1.0);
            }
}

TEST_CASE("per-frame joint displacement respects the step bound") {
    const SynthConfig cfg = small_config();
    const double bound = max_step_bound(cfg);
    CHECK(bound > 0.0);
    for (const auto& clip : generate(cfg))
        for (int t = 1; t < clip.length(); ++t)
            for (int j = 0; j < kNumJoints; ++j) {
                const auto& a = clip.annotations[t - 1].joints[j];
                const auto& b = clip.annotations[t].joints[j];
                CHECK(std::hypot(b.x - a.x, b.y - a.y) <= bound);
            }
}

TEST_CASE("symmetric styles share coordinates across the midline verbatim") {
    const SynthConfig cfg = small_config();
    for (const auto& clip : generate(cfg)) {
        if (!is_symmetric_style(clip.style)) continue;
        for (const auto& pose : clip.annotations)
            for (int j = 0; j < kNumJoints; ++j) {
                const JointId id = static_cast<JointId>(j);
                const JointId m = mirror_joint(id);
                CHECK(pose[id].x == pose[m].x);
                CHECK(pose[id].y == pose[m].y);
            }
    }
}

TEST_CASE("occlusion_rate 0 renders every joint visible") {
    SynthConfig cfg = small_config();
    cfg.occlusion_rate = 0.0;
    for (const auto& clip : generate(cfg))
        for (const auto& pose : clip.annotations)
            for (const auto& j : pose.joints) CHECK(j.visible);
}

TEST_CASE("occlusion hides only limb groups, half the frames each cycle") {
    SynthConfig cfg = small_config();
    cfg.frames_per_clip = 3 * cfg.period;
    for (const auto& clip : generate(cfg)) {
        const bool sym = is_symmetric_style(clip.style);
        std::array<int, kNumJoints> hidden{};
        for (const auto& pose : clip.annotations)
            for (int j = 0; j < kNumJoints; ++j)
                if (!pose.joints[j].visible) ++hidden[j];

        for (int j = 0; j < kNumJoints; ++j) {
            const JointId id = static_cast<JointId>(j);
            const bool occludable =
                id == JointId::left_elbow || id == JointId::left_wrist ||
                id == JointId::left_knee || id == JointId::left_ankle ||
                (sym && (id == JointId::right_elbow || id == JointId::right_wrist ||
                         id == JointId::right_knee || id == JointId::right_ankle));
            if (occludable)
                // rate 0.5 with period-locked windows: exactly half of all frames
                CHECK(hidden[j] == cfg.frames_per_clip / 2);
            else
                CHECK(hidden[j] == 0);
        }
    }
}

TEST_CASE("occluded frames keep a visible view within the strided reach") {
    // Stride-2 sampling two steps out (t-4 ... t+4) must always find the
    // hidden joint visible somewhere; this is what lets temporal refinement
    // recover occluded limbs.
    SynthConfig cfg = small_config();
    cfg.frames_per_clip = 4 * cfg.period;
    for (const auto& clip : generate(cfg))
        for (int t = 4; t < clip.length() - 4; ++t)
            for (int j = 0; j < kNumJoints; ++j) {
                if (clip.annotations[t].joints[j].visible) continue;
                bool recoverable = false;
                for (int d : {-4, -2, 2, 4})
                    if (clip.annotations[t + d].joints[j].visible) recoverable = true;
                CHECK(recoverable);
            }
}

TEST_CASE("anti-symmetric pair shares right side and torso, differs left") {
    // Clips of the two styles run the same kinematics for everything except
    // the left limbs. Align two clips by brute-forcing the phase shift that
    // matches the right wrist trajectory; at that alignment the shared joints
    // agree exactly while the occludable left joints stay far apart relative
    // to the PCK threshold.
    SynthConfig cfg = small_config();
    cfg.clips_per_style = 1;
    cfg.frames_per_clip = 2 * cfg.period;
    const auto clips = generate(cfg);
    const VideoClip& bs = find_clip(clips, synth_clip_id(StyleLabel::backstroke, 1));
    const VideoClip& fs = find_clip(clips, synth_clip_id(StyleLabel::freestyle, 1));

    int shift = -1;
    for (int d = 0; d < cfg.period; ++d) {
        bool all = true;
        for (int t = 0; t < cfg.period; ++t) {
            const auto& a = bs.annotations[t][JointId::right_wrist];
            const auto& b = fs.annotations[(t + d) % cfg.period][JointId::right_wrist];
            if (a.x != b.x || a.y != b.y) all = false;
        }
        if (all) shift = d;
    }
    REQUIRE(shift >= 0);

    const std::array<JointId, 10> shared = {
        JointId::head,           JointId::neck,        JointId::left_shoulder,
        JointId::right_shoulder, JointId::right_elbow, JointId::right_wrist,
        JointId::left_hip,       JointId::right_hip,   JointId::right_knee,
        JointId::right_ankle};
    const std::array<JointId, 4> differing = {JointId::left_elbow, JointId::left_wrist,
                                              JointId::left_knee, JointId::left_ankle};

    for (int t = 0; t < cfg.period; ++t) {
        const Pose& a = bs.annotations[t];
        const Pose& b = fs.annotations[(t + shift) % cfg.period];
        for (JointId id : shared) {
            CHECK(a[id].x == b[id].x);
            CHECK(a[id].y == b[id].y);
        }
        // The designed ambiguity: under occlusion nothing visible separates
        // the styles, yet each hidden joint's two candidate positions sit
        // more than two PCK@0.2 radii apart, so no single guess covers both.
        const double threshold = 0.2 * torso_diameter(a);
        REQUIRE(threshold > 0.0);
        for (JointId id : differing) {
            const double gap = std::hypot(a[id].x - b[id].x, a[id].y - b[id].y);
            CHECK(gap > 2.0 * threshold);
        }
    }
}

TEST_CASE("symmetric pair shares the leg motion, differs in the arms") {
    SynthConfig cfg = small_config();
    cfg.clips_per_style = 1;
    cfg.frames_per_clip = 2 * cfg.period;
    const auto clips = generate(cfg);
    const VideoClip& br = find_clip(clips, synth_clip_id(StyleLabel::breaststroke, 1));
    const VideoClip& fly = find_clip(clips, synth_clip_id(StyleLabel::butterfly, 1));

    int shift = -1;
    for (int d = 0; d < cfg.period; ++d) {
        bool all = true;
        for (int t = 0; t < cfg.period; ++t) {
            const auto& a = br.annotations[t][JointId::right_ankle];
            const auto& b = fly.annotations[(t + d) % cfg.period][JointId::right_ankle];
            if (a.x != b.x || a.y != b.y) all = false;
        }
        if (all) shift = d;
    }
    REQUIRE(shift >= 0);

    double max_elbow_gap = 0.0, max_wrist_gap = 0.0, threshold = 0.0;
    for (int t = 0; t < cfg.period; ++t) {
        const Pose& a = br.annotations[t];
        const Pose& b = fly.annotations[(t + shift) % cfg.period];
        for (JointId id : {JointId::right_knee, JointId::right_ankle, JointId::left_knee,
                           JointId::left_ankle, JointId::right_hip, JointId::left_hip}) {
            CHECK(a[id].x == b[id].x);
            CHECK(a[id].y == b[id].y);
        }
        threshold = 0.2 * torso_diameter(a);
        max_elbow_gap = std::max(
            max_elbow_gap, std::hypot(a[JointId::right_elbow].x - b[JointId::right_elbow].x,
                                      a[JointId::right_elbow].y - b[JointId::right_elbow].y));
        max_wrist_gap = std::max(
            max_wrist_gap, std::hypot(a[JointId::right_wrist].x - b[JointId::right_wrist].x,
                                      a[JointId::right_wrist].y - b[JointId::right_wrist].y));
    }
    // The arm trajectories genuinely diverge over the cycle even though they
    // can brush past each other at single phases.
    CHECK(max_elbow_gap > 2.0 * threshold);
    CHECK(max_wrist_gap > 2.0 * threshold);
}

TEST_CASE("config validation rejects out-of-range settings") {
    SynthConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    SynthConfig bad = cfg;
    bad.occlusion_rate = 1.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.period = 3;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.image_size = 16;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.styles.clear();
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.noise_level = -0.1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

}  // TEST_SUITE
