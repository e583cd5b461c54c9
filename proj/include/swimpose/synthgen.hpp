#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swimpose/core.hpp"

namespace swimpose {

/// Generator settings for synthetic cyclic-swimmer clips. Everything is
/// derived from `seed`, so equal configs produce bitwise-equal datasets.
struct SynthConfig {
    uint64_t seed = 1;
    int clips_per_style = 6;  // the last clip of each style is the test clip
    int frames_per_clip = 150;
    int image_size = 64;
    int period = 20;  // frames per motion cycle
    /// Fraction of each cycle during which an occludable limb group is hidden
    /// (two antipodal windows per cycle, phase-locked to the motion).
    double occlusion_rate = 0.5;
    double noise_level = 0.1;  // per-frame additive pixel noise, 1.0 = sigma 10% of range
    std::vector<StyleLabel> styles = {StyleLabel::backstroke, StyleLabel::breaststroke,
                                      StyleLabel::butterfly, StyleLabel::freestyle};

    void validate() const;
};

// Clips of a side-view stick swimmer against textured water. Joint
// trajectories are smooth functions of the cycle phase, exactly periodic in
// `period`. The four styles come in two families:
//
//   backstroke / freestyle   anti-symmetric: left limbs run half a cycle out
//                            of phase with the right. Both styles share the
//                            right-limb and torso motion and differ only in
//                            the left-limb trajectories, so with the left
//                            limbs occluded their frames look alike while the
//                            ground truth disagrees well beyond the PCK@0.2
//                            threshold.
//   breaststroke / butterfly symmetric: paired joints share coordinates
//                            every frame. The two styles share the leg motion
//                            and differ in the arms, so they become ambiguous
//                            when the arms are hidden.
//
// Occlusion hides a limb group (left arm / left leg for the anti-symmetric
// family, both arms / both legs for the symmetric one) by not rendering it;
// the hidden joints keep coordinates and get visible=false. Windows are fixed
// offsets in phase, so visibility is as periodic as the pose itself.
std::vector<VideoClip> generate(const SynthConfig& cfg);

/// Clip id generate() assigns: "<style>_NN" with a 1-based index.
std::string synth_clip_id(StyleLabel style, int index);

/// The last clip of each style maps to "test", the rest to "train".
std::map<std::string, std::string> default_split(const SynthConfig& cfg);

/// Upper bound on per-joint displacement between consecutive frames, in
/// pixels: image_size * (2*pi / period) * amplitude bound of the kinematics.
double max_step_bound(const SynthConfig& cfg);

}  // namespace swimpose
