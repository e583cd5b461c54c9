#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swimpose/tensor.hpp"

namespace swimpose {

/// Thrown for bad user input (configs, file contents, CLI arguments).
/// The CLI maps it to exit code 1; everything else exits 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr int kNumJoints = 14;

/// 14-joint person-centric body model. Indices are stable and define the
/// channel order of every heatmap stack and the column order of annotations.
enum class JointId : int {
    head = 0,
    neck = 1,
    left_shoulder = 2,
    right_shoulder = 3,
    left_elbow = 4,
    right_elbow = 5,
    left_wrist = 6,
    right_wrist = 7,
    left_hip = 8,
    right_hip = 9,
    left_knee = 10,
    right_knee = 11,
    left_ankle = 12,
    right_ankle = 13,
};

const char* joint_name(JointId j);

/// Left<->right counterpart; identity for head and neck.
JointId mirror_joint(JointId j);

struct Joint {
    double x = 0.0;
    double y = 0.0;
    bool visible = true;
};

/// Full-body annotation: one entry per JointId, coordinates in input-image
/// pixels (origin at the top-left pixel center). Occluded joints keep their
/// coordinates and carry visible=false.
struct Pose {
    std::array<Joint, kNumJoints> joints{};

    Joint& operator[](JointId j) { return joints[static_cast<int>(j)]; }
    const Joint& operator[](JointId j) const { return joints[static_cast<int>(j)]; }
};

/// Reflect a pose about the vertical image axis, swapping paired joints.
/// An involution: mirror_pose(mirror_pose(p, w), w) == p.
Pose mirror_pose(const Pose& pose, double image_width);

constexpr int kNumStyles = 4;

enum class StyleLabel : int {
    backstroke = 0,
    breaststroke = 1,
    butterfly = 2,
    freestyle = 3,
};

const char* style_name(StyleLabel s);
StyleLabel style_from_name(const std::string& name);

/// Styles whose left and right limbs move in phase and share annotations.
bool is_symmetric_style(StyleLabel s);

std::array<double, kNumStyles> one_hot(StyleLabel s);

/// Per-joint confidence maps on the downsampled heatmap grid.
/// grid_stride = input-image pixels per heatmap cell.
struct HeatmapStack {
    Tensor data;  // [kNumJoints, H_map, W_map]
    double grid_stride = 1.0;

    HeatmapStack() = default;
    HeatmapStack(int h, int w, double stride)
        : data(kNumJoints, h, w), grid_stride(stride) {}
};

/// 8-bit RGB frame as stored on disk.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 0) {}

    uint8_t& at(int y, int x, int c) { return rgb[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    uint8_t at(int y, int x, int c) const { return rgb[(static_cast<size_t>(y) * width + x) * 3 + c]; }
};

/// Ordered frames of a single athlete with per-frame annotations and one
/// clip-level style. Frame indices are 1-based throughout the data model.
struct VideoClip {
    std::string clip_id;
    StyleLabel style = StyleLabel::backstroke;
    std::vector<Image> frames;
    std::vector<Pose> annotations;

    int length() const { return static_cast<int>(frames.size()); }
};

/// Temporal sequence geometry. l estimates on each side, sampled every other
/// frame: span k = 4l+1 frames, effective input length k' = 2l+1 stacks.
struct SequenceSpec {
    int l = 0;

    SequenceSpec() = default;
    explicit SequenceSpec(int l_) : l(l_) {
        if (l < 0) throw ValidationError("SequenceSpec: l must be non-negative");
    }

    int k() const { return 4 * l + 1; }
    int k_prime() const { return 2 * l + 1; }
};

enum class ConditioningMode : int { none = 0, once = 1, repeated = 2 };

const char* conditioning_mode_name(ConditioningMode m);
ConditioningMode conditioning_mode_from_name(const std::string& name);

/// Estimator hyperparameters. The heatmap grid divides the input image by a
/// power-of-two stride; the trunk pools once per factor of two.
struct ModelConfig {
    int num_stages = 3;
    int num_joints = kNumJoints;
    int input_size = 368;
    int heatmap_size = 46;
    double gaussian_sigma = 1.0;  // heatmap cells
    ConditioningMode conditioning_mode = ConditioningMode::none;
    int first_conditioned_stage = 2;  // label maps go to stages >= this
    SequenceSpec seq_spec{7};
    double channel_mult = 1.0;

    int grid_stride() const { return input_size / heatmap_size; }

    void validate() const;
};

}  // namespace swimpose
