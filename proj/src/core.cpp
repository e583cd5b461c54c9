#include "swimpose/core.hpp"

#include <cmath>

namespace swimpose {

namespace {

constexpr const char* kJointNames[kNumJoints] = {
    "head",       "neck",        "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow", "left_wrist",    "right_wrist",
    "left_hip",   "right_hip",   "left_knee",     "right_knee",
    "left_ankle", "right_ankle",
};

constexpr const char* kStyleNames[kNumStyles] = {
    "backstroke", "breaststroke", "butterfly", "freestyle"};

}  // namespace

const char* joint_name(JointId j) { return kJointNames[static_cast<int>(j)]; }

JointId mirror_joint(JointId j) {
    const int i = static_cast<int>(j);
    if (i < 2) return j;  // head, neck
    // paired joints alternate left/right from index 2 on
    return static_cast<JointId>(i % 2 == 0 ? i + 1 : i - 1);
}

Pose mirror_pose(const Pose& pose, double image_width) {
    Pose out;
    for (int i = 0; i < kNumJoints; ++i) {
        const JointId src = static_cast<JointId>(i);
        const Joint& j = pose[src];
        if (!std::isfinite(j.x) || !std::isfinite(j.y))
            throw ValidationError("mirror_pose: non-finite coordinate");
        Joint& dst = out[mirror_joint(src)];
        dst.x = image_width - 1.0 - j.x;
        dst.y = j.y;
        dst.visible = j.visible;
    }
    return out;
}

const char* style_name(StyleLabel s) { return kStyleNames[static_cast<int>(s)]; }

StyleLabel style_from_name(const std::string& name) {
    for (int i = 0; i < kNumStyles; ++i)
        if (name == kStyleNames[i]) return static_cast<StyleLabel>(i);
    throw ValidationError("unknown style: " + name);
}

bool is_symmetric_style(StyleLabel s) {
    return s == StyleLabel::breaststroke || s == StyleLabel::butterfly;
}

std::array<double, kNumStyles> one_hot(StyleLabel s) {
    std::array<double, kNumStyles> v{};
    v[static_cast<int>(s)] = 1.0;
    return v;
}

const char* conditioning_mode_name(ConditioningMode m) {
    switch (m) {
        case ConditioningMode::none: return "none";
        case ConditioningMode::once: return "once";
        case ConditioningMode::repeated: return "repeated";
    }
    return "none";
}

ConditioningMode conditioning_mode_from_name(const std::string& name) {
    if (name == "none") return ConditioningMode::none;
    if (name == "once") return ConditioningMode::once;
    if (name == "repeated") return ConditioningMode::repeated;
    throw ValidationError("unknown conditioning mode: " + name);
}

void ModelConfig::validate() const {
    if (num_stages < 1) throw ValidationError("ModelConfig: num_stages must be >= 1");
    if (num_joints != kNumJoints) throw ValidationError("ModelConfig: num_joints must be 14");
    if (input_size <= 0 || heatmap_size <= 0)
        throw ValidationError("ModelConfig: sizes must be positive");
    if (input_size % heatmap_size != 0)
        throw ValidationError("ModelConfig: input_size must be divisible by heatmap_size");
    const int stride = input_size / heatmap_size;
    if (stride != 1 && stride != 2 && stride != 4 && stride != 8)
        throw ValidationError("ModelConfig: grid stride must be 1, 2, 4 or 8");
    if (gaussian_sigma <= 0.0) throw ValidationError("ModelConfig: gaussian_sigma must be > 0");
    if (channel_mult <= 0.0) throw ValidationError("ModelConfig: channel_mult must be > 0");
    if (first_conditioned_stage < 2)
        throw ValidationError("ModelConfig: conditioning never applies to stage 1");
}

Tensor concat_channels(const std::vector<const Tensor*>& parts) {
    int c = 0;
    const int h = parts.front()->height(), w = parts.front()->width();
    for (const Tensor* p : parts) {
        if (p->height() != h || p->width() != w)
            throw ValidationError("concat_channels: spatial shape mismatch");
        c += p->channels();
    }
    Tensor out(c, h, w);
    int at = 0;
    for (const Tensor* p : parts) {
        std::copy(p->data(), p->data() + p->size(), out.channel(at));
        at += p->channels();
    }
    return out;
}

Tensor slice_channels(const Tensor& t, int from, int count) {
    Tensor out(count, t.height(), t.width());
    std::copy(t.channel(from), t.channel(from) + out.size(), out.data());
    return out;
}

}  // namespace swimpose
