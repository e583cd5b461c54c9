#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "swimpose/core.hpp"

namespace swimpose {

/// PCK@alpha: a joint is correct when its distance to ground truth does not
/// exceed alpha times the torso diameter, measured between the left hip and
/// the right shoulder of the ground-truth pose.
struct PckConfig {
    double alpha = 0.2;

    void validate() const {
        if (!(alpha > 0.0)) throw ValidationError("pck: alpha must be > 0");
    }
};

/// Ground-truth torso diameter: ||left_hip - right_shoulder||.
double torso_diameter(const Pose& gt);

struct PckResult {
    std::array<bool, kNumJoints> correct{};
    /// False when the ground-truth torso diameter is zero; such an instance
    /// is excluded from aggregation and counted, never scored.
    bool valid = true;
};

/// Comparison is inclusive: distance == threshold counts as correct.
PckResult pck(const Pose& pred, const Pose& gt, const PckConfig& cfg);

/// One aggregation cell: correct / evaluated joint instances.
struct PckCell {
    int64_t correct = 0;
    int64_t total = 0;

    double percent() const { return total == 0 ? 0.0 : 100.0 * correct / total; }
    void add(bool ok) {
        correct += ok ? 1 : 0;
        ++total;
    }
    void merge(const PckCell& o) {
        correct += o.correct;
        total += o.total;
    }
};

struct PckReport {
    double overall = 0.0;  // joint-count-weighted over all evaluated instances
    std::array<double, kNumJoints> per_joint{};
    std::array<double, kNumStyles> per_style{};
    std::array<std::array<double, kNumJoints>, kNumStyles> per_style_per_joint{};
    std::array<std::array<PckCell, kNumJoints>, kNumStyles> cells{};

    // Occlusion-stratified extras keyed by the ground-truth visibility flag.
    PckCell occluded;
    PckCell visible;

    int64_t frames_evaluated = 0;
    int64_t excluded_instances = 0;  // zero-torso frames, flagged not scored
};

/// Predicted poses for one clip; poses[i] belongs to frame i+1.
struct ClipPredictions {
    std::string clip_id;
    std::vector<Pose> poses;
};

/// Throws when any test frame lacks a prediction (the message lists the
/// absent frames) or when predictions name an unknown clip.
PckReport evaluate(const std::vector<ClipPredictions>& predictions,
                   const std::vector<VideoClip>& dataset, const PckConfig& cfg);

/// Overall score per alpha; alphas must be sorted ascending. The result is
/// monotone non-decreasing.
std::vector<double> pck_curve(const std::vector<ClipPredictions>& predictions,
                              const std::vector<VideoClip>& dataset,
                              const std::vector<double>& alphas);

nlohmann::ordered_json report_to_json(const PckReport& report, const PckConfig& cfg);
/// Plain-text table: one row of per-style scores plus the combined column,
/// then a per-joint breakdown.
std::string report_to_text(const PckReport& report);
std::string curve_to_csv(const std::vector<double>& alphas,
                         const std::vector<double>& scores);

}  // namespace swimpose
