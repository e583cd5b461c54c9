#include "swimpose/metrics.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace swimpose {

double torso_diameter(const Pose& gt) {
    const Joint& hip = gt[JointId::left_hip];
    const Joint& shoulder = gt[JointId::right_shoulder];
    return std::hypot(hip.x - shoulder.x, hip.y - shoulder.y);
}

PckResult pck(const Pose& pred, const Pose& gt, const PckConfig& cfg) {
    cfg.validate();
    PckResult r;
    const double torso = torso_diameter(gt);
    if (torso == 0.0) {
        r.valid = false;
        return r;
    }
    const double threshold = cfg.alpha * torso;
    for (int j = 0; j < kNumJoints; ++j) {
        const double d = std::hypot(pred.joints[j].x - gt.joints[j].x,
                                    pred.joints[j].y - gt.joints[j].y);
        r.correct[j] = d <= threshold;
    }
    return r;
}

namespace {

void check_coverage(const std::vector<ClipPredictions>& predictions,
                    const std::vector<VideoClip>& dataset) {
    std::unordered_map<std::string, const VideoClip*> clips;
    for (const auto& c : dataset) clips[c.clip_id] = &c;

    std::unordered_map<std::string, const ClipPredictions*> preds;
    for (const auto& p : predictions) {
        if (!clips.count(p.clip_id))
            throw ValidationError("evaluate: predictions name unknown clip '" + p.clip_id + "'");
        preds[p.clip_id] = &p;
    }

    // Frame count comes from the annotations so annotation-only clips
    // (no decoded images) evaluate the same way.
    std::vector<std::string> missing;
    for (const auto& c : dataset) {
        const auto it = preds.find(c.clip_id);
        const int have = it == preds.end() ? 0 : static_cast<int>(it->second->poses.size());
        const int T = static_cast<int>(c.annotations.size());
        if (have > T)
            throw ValidationError("evaluate: clip '" + c.clip_id + "' has " +
                                  std::to_string(have) + " predictions but only " +
                                  std::to_string(T) + " frames");
        for (int t = have + 1; t <= T; ++t)
            missing.push_back(c.clip_id + ":" + std::to_string(t));
    }
    if (!missing.empty()) {
        std::string msg = "evaluate: no prediction for " +
                          std::to_string(missing.size()) + " frame(s):";
        for (size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
        if (missing.size() > 10) msg += " ...";
        throw ValidationError(msg);
    }
}

}  // namespace

PckReport evaluate(const std::vector<ClipPredictions>& predictions,
                   const std::vector<VideoClip>& dataset, const PckConfig& cfg) {
    cfg.validate();
    check_coverage(predictions, dataset);

    std::unordered_map<std::string, const ClipPredictions*> preds;
    for (const auto& p : predictions) preds[p.clip_id] = &p;

    PckReport rep;
    for (const auto& clip : dataset) {
        const ClipPredictions& p = *preds.at(clip.clip_id);
        const int style = static_cast<int>(clip.style);
        for (int t = 1; t <= static_cast<int>(clip.annotations.size()); ++t) {
            const Pose& gt = clip.annotations[t - 1];
            const PckResult r = pck(p.poses[t - 1], gt, cfg);
            if (!r.valid) {
                ++rep.excluded_instances;
                continue;
            }
            ++rep.frames_evaluated;
            for (int j = 0; j < kNumJoints; ++j) {
                rep.cells[style][j].add(r.correct[j]);
                (gt.joints[j].visible ? rep.visible : rep.occluded).add(r.correct[j]);
            }
        }
    }

    PckCell all;
    for (int s = 0; s < kNumStyles; ++s) {
        PckCell row;
        for (int j = 0; j < kNumJoints; ++j) {
            rep.per_style_per_joint[s][j] = rep.cells[s][j].percent();
            row.merge(rep.cells[s][j]);
        }
        rep.per_style[s] = row.percent();
        all.merge(row);
    }
    for (int j = 0; j < kNumJoints; ++j) {
        PckCell col;
        for (int s = 0; s < kNumStyles; ++s) col.merge(rep.cells[s][j]);
        rep.per_joint[j] = col.percent();
    }
    rep.overall = all.percent();
    return rep;
}

std::vector<double> pck_curve(const std::vector<ClipPredictions>& predictions,
                              const std::vector<VideoClip>& dataset,
                              const std::vector<double>& alphas) {
    for (size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i] < alphas[i - 1])
            throw ValidationError("pck_curve: alphas must be sorted ascending");
    std::vector<double> scores;
    scores.reserve(alphas.size());
    for (double a : alphas) {
        PckConfig cfg;
        cfg.alpha = a;
        scores.push_back(evaluate(predictions, dataset, cfg).overall);
    }
    return scores;
}

nlohmann::ordered_json report_to_json(const PckReport& rep, const PckConfig& cfg) {
    nlohmann::ordered_json j;
    j["metric"] = "PCK";
    j["alpha"] = cfg.alpha;
    j["overall"] = rep.overall;
    j["frames_evaluated"] = rep.frames_evaluated;
    j["excluded_zero_torso"] = rep.excluded_instances;

    auto& styles = j["per_style"] = nlohmann::ordered_json::object();
    for (int s = 0; s < kNumStyles; ++s)
        styles[style_name(static_cast<StyleLabel>(s))] = rep.per_style[s];

    auto& joints = j["per_joint"] = nlohmann::ordered_json::object();
    for (int jj = 0; jj < kNumJoints; ++jj)
        joints[joint_name(static_cast<JointId>(jj))] = rep.per_joint[jj];

    auto& grid = j["per_style_per_joint"] = nlohmann::ordered_json::object();
    for (int s = 0; s < kNumStyles; ++s) {
        auto& row = grid[style_name(static_cast<StyleLabel>(s))] =
            nlohmann::ordered_json::object();
        for (int jj = 0; jj < kNumJoints; ++jj) {
            const auto& cell = rep.cells[s][jj];
            row[joint_name(static_cast<JointId>(jj))] = {
                {"percent", rep.per_style_per_joint[s][jj]},
                {"correct", cell.correct},
                {"total", cell.total}};
        }
    }

    j["by_visibility"] = {
        {"occluded", {{"percent", rep.occluded.percent()},
                      {"correct", rep.occluded.correct},
                      {"total", rep.occluded.total}}},
        {"visible", {{"percent", rep.visible.percent()},
                     {"correct", rep.visible.correct},
                     {"total", rep.visible.total}}}};
    return j;
}

namespace {

std::string fmt_pct(double v, int64_t total) {
    if (total == 0) return "   n/a";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%6.1f", v);
    return buf;
}

}  // namespace

std::string report_to_text(const PckReport& rep) {
    std::ostringstream out;
    out << "              ";
    for (int s = 0; s < kNumStyles; ++s) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%-13s", style_name(static_cast<StyleLabel>(s)));
        out << buf;
    }
    out << "combined\n";

    out << "PCK           ";
    for (int s = 0; s < kNumStyles; ++s) {
        PckCell row;
        for (int j = 0; j < kNumJoints; ++j) row.merge(rep.cells[s][j]);
        out << fmt_pct(rep.per_style[s], row.total) << "       ";
    }
    out << fmt_pct(rep.overall, rep.frames_evaluated) << "\n\n";

    out << "per joint\n";
    for (int j = 0; j < kNumJoints; ++j) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "  %-14s", joint_name(static_cast<JointId>(j)));
        out << buf;
        PckCell col;
        for (int s = 0; s < kNumStyles; ++s) col.merge(rep.cells[s][j]);
        out << fmt_pct(rep.per_joint[j], col.total) << "\n";
    }

    if (rep.occluded.total > 0 || rep.visible.total > 0) {
        out << "\nby visibility\n";
        out << "  occluded      " << fmt_pct(rep.occluded.percent(), rep.occluded.total)
            << "  (" << rep.occluded.total << " joints)\n";
        out << "  visible       " << fmt_pct(rep.visible.percent(), rep.visible.total)
            << "  (" << rep.visible.total << " joints)\n";
    }
    if (rep.excluded_instances > 0)
        out << "\nexcluded " << rep.excluded_instances << " zero-torso frame(s)\n";
    return out.str();
}

std::string curve_to_csv(const std::vector<double>& alphas,
                         const std::vector<double>& scores) {
    if (alphas.size() != scores.size())
        throw ValidationError("curve_to_csv: alphas and scores differ in length");
    std::ostringstream out;
    out << "alpha,pck\n";
    for (size_t i = 0; i < alphas.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g\n", alphas[i], scores[i]);
        out << buf;
    }
    return out.str();
}

}  // namespace swimpose
