#include "swimpose/dataio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swimpose/png_io.hpp"

namespace fs = std::filesystem;

namespace swimpose {

namespace {

constexpr int kManifestVersion = 1;

std::string frame_name(int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d.png", t);
    return buf;
}

void check_split_value(const std::string& clip_id, const std::string& value) {
    if (value != "train" && value != "test")
        throw ValidationError("dataset: clip '" + clip_id + "' has split '" + value +
                              "', expected 'train' or 'test'");
}

}  // namespace

void write_dataset(const std::string& dir, const std::vector<VideoClip>& clips,
                   const std::map<std::string, std::string>& split) {
    std::set<std::string> ids;
    for (const auto& clip : clips) {
        if (!ids.insert(clip.clip_id).second)
            throw ValidationError("dataset: duplicate clip id '" + clip.clip_id + "'");
        if (clip.annotations.size() != clip.frames.size())
            throw ValidationError("dataset: clip '" + clip.clip_id + "' has " +
                                  std::to_string(clip.frames.size()) + " frames but " +
                                  std::to_string(clip.annotations.size()) + " annotations");
        const auto it = split.find(clip.clip_id);
        if (it == split.end())
            throw ValidationError("dataset: no split assignment for clip '" +
                                  clip.clip_id + "'");
        check_split_value(clip.clip_id, it->second);
    }
    for (const auto& [id, value] : split)
        if (!ids.count(id))
            throw ValidationError("dataset: split names unknown clip '" + id + "'");

    const fs::path root(dir);
    fs::create_directories(root / "clips");

    nlohmann::ordered_json manifest;
    manifest["format_version"] = kManifestVersion;
    auto& clip_list = manifest["clips"] = nlohmann::ordered_json::array();

    for (const auto& clip : clips) {
        const fs::path clip_dir = root / "clips" / clip.clip_id;
        fs::create_directories(clip_dir);

        for (int t = 1; t <= clip.length(); ++t)
            write_png((clip_dir / frame_name(t)).string(), clip.frames[t - 1]);

        std::ofstream ann(clip_dir / "annotations.jsonl");
        if (!ann)
            throw ValidationError("dataset: cannot write annotations for clip '" +
                                  clip.clip_id + "'");
        for (int t = 1; t <= clip.length(); ++t) {
            nlohmann::ordered_json rec;
            rec["frame_index"] = t;
            auto& joints = rec["joints"] = nlohmann::ordered_json::array();
            for (const Joint& j : clip.annotations[t - 1].joints)
                joints.push_back({j.x, j.y, j.visible});
            ann << rec.dump() << "\n";
        }

        clip_list.push_back(
            {{"clip_id", clip.clip_id},
             {"style", style_name(clip.style)},
             {"frame_count", clip.length()},
             {"frame_pattern", "clips/" + clip.clip_id + "/frame_%04d.png"},
             {"annotations", "clips/" + clip.clip_id + "/annotations.jsonl"}});
    }

    auto& split_obj = manifest["split"] = nlohmann::ordered_json::object();
    for (const auto& clip : clips) split_obj[clip.clip_id] = split.at(clip.clip_id);

    std::ofstream out(root / "manifest.json");
    if (!out) throw ValidationError("dataset: cannot write manifest under '" + dir + "'");
    out << manifest.dump(2) << "\n";
}

namespace {

Pose parse_annotation_line(const std::string& line, const std::string& clip_id,
                           int expected_index) {
    nlohmann::json rec;
    try {
        rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("dataset: clip '" + clip_id + "' annotation row " +
                              std::to_string(expected_index) + " is not valid JSON: " +
                              e.what());
    }
    try {
        if (rec.at("frame_index").get<int>() != expected_index)
            throw ValidationError("dataset: clip '" + clip_id + "' annotation row " +
                                  std::to_string(expected_index) +
                                  " has frame_index " +
                                  rec.at("frame_index").dump());
        const auto& joints = rec.at("joints");
        if (joints.size() != kNumJoints)
            throw ValidationError("dataset: clip '" + clip_id + "' frame " +
                                  std::to_string(expected_index) + " lists " +
                                  std::to_string(joints.size()) + " joints, expected " +
                                  std::to_string(kNumJoints));
        Pose pose;
        for (int j = 0; j < kNumJoints; ++j) {
            const auto& entry = joints.at(j);
            if (entry.size() != 3)
                throw ValidationError("dataset: clip '" + clip_id + "' frame " +
                                      std::to_string(expected_index) + " joint " +
                                      std::to_string(j) + " is not [x, y, visible]");
            pose.joints[j] = {entry.at(0).get<double>(), entry.at(1).get<double>(),
                              entry.at(2).get<bool>()};
        }
        return pose;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("dataset: clip '" + clip_id + "' frame " +
                              std::to_string(expected_index) + ": " + e.what());
    }
}

}  // namespace

Dataset load_dataset(const std::string& manifest_path, bool load_frames) {
    std::ifstream in(manifest_path);
    if (!in) throw ValidationError("dataset: cannot open manifest '" + manifest_path + "'");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("dataset: manifest '" + manifest_path +
                              "' is not valid JSON: " + e.what());
    }

    const int version = manifest.value("format_version", -1);
    if (version != kManifestVersion)
        throw ValidationError("dataset: unsupported manifest format_version " +
                              std::to_string(version));

    const fs::path root = fs::path(manifest_path).parent_path();
    Dataset ds;
    std::set<std::string> ids;

    try {
        for (const auto& entry : manifest.at("clips")) {
            VideoClip clip;
            clip.clip_id = entry.at("clip_id").get<std::string>();
            if (!ids.insert(clip.clip_id).second)
                throw ValidationError("dataset: duplicate clip id '" + clip.clip_id + "'");
            clip.style = style_from_name(entry.at("style").get<std::string>());
            const int frame_count = entry.at("frame_count").get<int>();
            const std::string pattern = entry.at("frame_pattern").get<std::string>();
            const std::string ann_rel = entry.at("annotations").get<std::string>();

            const fs::path ann_path = root / ann_rel;
            std::ifstream ann(ann_path);
            if (!ann)
                throw ValidationError("dataset: clip '" + clip.clip_id +
                                      "' is missing annotations at '" +
                                      ann_path.string() + "'");
            std::string line;
            while (std::getline(ann, line)) {
                if (line.empty()) continue;
                clip.annotations.push_back(parse_annotation_line(
                    line, clip.clip_id, static_cast<int>(clip.annotations.size()) + 1));
            }
            if (static_cast<int>(clip.annotations.size()) != frame_count)
                throw ValidationError(
                    "dataset: clip '" + clip.clip_id + "' declares " +
                    std::to_string(frame_count) + " frames but has " +
                    std::to_string(clip.annotations.size()) + " annotation rows");

            if (load_frames) {
                clip.frames.reserve(frame_count);
                for (int t = 1; t <= frame_count; ++t) {
                    char rel[512];
                    std::snprintf(rel, sizeof(rel), pattern.c_str(), t);
                    clip.frames.push_back(read_png((root / rel).string()));
                }
            }
            ds.clips.push_back(std::move(clip));
        }

        for (const auto& [id, value] : manifest.at("split").items()) {
            if (!ids.count(id))
                throw ValidationError("dataset: split names unknown clip '" + id + "'");
            check_split_value(id, value.get<std::string>());
            ds.split[id] = value.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("dataset: malformed manifest '" + manifest_path +
                              "': " + e.what());
    }

    for (const auto& clip : ds.clips)
        if (!ds.split.count(clip.clip_id))
            throw ValidationError("dataset: no split assignment for clip '" +
                                  clip.clip_id + "'");
    return ds;
}

std::vector<VideoClip> Dataset::select(const std::string& which) const {
    if (which != "train" && which != "test")
        throw ValidationError("dataset: unknown split '" + which + "'");
    std::vector<VideoClip> out;
    for (const auto& clip : clips)
        if (split.at(clip.clip_id) == which) out.push_back(clip);
    return out;
}

std::pair<std::vector<VideoClip>, std::vector<VideoClip>> split_by_clip(
    const std::vector<VideoClip>& clips,
    const std::map<StyleLabel, std::string>& holdout) {
    std::set<StyleLabel> styles;
    for (const auto& clip : clips) styles.insert(clip.style);
    for (StyleLabel s : styles)
        if (!holdout.count(s))
            throw ValidationError(std::string("split: no holdout clip for style '") +
                                  style_name(s) + "'");

    std::set<std::string> held;
    for (const auto& [style, id] : holdout) {
        bool found = false;
        for (const auto& clip : clips)
            if (clip.clip_id == id) {
                if (clip.style != style)
                    throw ValidationError("split: clip '" + id + "' has style '" +
                                          style_name(clip.style) + "', not '" +
                                          style_name(style) + "'");
                found = true;
                break;
            }
        if (!found) throw ValidationError("split: holdout names unknown clip '" + id + "'");
        held.insert(id);
    }

    std::pair<std::vector<VideoClip>, std::vector<VideoClip>> out;
    for (const auto& clip : clips)
        (held.count(clip.clip_id) ? out.second : out.first).push_back(clip);
    return out;
}

std::string summary_table(const Dataset& ds) {
    std::array<int64_t, kNumStyles> train{}, test{};
    for (const auto& clip : ds.clips) {
        const int64_t n = static_cast<int64_t>(clip.annotations.size());
        (ds.split.at(clip.clip_id) == "train" ? train : test)[static_cast<int>(clip.style)] += n;
    }

    std::ostringstream out;
    out << "frames        ";
    for (int s = 0; s < kNumStyles; ++s) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%-13s", style_name(static_cast<StyleLabel>(s)));
        out << buf;
    }
    out << "total\n";
    const auto row = [&](const char* label, const std::array<int64_t, kNumStyles>& counts) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%-14s", label);
        out << buf;
        int64_t total = 0;
        for (int s = 0; s < kNumStyles; ++s) {
            std::snprintf(buf, sizeof(buf), "%-13lld", static_cast<long long>(counts[s]));
            out << buf;
            total += counts[s];
        }
        out << total << "\n";
    };
    row("train", train);
    row("test", test);
    return out.str();
}

}  // namespace swimpose
