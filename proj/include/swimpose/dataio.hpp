#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swimpose/core.hpp"

namespace swimpose {

// On-disk dataset layout, rooted at a directory:
//
//   manifest.json                      version, clip table, split map
//   clips/<clip_id>/frame_%04d.png     numbered 8-bit RGB frames, 1-based
//   clips/<clip_id>/annotations.jsonl  one record per frame:
//       {"frame_index": t, "joints": [[x, y, visible] x 14]}
//
// Joint order is JointId order. Every clip belongs to exactly one split
// ("train" or "test"); splitting happens on clip boundaries only.

/// Writes frames, annotations and manifest under dir (created if needed).
/// split must assign "train" or "test" to exactly the given clip ids.
void write_dataset(const std::string& dir, const std::vector<VideoClip>& clips,
                   const std::map<std::string, std::string>& split);

struct Dataset {
    std::vector<VideoClip> clips;
    std::map<std::string, std::string> split;  // clip_id -> "train" | "test"

    std::vector<VideoClip> train() const { return select("train"); }
    std::vector<VideoClip> test() const { return select("test"); }
    std::vector<VideoClip> select(const std::string& which) const;
};

/// Loads and fully validates a dataset. Errors name the offending clip:
/// duplicate ids, unknown styles, frame/annotation count mismatches,
/// malformed records, missing split entries. With load_frames=false the
/// clips carry annotations only (enough for evaluation).
Dataset load_dataset(const std::string& manifest_path, bool load_frames = true);

/// Holdout must name one existing clip of matching style for every style
/// present in clips. Returns (train, test); no clip appears in both.
std::pair<std::vector<VideoClip>, std::vector<VideoClip>> split_by_clip(
    const std::vector<VideoClip>& clips,
    const std::map<StyleLabel, std::string>& holdout);

/// Per-style train/test frame counts as a small text table.
std::string summary_table(const Dataset& ds);

}  // namespace swimpose
