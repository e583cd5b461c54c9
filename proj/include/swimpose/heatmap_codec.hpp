#pragma once

#include <array>

#include "swimpose/core.hpp"

namespace swimpose {

/// Pose decoded from a heatmap stack plus the confidence at each decoded cell.
struct DecodedPose {
    Pose pose;
    std::array<double, kNumJoints> peak_confidence{};
};

/// Render the training target for a pose: per joint an unnormalized isotropic
/// Gaussian with peak 1.0 at the joint's continuous heatmap-cell position and
/// standard deviation config.gaussian_sigma cells. Out-of-bounds coordinates
/// are clamped to the image first.
HeatmapStack render_target(const Pose& pose, const ModelConfig& config);

/// Per-joint argmax decoding. Ties break to the lowest row-major cell index;
/// the winning cell maps back to image pixels at its center.
DecodedPose decode_pose(const HeatmapStack& heatmaps);

/// Image pixel coordinate of the center of heatmap cell index c.
inline double cell_to_pixel(double cell, double stride) {
    return (cell + 0.5) * stride - 0.5;
}

/// Continuous heatmap-cell coordinate of an image pixel position.
inline double pixel_to_cell(double pixel, double stride) {
    return (pixel + 0.5) / stride - 0.5;
}

}  // namespace swimpose
