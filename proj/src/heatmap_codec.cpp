#include "swimpose/heatmap_codec.hpp"

#include <algorithm>
#include <cmath>

namespace swimpose {

HeatmapStack render_target(const Pose& pose, const ModelConfig& config) {
    const int n = config.heatmap_size;
    const double stride = config.grid_stride();
    const double sigma = config.gaussian_sigma;
    HeatmapStack out(n, n, stride);
    for (int j = 0; j < kNumJoints; ++j) {
        const Joint& joint = pose.joints[j];
        const double px = std::clamp(joint.x, 0.0, config.input_size - 1.0);
        const double py = std::clamp(joint.y, 0.0, config.input_size - 1.0);
        const double cx = pixel_to_cell(px, stride);
        const double cy = pixel_to_cell(py, stride);
        double* plane = out.data.channel(j);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                plane[static_cast<size_t>(y) * n + x] = std::exp(-d2 / (2.0 * sigma * sigma));
            }
    }
    return out;
}

DecodedPose decode_pose(const HeatmapStack& heatmaps) {
    const int h = heatmaps.data.height(), w = heatmaps.data.width();
    const double stride = heatmaps.grid_stride;
    DecodedPose out;
    for (int j = 0; j < kNumJoints; ++j) {
        const double* plane = heatmaps.data.channel(j);
        int best = 0;
        for (int i = 1; i < h * w; ++i)
            if (plane[i] > plane[best]) best = i;
        out.pose.joints[j].x = cell_to_pixel(best % w, stride);
        out.pose.joints[j].y = cell_to_pixel(best / w, stride);
        out.pose.joints[j].visible = true;
        out.peak_confidence[j] = plane[best];
    }
    return out;
}

}  // namespace swimpose
