#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace swimpose {

/// Dense row-major [channels, height, width] tensor of doubles.
/// The single value container used for images, feature maps and heatmaps.
class Tensor {
public:
    Tensor() = default;
    Tensor(int c, int h, int w, double fill = 0.0)
        : c_(c), h_(h), w_(w), v_(static_cast<size_t>(c) * h * w, fill) {}

    int channels() const { return c_; }
    int height() const { return h_; }
    int width() const { return w_; }
    size_t size() const { return v_.size(); }

    double& at(int c, int y, int x) {
        assert(c >= 0 && c < c_ && y >= 0 && y < h_ && x >= 0 && x < w_);
        return v_[(static_cast<size_t>(c) * h_ + y) * w_ + x];
    }
    double at(int c, int y, int x) const {
        assert(c >= 0 && c < c_ && y >= 0 && y < h_ && x >= 0 && x < w_);
        return v_[(static_cast<size_t>(c) * h_ + y) * w_ + x];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    double* channel(int c) { return v_.data() + static_cast<size_t>(c) * h_ * w_; }
    const double* channel(int c) const { return v_.data() + static_cast<size_t>(c) * h_ * w_; }

    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

    bool same_shape(const Tensor& o) const {
        return c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.c_ == b.c_ && a.h_ == b.h_ && a.w_ == b.w_ && a.v_ == b.v_;
    }

private:
    int c_ = 0, h_ = 0, w_ = 0;
    std::vector<double> v_;
};

/// Concatenate tensors along the channel axis. All inputs must share H and W.
Tensor concat_channels(const std::vector<const Tensor*>& parts);

/// Copy of channels [from, from+count).
Tensor slice_channels(const Tensor& t, int from, int count);

}  // namespace swimpose
