#include "swimpose/kernels.hpp"

#include <algorithm>
#include <cassert>

// Each kernel appears twice: the OpenMP version parallelizes over output
// elements, the serial version runs the same loops without the pragma.
// Per-element accumulation order is identical in both, so results agree
// bitwise and are independent of the thread count.

namespace swimpose::kernels {

namespace {

inline double conv_acc(const Tensor& in, const double* Wc, int in_c, int k,
                       int pad, int y, int x) {
    const int h = in.height(), w = in.width();
    double acc = 0.0;
    for (int ci = 0; ci < in_c; ++ci) {
        const double* plane = in.channel(ci);
        const double* Wk = Wc + static_cast<size_t>(ci) * k * k;
        for (int ky = 0; ky < k; ++ky) {
            const int iy = y + ky - pad;
            if (iy < 0 || iy >= h) continue;
            const double* row = plane + static_cast<size_t>(iy) * w;
            const double* Wrow = Wk + static_cast<size_t>(ky) * k;
            for (int kx = 0; kx < k; ++kx) {
                const int ix = x + kx - pad;
                if (ix < 0 || ix >= w) continue;
                acc += Wrow[kx] * row[ix];
            }
        }
    }
    return acc;
}

inline double conv_input_grad(const Tensor& d_out, const std::vector<double>& W,
                              int in_c, int k, int pad, int ci, int iy, int ix) {
    const int out_c = d_out.channels(), h = d_out.height(), w = d_out.width();
    double acc = 0.0;
    for (int co = 0; co < out_c; ++co) {
        const double* dplane = d_out.channel(co);
        const double* Wk = W.data() + (static_cast<size_t>(co) * in_c + ci) * k * k;
        for (int ky = 0; ky < k; ++ky) {
            const int oy = iy - ky + pad;
            if (oy < 0 || oy >= h) continue;
            for (int kx = 0; kx < k; ++kx) {
                const int ox = ix - kx + pad;
                if (ox < 0 || ox >= w) continue;
                acc += Wk[ky * k + kx] * dplane[static_cast<size_t>(oy) * w + ox];
            }
        }
    }
    return acc;
}

inline double conv_weight_grad(const Tensor& d_out, const Tensor& in, int k,
                               int pad, int co, int ci, int ky, int kx) {
    const int h = d_out.height(), w = d_out.width();
    const double* dplane = d_out.channel(co);
    const double* plane = in.channel(ci);
    double acc = 0.0;
    for (int y = 0; y < h; ++y) {
        const int iy = y + ky - pad;
        if (iy < 0 || iy >= h) continue;
        for (int x = 0; x < w; ++x) {
            const int ix = x + kx - pad;
            if (ix < 0 || ix >= w) continue;
            acc += dplane[static_cast<size_t>(y) * w + x] *
                   plane[static_cast<size_t>(iy) * w + ix];
        }
    }
    return acc;
}

}  // namespace

void conv2d_forward(const Tensor& in, const std::vector<double>& W,
                    const std::vector<double>& b, int out_c, int k, Tensor& out) {
    assert(out.channels() == out_c && out.height() == in.height() && out.width() == in.width());
    const int in_c = in.channels(), h = in.height(), w = in.width(), pad = k / 2;
#pragma omp parallel for
    for (int co = 0; co < out_c; ++co) {
        const double* Wc = W.data() + static_cast<size_t>(co) * in_c * k * k;
        double* oplane = out.channel(co);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                oplane[static_cast<size_t>(y) * w + x] = b[co] + conv_acc(in, Wc, in_c, k, pad, y, x);
    }
}

void conv2d_backward_input(const Tensor& d_out, const std::vector<double>& W,
                           int in_c, int k, Tensor& d_in) {
    const int h = d_out.height(), w = d_out.width(), pad = k / 2;
#pragma omp parallel for
    for (int ci = 0; ci < in_c; ++ci) {
        double* dplane = d_in.channel(ci);
        for (int iy = 0; iy < h; ++iy)
            for (int ix = 0; ix < w; ++ix)
                dplane[static_cast<size_t>(iy) * w + ix] =
                    conv_input_grad(d_out, W, in_c, k, pad, ci, iy, ix);
    }
}

void conv2d_backward_params(const Tensor& d_out, const Tensor& in, int k,
                            std::vector<double>& dW, std::vector<double>& db) {
    const int out_c = d_out.channels(), in_c = in.channels(), pad = k / 2;
    const int hw = d_out.height() * d_out.width();
#pragma omp parallel for
    for (int co = 0; co < out_c; ++co) {
        for (int ci = 0; ci < in_c; ++ci)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                    dW[((static_cast<size_t>(co) * in_c + ci) * k + ky) * k + kx] +=
                        conv_weight_grad(d_out, in, k, pad, co, ci, ky, kx);
        const double* dplane = d_out.channel(co);
        double acc = 0.0;
        for (int i = 0; i < hw; ++i) acc += dplane[i];
        db[co] += acc;
    }
}

void relu_forward(Tensor& t, std::vector<uint8_t>& mask) {
    const size_t n = t.size();
    mask.resize(n);
    double* v = t.data();
#pragma omp parallel for
    for (long i = 0; i < static_cast<long>(n); ++i) {
        mask[i] = v[i] > 0.0 ? 1 : 0;
        if (!mask[i]) v[i] = 0.0;
    }
}

void relu_backward(Tensor& d, const std::vector<uint8_t>& mask) {
    double* v = d.data();
#pragma omp parallel for
    for (long i = 0; i < static_cast<long>(d.size()); ++i)
        if (!mask[i]) v[i] = 0.0;
}

void maxpool2_forward(const Tensor& in, Tensor& out, std::vector<int>& idx) {
    const int c = in.channels(), oh = in.height() / 2, ow = in.width() / 2, w = in.width();
    idx.resize(static_cast<size_t>(c) * oh * ow);
#pragma omp parallel for
    for (int ci = 0; ci < c; ++ci) {
        const double* plane = in.channel(ci);
        double* oplane = out.channel(ci);
        int* ip = idx.data() + static_cast<size_t>(ci) * oh * ow;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                int best = (2 * y) * w + 2 * x;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int cand = (2 * y + dy) * w + 2 * x + dx;
                        if (plane[cand] > plane[best]) best = cand;
                    }
                oplane[static_cast<size_t>(y) * ow + x] = plane[best];
                ip[static_cast<size_t>(y) * ow + x] = best;
            }
        }
    }
}

void maxpool2_backward(const Tensor& d_out, const std::vector<int>& idx, Tensor& d_in) {
    const int c = d_out.channels(), oh = d_out.height(), ow = d_out.width();
    d_in.fill(0.0);
#pragma omp parallel for
    for (int ci = 0; ci < c; ++ci) {
        const double* dplane = d_out.channel(ci);
        double* gplane = d_in.channel(ci);
        const int* ip = idx.data() + static_cast<size_t>(ci) * oh * ow;
        for (int i = 0; i < oh * ow; ++i) gplane[ip[i]] += dplane[i];
    }
}

void upsample2_forward(const Tensor& in, Tensor& out) {
    const int c = in.channels(), h = in.height(), w = in.width();
#pragma omp parallel for
    for (int ci = 0; ci < c; ++ci) {
        const double* plane = in.channel(ci);
        double* oplane = out.channel(ci);
        for (int y = 0; y < 2 * h; ++y)
            for (int x = 0; x < 2 * w; ++x)
                oplane[static_cast<size_t>(y) * 2 * w + x] =
                    plane[static_cast<size_t>(y / 2) * w + x / 2];
    }
}

void upsample2_backward(const Tensor& d_out, Tensor& d_in) {
    const int c = d_in.channels(), h = d_in.height(), w = d_in.width();
#pragma omp parallel for
    for (int ci = 0; ci < c; ++ci) {
        const double* dplane = d_out.channel(ci);
        double* gplane = d_in.channel(ci);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        acc += dplane[static_cast<size_t>(2 * y + dy) * 2 * w + 2 * x + dx];
                gplane[static_cast<size_t>(y) * w + x] = acc;
            }
    }
}

namespace serial {

void conv2d_forward(const Tensor& in, const std::vector<double>& W,
                    const std::vector<double>& b, int out_c, int k, Tensor& out) {
    const int in_c = in.channels(), h = in.height(), w = in.width(), pad = k / 2;
    for (int co = 0; co < out_c; ++co) {
        const double* Wc = W.data() + static_cast<size_t>(co) * in_c * k * k;
        double* oplane = out.channel(co);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                oplane[static_cast<size_t>(y) * w + x] = b[co] + conv_acc(in, Wc, in_c, k, pad, y, x);
    }
}

void conv2d_backward_input(const Tensor& d_out, const std::vector<double>& W,
                           int in_c, int k, Tensor& d_in) {
    const int h = d_out.height(), w = d_out.width(), pad = k / 2;
    for (int ci = 0; ci < in_c; ++ci) {
        double* dplane = d_in.channel(ci);
        for (int iy = 0; iy < h; ++iy)
            for (int ix = 0; ix < w; ++ix)
                dplane[static_cast<size_t>(iy) * w + ix] =
                    conv_input_grad(d_out, W, in_c, k, pad, ci, iy, ix);
    }
}

void conv2d_backward_params(const Tensor& d_out, const Tensor& in, int k,
                            std::vector<double>& dW, std::vector<double>& db) {
    const int out_c = d_out.channels(), in_c = in.channels(), pad = k / 2;
    const int hw = d_out.height() * d_out.width();
    for (int co = 0; co < out_c; ++co) {
        for (int ci = 0; ci < in_c; ++ci)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                    dW[((static_cast<size_t>(co) * in_c + ci) * k + ky) * k + kx] +=
                        conv_weight_grad(d_out, in, k, pad, co, ci, ky, kx);
        const double* dplane = d_out.channel(co);
        double acc = 0.0;
        for (int i = 0; i < hw; ++i) acc += dplane[i];
        db[co] += acc;
    }
}

void relu_forward(Tensor& t, std::vector<uint8_t>& mask) {
    const size_t n = t.size();
    mask.resize(n);
    double* v = t.data();
    for (size_t i = 0; i < n; ++i) {
        mask[i] = v[i] > 0.0 ? 1 : 0;
        if (!mask[i]) v[i] = 0.0;
    }
}

void relu_backward(Tensor& d, const std::vector<uint8_t>& mask) {
    double* v = d.data();
    for (size_t i = 0; i < d.size(); ++i)
        if (!mask[i]) v[i] = 0.0;
}

void maxpool2_forward(const Tensor& in, Tensor& out, std::vector<int>& idx) {
    const int c = in.channels(), oh = in.height() / 2, ow = in.width() / 2, w = in.width();
    idx.resize(static_cast<size_t>(c) * oh * ow);
    for (int ci = 0; ci < c; ++ci) {
        const double* plane = in.channel(ci);
        double* oplane = out.channel(ci);
        int* ip = idx.data() + static_cast<size_t>(ci) * oh * ow;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                int best = (2 * y) * w + 2 * x;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int cand = (2 * y + dy) * w + 2 * x + dx;
                        if (plane[cand] > plane[best]) best = cand;
                    }
                oplane[static_cast<size_t>(y) * ow + x] = plane[best];
                ip[static_cast<size_t>(y) * ow + x] = best;
            }
        }
    }
}

void maxpool2_backward(const Tensor& d_out, const std::vector<int>& idx, Tensor& d_in) {
    const int c = d_out.channels(), oh = d_out.height(), ow = d_out.width();
    d_in.fill(0.0);
    for (int ci = 0; ci < c; ++ci) {
        const double* dplane = d_out.channel(ci);
        double* gplane = d_in.channel(ci);
        const int* ip = idx.data() + static_cast<size_t>(ci) * oh * ow;
        for (int i = 0; i < oh * ow; ++i) gplane[ip[i]] += dplane[i];
    }
}

void upsample2_forward(const Tensor& in, Tensor& out) {
    const int c = in.channels(), h = in.height(), w = in.width();
    for (int ci = 0; ci < c; ++ci) {
        const double* plane = in.channel(ci);
        double* oplane = out.channel(ci);
        for (int y = 0; y < 2 * h; ++y)
            for (int x = 0; x < 2 * w; ++x)
                oplane[static_cast<size_t>(y) * 2 * w + x] =
                    plane[static_cast<size_t>(y / 2) * w + x / 2];
    }
}

void upsample2_backward(const Tensor& d_out, Tensor& d_in) {
    const int c = d_in.channels(), h = d_in.height(), w = d_in.width();
    for (int ci = 0; ci < c; ++ci) {
        const double* dplane = d_out.channel(ci);
        double* gplane = d_in.channel(ci);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        acc += dplane[static_cast<size_t>(2 * y + dy) * 2 * w + 2 * x + dx];
                gplane[static_cast<size_t>(y) * w + x] = acc;
            }
    }
}

}  // namespace serial

}  // namespace swimpose::kernels
