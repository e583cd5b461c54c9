#pragma once

#include <cstdint>
#include <vector>

#include "swimpose/tensor.hpp"

namespace swimpose::kernels {

// Dense compute kernels behind every network layer. The functions in this
// namespace parallelize over independent output elements with OpenMP; the
// copies in kernels::serial are the plain-loop reference used by the tests
// and the benchmark. Both orders of accumulation are identical, so parallel
// and serial results match bitwise for the same inputs.

/// Same-padding stride-1 convolution. W layout: [out_c][in_c][k][k], b: [out_c].
/// out must be preallocated to [out_c, H, W].
void conv2d_forward(const Tensor& in, const std::vector<double>& W,
                    const std::vector<double>& b, int out_c, int k, Tensor& out);

/// Gradient w.r.t. the convolution input.
void conv2d_backward_input(const Tensor& d_out, const std::vector<double>& W,
                           int in_c, int k, Tensor& d_in);

/// Gradients w.r.t. weights and bias, accumulated (+=) into dW/db.
void conv2d_backward_params(const Tensor& d_out, const Tensor& in, int k,
                            std::vector<double>& dW, std::vector<double>& db);

/// In-place ReLU; mask receives 1/0 per element for the backward pass.
void relu_forward(Tensor& t, std::vector<uint8_t>& mask);
void relu_backward(Tensor& d, const std::vector<uint8_t>& mask);

/// 2x2 max pooling with stride 2. idx records the argmax flat offset per
/// output element (within the input channel plane) for the backward pass.
void maxpool2_forward(const Tensor& in, Tensor& out, std::vector<int>& idx);
void maxpool2_backward(const Tensor& d_out, const std::vector<int>& idx, Tensor& d_in);

/// Nearest-neighbor x2 upsampling.
void upsample2_forward(const Tensor& in, Tensor& out);
void upsample2_backward(const Tensor& d_out, Tensor& d_in);

namespace serial {
void conv2d_forward(const Tensor& in, const std::vector<double>& W,
                    const std::vector<double>& b, int out_c, int k, Tensor& out);
void conv2d_backward_input(const Tensor& d_out, const std::vector<double>& W,
                           int in_c, int k, Tensor& d_in);
void conv2d_backward_params(const Tensor& d_out, const Tensor& in, int k,
                            std::vector<double>& dW, std::vector<double>& db);
void relu_forward(Tensor& t, std::vector<uint8_t>& mask);
void relu_backward(Tensor& d, const std::vector<uint8_t>& mask);
void maxpool2_forward(const Tensor& in, Tensor& out, std::vector<int>& idx);
void maxpool2_backward(const Tensor& d_out, const std::vector<int>& idx, Tensor& d_in);
void upsample2_forward(const Tensor& in, Tensor& out);
void upsample2_backward(const Tensor& d_out, Tensor& d_in);
}  // namespace serial

}  // namespace swimpose::kernels
