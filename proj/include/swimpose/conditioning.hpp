#pragma once

#include "swimpose/core.hpp"
#include "swimpose/tensor.hpp"

namespace swimpose {

/// Spatially constant one-hot activity encoding: one channel per style, the
/// active style's channel all ones, the rest all zeros.
struct ClassLabelMaps {
    Tensor data;  // [kNumStyles, h, w]
    StyleLabel style = StyleLabel::backstroke;
};

ClassLabelMaps make_label_maps(StyleLabel style, int h, int w);

/// Concatenate the label channels to a feature tensor when this convolution
/// is selected by the mode: in `once` mode only the first convolution of a
/// conditioned stage (conv_index 0) receives them, in `repeated` mode every
/// convolution does. Returns the features unchanged otherwise.
/// Stage 1 always operates on local image content; injecting there is a
/// configuration error.
Tensor inject(const Tensor& features, const ClassLabelMaps& maps,
              ConditioningMode mode, int stage, int conv_index);

/// True when (mode, conv_index) selects this convolution for label input.
bool conv_is_conditioned(ConditioningMode mode, int conv_index);

}  // namespace swimpose
