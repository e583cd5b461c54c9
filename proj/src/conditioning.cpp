#include "swimpose/conditioning.hpp"

namespace swimpose {

ClassLabelMaps make_label_maps(StyleLabel style, int h, int w) {
    if (h < 1 || w < 1) throw ValidationError("make_label_maps: size must be >= 1");
    ClassLabelMaps maps;
    maps.style = style;
    maps.data = Tensor(kNumStyles, h, w);
    double* active = maps.data.channel(static_cast<int>(style));
    std::fill(active, active + static_cast<size_t>(h) * w, 1.0);
    return maps;
}

bool conv_is_conditioned(ConditioningMode mode, int conv_index) {
    switch (mode) {
        case ConditioningMode::none: return false;
        case ConditioningMode::once: return conv_index == 0;
        case ConditioningMode::repeated: return true;
    }
    return false;
}

Tensor inject(const Tensor& features, const ClassLabelMaps& maps,
              ConditioningMode mode, int stage, int conv_index) {
    if (!conv_is_conditioned(mode, conv_index)) return features;
    if (stage < 2)
        throw ValidationError("inject: class label maps never feed stage 1");
    if (maps.data.height() != features.height() || maps.data.width() != features.width())
        throw ValidationError("inject: label map size does not match features");
    return concat_channels({&features, &maps.data});
}

}  // namespace swimpose
