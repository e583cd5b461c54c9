#pragma once

#include <string>

#include "swimpose/core.hpp"

namespace swimpose {

/// 8-bit RGB PNG round-trip. Both throw ValidationError with the offending
/// path on I/O or decode failure; non-RGB inputs are expanded/truncated to
/// RGB by libpng transforms.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

}  // namespace swimpose
