#pragma once

#include <string>

#include "wmlab/image.h"

namespace wmlab {

/// Reads an 8-bit (or 16-bit, downscaled) RGB or grey PNG. Images with an
/// alpha channel are rejected.
RasterImage read_png(const std::string& path);

/// Writes 8-bit RGB; values are rounded to the nearest of 256 levels.
void write_png(const std::string& path, const RasterImage& img);

/// Writes a single plane as 8-bit grey after min-max normalisation.
void write_png_plane(const std::string& path, const Plane& plane);

}  // namespace wmlab
