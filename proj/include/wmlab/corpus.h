#pragma once

#include <cstdint>
#include <vector>

#include "wmlab/image.h"

namespace wmlab {

/// One procedural cover: smooth gradient, value-noise octaves, Gaussian
/// blobs and soft-edged shapes. Pixel values lie in [0.05, 0.95] on a 2^-16
/// grid, which leaves headroom for additive watermarks and keeps sums of
/// grid-aligned residuals exact.
RasterImage gen_cover(int size, std::uint64_t seed, std::uint64_t index);

/// n covers; cover i depends only on (seed, i, size).
std::vector<RasterImage> gen_corpus(std::size_t n, int size, std::uint64_t seed, unsigned threads = 1);

}  // namespace wmlab
