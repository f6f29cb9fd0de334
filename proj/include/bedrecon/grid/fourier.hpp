#pragma once

#include <vector>

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

/// Low-frequency coordinate encodings: cell centers are normalized to [-1, 1]
/// per axis, and for each band l in [0, bands) the channels
/// sin(2^l pi x), cos(2^l pi x), sin(2^l pi y), cos(2^l pi y) are appended in
/// that order. Returns 4*bands grids.
std::vector<Field> fourier_coords(const GridGeometry& geom, int bands);

}  // namespace bedrecon
