#pragma once

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

/// Separable Gaussian blur with reflect padding; the kernel is normalized to
/// sum 1, so constant fields pass through unchanged. `size` must be odd.
Field gaussian_smooth(const Field& f, int size, double sigma);

/// Exact transpose of `gaussian_smooth` for the same (size, sigma).
Array2d gaussian_smooth_adjoint(const Array2d& co, int size, double sigma);

/// Block-mean downsampling by factor k. Trailing partial blocks average over
/// the cells they actually contain. The pooled grid carries spacing k*spacing.
Field avg_pool(const Field& f, int k);

GridGeometry pooled_geometry(const GridGeometry& g, int k);

/// Exact transpose of `avg_pool`: broadcast each pooled co-value back over
/// its block, divided by the block's true cell count.
Array2d avg_pool_adjoint(const Array2d& co_pooled, const GridGeometry& fine, int k);

}  // namespace bedrecon
