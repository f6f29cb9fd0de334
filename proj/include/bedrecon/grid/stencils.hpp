#pragma once

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

/// Finite-difference gradient in field-units per meter: central differences
/// on interior cells, one-sided at the grid edges.
VectorField gradient(const Field& f);

/// Exact transpose of `gradient` as a linear map: co-fields with respect to
/// (gx, gy) back to a co-field with respect to f.
Array2d gradient_adjoint(const GridGeometry& geom, const Array2d& co_gx, const Array2d& co_gy);

/// dFx/dx + dFy/dy with the same stencil as `gradient`.
Field divergence(const VectorField& f);

/// Exact transpose of `divergence`.
std::pair<Array2d, Array2d> divergence_adjoint(const GridGeometry& geom, const Array2d& co_div);

/// 3x3 high-pass kernel [[0,-1,0],[-1,4,-1],[0,-1,0]] with reflect padding.
/// Output carries kernel units (no spacing normalization).
Field laplacian(const Field& f);

/// Exact transpose of `laplacian` including the reflected boundary taps.
Array2d laplacian_adjoint(const GridGeometry& geom, const Array2d& co_out);

}  // namespace bedrecon
