#pragma once

#include "bedrecon/data/scene.hpp"

namespace bedrecon {

/// Inverse-distance-weighted interpolation onto cell centers with a k-nearest
/// moving neighborhood and power p. A pick within half a cell of the center
/// is returned verbatim (exact hit).
Field idw_interpolate(const RadarPicks& picks, const GridGeometry& geom, int k, double power);

}  // namespace bedrecon
