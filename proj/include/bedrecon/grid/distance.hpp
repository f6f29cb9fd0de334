#pragma once

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

/// Exact Euclidean distance in pixels from every cell to the nearest true
/// cell of the mask (lower-envelope-of-parabolas transform, not a chamfer
/// approximation). Throws EmptyObservationsError on an all-false mask.
Field distance_transform(const Mask& mask);

}  // namespace bedrecon
