#pragma once

#include "bedrecon/data/scene.hpp"
#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

struct SplatResult {
    Field bed;  // weighted-mean bed where mask is true, 0 elsewhere
    Mask mask;
};

/// Distributes each pick to its K nearest cell centers with Gaussian weights
/// exp(-(d/r)^2); cells accumulate weighted values and weights, and the final
/// value is the weighted mean. radius_px is in pixels (scaled by spacing).
SplatResult splat_picks(const RadarPicks& picks, const GridGeometry& geom, int k_cells,
                        double radius_px);

/// c = exp(-d/tau), with d and tau in pixels.
Field confidence_map(const Field& d_rad, double tau_px);

// Gridded radar observations: splat mask, splatted thickness, pixel distance
// to the nearest mask cell, and the confidence decay of that distance.
struct ObservationLayer {
    Mask mask;
    Field h_rad;  // thickness at mask cells [m]; 0 off-mask
    Field d_rad;  // pixels
    Field c;      // in [0, 1]
    double tau_px = 12.0;

    static ObservationLayer empty(const GridGeometry& geom, double tau_px);
};

struct ObservationParams {
    int splat_k = 9;
    double splat_radius_px = 2.5;
    double tau_px = 12.0;
};

/// Splats picks onto the surface grid and derives thickness as s minus the
/// splatted bed. Throws EmptyObservationsError when there are no picks.
ObservationLayer build_observation_layer(const RadarPicks& picks, const Field& surface,
                                         const ObservationParams& params);

struct NormStats {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Robust normalization statistics of the radar thickness residuals
/// h_rad - h_p over mask cells inside `region`: mu is the median and sigma is
/// 1.4826*MAD floored at sigma_floor.
NormStats residual_norm_stats(const ObservationLayer& obs, const Scene& scene, const Mask& region,
                              double sigma_floor = 1.0);

}  // namespace bedrecon
