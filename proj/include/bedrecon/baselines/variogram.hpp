#pragma once

#include <vector>

#include "bedrecon/data/scene.hpp"

namespace bedrecon {

// Exponential semivariogram gamma(d) = nugget + sill*(1 - exp(-d/range)) for
// d > 0, with gamma(0) = 0 by convention. The covariance counterpart treats
// sill + nugget as the full variance at zero lag.
struct VariogramModel {
    double nugget = 0.0;
    double sill = 1.0;
    double range = 1.0;
    bool degenerate = false;

    double gamma(double d) const;
    double cov(double d) const { return sill + nugget - gamma(d); }
};

struct VariogramPoint {
    double lag = 0.0;     // mean pair distance in the bin
    double gamma = 0.0;   // robust semivariance estimate
    long pairs = 0;
};

/// Robust (Cressie-Hawkins) empirical semivariogram over uniform lag bins up
/// to max_lag; bins without pairs are omitted. Pick values carry the residual.
std::vector<VariogramPoint> empirical_variogram(const RadarPicks& residuals, int bins,
                                                double max_lag);

/// Weighted-least-squares objective sum N_h*(gamma_hat - gamma)^2 / gamma^2.
double variogram_wls(const VariogramModel& model, const std::vector<VariogramPoint>& points);

/// Coordinate-descent fit from one starting point (exposed for fit tests).
VariogramModel fit_variogram_from(const VariogramModel& start,
                                  const std::vector<VariogramPoint>& points);

/// Multi-start coordinate-descent fit; deterministic. All-zero semivariances
/// return a flagged degenerate model.
VariogramModel fit_exponential_variogram(const std::vector<VariogramPoint>& points);

}  // namespace bedrecon
