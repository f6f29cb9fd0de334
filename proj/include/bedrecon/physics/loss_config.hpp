#pragma once

#include <vector>

#include "bedrecon/core/errors.hpp"

namespace bedrecon {

struct SmoothingSpec {
    int size = 1;        // odd; 1 disables smoothing
    double sigma = 1.0;  // cells
};

// Loss weights and shape parameters. Targets for the ramped weights
// (phys, prior) are stored here; the epoch-dependent values come from
// Schedule + ramp_weight.
struct LossConfig {
    double lambda_data = 2.0;
    double lambda_phys = 1.0e-2;  // ramp target
    double lambda_tv = 5.0e-4;
    double lambda_lap = 2.0e-4;
    double lambda_nonneg = 1.0e-3;
    double lambda_prior = 5.0e-3;  // ramp target

    double delta_radar = 1.0;
    double delta_mass = 5.0;
    double delta_prior = 10.0;

    double beta_perp = 0.9;
    double beta_par = 0.35;

    double conf_exponent = 2.0;       // q in (1-c)^q, in [1, 2]
    double radar_weight_floor = 0.05; // epsilon in max(eps, c)
    double flow_eps = 1.0e-6;         // in v/(|v| + eps)
    double smooth_abs_eta = 1.0e-3;
    double slope_s90_floor = 1.0e-6;

    std::vector<int> scales = {1, 2, 4};
    std::vector<double> scale_weights;  // empty -> uniform 1/|scales|

    SmoothingSpec smooth_early{11, 3.5};
    SmoothingSpec smooth_late{15, 5.0};

    void validate() const;
    std::vector<double> effective_scale_weights() const;
};

struct Schedule {
    int total_epochs = 6000;
    double phys_ramp_start = 0.0;
    double phys_ramp_end = 0.9;
    double prior_ramp_start = 0.3;
    double prior_ramp_end = 0.9;

    void validate() const;
};

/// Piecewise-linear ramp: 0 until start_frac*total, linear up to `target` at
/// end_frac*total, constant after.
double ramp_weight(double epoch, double total, double target, double start_frac, double end_frac);

/// Flux smoothing switches from the early to the late kernel at half-run.
SmoothingSpec smoothing_for_epoch(const LossConfig& cfg, double epoch, double total);

}  // namespace bedrecon
