#pragma once

#include "bedrecon/data/observation.hpp"
#include "bedrecon/data/scene.hpp"
#include "bedrecon/physics/loss_config.hpp"
#include "bedrecon/solve/state.hpp"

namespace bedrecon {

// A loss term's scalar value and its gradient with respect to the field the
// term is written in (thickness, bed, or de-normalized residual).
struct TermValue {
    double value = 0.0;
    Array2d grad;
};

/// Confidence-weighted Huber fit of thickness at radar cells.
TermValue loss_radar(const Field& h_hat, const ObservationLayer& obs, double delta,
                     double weight_floor);

/// Mass-conservation residual dhdt + div(h v) - smb at one pooling scale,
/// with the flux components Gaussian-smoothed before the divergence.
Field mass_residual(const Field& h_hat, const Scene& scene, int scale,
                    const SmoothingSpec& smooth);

/// Multi-scale Huber penalty of the mass residual, weighted by (1-c)^q.
TermValue loss_mass(const Field& h_hat, const Scene& scene, const ObservationLayer& obs,
                    const LossConfig& cfg, const SmoothingSpec& smooth);

/// Anisotropic total variation: cross-flow gradients cost beta_perp, along-flow
/// beta_par, with |.| smoothed for differentiability.
TermValue loss_flow_tv(const Field& h_hat, const VectorField& v, const LossConfig& cfg);

/// Mean smoothed |high-pass| of the de-normalized residual field.
TermValue loss_laplacian(const Field& r, double eta);

/// Mean squared hinge on negative thickness.
TermValue loss_nonneg(const Field& h_hat);

/// exp(-|grad b_p| / s90), s90 the 90th percentile of |grad b_p| over valid
/// cells (floored). Precompute once per scene.
Field slope_weight_field(const Field& b_p, const Mask& valid, double s90_floor);

/// Prior-consistency pull, masked at picks and attenuated by confidence and
/// slope weight.
TermValue loss_prior(const Field& b_hat, const Field& b_p, const ObservationLayer& obs,
                     const Field& slope_w, double delta);

struct LossBreakdown {
    double radar = 0.0;
    double mass = 0.0;
    double flow_tv = 0.0;
    double laplacian = 0.0;
    double nonneg = 0.0;
    double prior = 0.0;
    double total = 0.0;
    double lambda_phys = 0.0;   // epoch-resolved weights actually applied
    double lambda_prior = 0.0;
    Array2d grad_r_hat;
};

/// Evaluates all terms on the de-normalized reconstruction and combines them
/// with the epoch-scheduled weights. Terms whose weight is zero at this epoch
/// are skipped and reported as zero.
LossBreakdown total_loss(const ReconState& state, const Scene& scene, const ObservationLayer& obs,
                         const LossConfig& cfg, const Schedule& sched, double epoch,
                         const Field& slope_w);

}  // namespace bedrecon
