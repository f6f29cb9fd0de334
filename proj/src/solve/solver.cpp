#include "bedrecon/solve/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bedrecon {

void SolverConfig::validate() const {
    if (max_epochs < 1) throw ParameterError("solver needs at least one epoch");
    if (!(lr > 0.0)) throw ParameterError("learning rate must be positive");
    if (weight_decay < 0.0) throw ParameterError("weight decay must be nonnegative");
    if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw ParameterError("ema decay must lie in [0, 1)");
    if (patience < 1) throw ParameterError("patience must be >= 1");
    if (monitor_every < 1) throw ParameterError("monitor cadence must be >= 1");
    if (cosine_t0 < 1 || cosine_t_mult < 1) throw ParameterError("cosine restart parameters must be >= 1");
}

Field ema_update(const Field& shadow, const Field& current, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("ema decay must lie in [0, 1)");
    require_same_shape(shadow.geom, current.geom, "ema_update");
    return shadow.with_values(alpha * shadow.values + (1.0 - alpha) * current.values);
}

double cosine_restart_lr(double base_lr, int epoch, int t0, int t_mult) {
    int cycle_len = t0;
    int e = epoch;
    while (e >= cycle_len) {
        e -= cycle_len;
        if (t_mult > 1) cycle_len *= t_mult;
    }
    return base_lr * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(e) / static_cast<double>(cycle_len)));
}

double radar_fit_monitor(const ReconState& state, const Scene& scene, const ObservationLayer& obs,
                         const Mask& region, double delta, double weight_floor) {
    ObservationLayer masked = obs;
    for (Eigen::Index i = 0; i < region.rows(); ++i)
        for (Eigen::Index j = 0; j < region.cols(); ++j)
            if (!region(i, j)) masked.mask(i, j) = 0;
    if (count_true(masked.mask) == 0) return std::numeric_limits<double>::quiet_NaN();
    const Reconstruction rec = reconstruct(state, scene);
    return loss_radar(rec.h_hat, masked, delta, weight_floor).value;
}

SolveResult solve_variational(const Scene& scene, const ObservationLayer& obs,
                              const NormStats& norm, const LossConfig& loss_cfg,
                              const Schedule& sched, const SolverConfig& cfg, const Mask& region,
                              const Mask& monitor_region) {
    loss_cfg.validate();
    sched.validate();
    cfg.validate();
    require_same_shape(region.geom, scene.geom(), "solve_variational region");
    require_same_shape(monitor_region.geom, scene.geom(), "solve_variational monitor");

    const GridGeometry& geom = scene.geom();
    Array2d region_f(geom.rows, geom.cols);
    for (Eigen::Index i = 0; i < geom.rows; ++i)
        for (Eigen::Index j = 0; j < geom.cols; ++j) region_f(i, j) = region(i, j) ? 1.0 : 0.0;

    const Field slope_w = slope_weight_field(scene.b_p, scene.valid, loss_cfg.slope_s90_floor);

    ReconState state{Field(geom, 0.0), norm};
    Field ema = state.r_hat;
    Array2d m = Array2d::Zero(geom.rows, geom.cols);
    Array2d v = Array2d::Zero(geom.rows, geom.cols);

    SolveResult result;
    result.state = ReconState{ema, norm};
    result.best_monitor = radar_fit_monitor(result.state, scene, obs, monitor_region,
                                            loss_cfg.delta_radar, loss_cfg.radar_weight_floor);
    result.best_epoch = 0;
    const bool monitored = std::isfinite(result.best_monitor);
    double last_monitor = result.best_monitor;

    double beta1_t = 1.0, beta2_t = 1.0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const LossBreakdown lb =
            total_loss(state, scene, obs, loss_cfg, sched, static_cast<double>(epoch), slope_w);
        if (!std::isfinite(lb.total)) {
            const char* term = !std::isfinite(lb.radar)       ? "radar"
                               : !std::isfinite(lb.mass)      ? "mass"
                               : !std::isfinite(lb.flow_tv)   ? "flowTV"
                               : !std::isfinite(lb.laplacian) ? "laplacian"
                               : !std::isfinite(lb.nonneg)    ? "nonneg"
                                                              : "prior";
            throw std::runtime_error("non-finite " + std::string(term) + " loss at epoch " +
                                     std::to_string(epoch));
        }

        const double lr_t = cosine_restart_lr(cfg.lr, epoch, cfg.cosine_t0, cfg.cosine_t_mult);
        const Array2d g = lb.grad_r_hat * region_f;
        beta1_t *= cfg.beta1;
        beta2_t *= cfg.beta2;
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.square();
        const Array2d m_hat = m / (1.0 - beta1_t);
        const Array2d v_hat = v / (1.0 - beta2_t);
        state.r_hat.values -=
            lr_t * (m_hat / (v_hat.sqrt() + cfg.adam_eps) + cfg.weight_decay * state.r_hat.values) *
            region_f;

        ema.values = cfg.ema_decay * ema.values + (1.0 - cfg.ema_decay) * state.r_hat.values;

        if (monitored && (epoch + 1) % cfg.monitor_every == 0) {
            const ReconState ema_state{ema, norm};
            last_monitor = radar_fit_monitor(ema_state, scene, obs, monitor_region,
                                             loss_cfg.delta_radar, loss_cfg.radar_weight_floor);
            if (last_monitor < result.best_monitor) {
                result.best_monitor = last_monitor;
                result.best_epoch = epoch + 1;
                result.state.r_hat = ema;
            }
        }

        result.history.push_back(EpochStats{epoch, lb.radar, lb.mass, lb.flow_tv, lb.laplacian,
                                            lb.nonneg, lb.prior, lb.total, lr_t, last_monitor});

        if (monitored && epoch + 1 - result.best_epoch >= cfg.patience) break;
    }

    if (!monitored) result.state.r_hat = ema;  // nothing to select on; return the final shadow
    return result;
}

}  // namespace bedrecon
