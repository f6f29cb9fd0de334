#include "bedrecon/physics/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bedrecon/grid/filters.hpp"
#include "bedrecon/grid/stencils.hpp"
#include "bedrecon/physics/huber.hpp"

namespace bedrecon {

void LossConfig::validate() const {
    const double lambdas[] = {lambda_data, lambda_phys, lambda_tv,
                              lambda_lap,  lambda_nonneg, lambda_prior};
    for (double l : lambdas)
        if (l < 0.0) throw ParameterError("loss weights must be nonnegative");
    if (!(delta_radar > 0.0) || !(delta_mass > 0.0) || !(delta_prior > 0.0))
        throw ParameterError("huber deltas must be positive");
    if (!(beta_perp > beta_par) || !(beta_par > 0.0))
        throw ParameterError("flow TV requires beta_perp > beta_par > 0");
    if (conf_exponent < 1.0 || conf_exponent > 2.0)
        throw ParameterError("confidence exponent must lie in [1, 2]");
    if (scales.empty()) throw ParameterError("mass term needs at least one pooling scale");
    for (int k : scales)
        if (k < 1) throw ParameterError("pooling scales must be >= 1");
    if (!scale_weights.empty() && scale_weights.size() != scales.size())
        throw ParameterError("scale_weights must match scales");
}

std::vector<double> LossConfig::effective_scale_weights() const {
    if (!scale_weights.empty()) return scale_weights;
    return std::vector<double>(scales.size(), 1.0 / static_cast<double>(scales.size()));
}

void Schedule::validate() const {
    if (total_epochs < 1) throw ParameterError("schedule needs at least one epoch");
    const auto check = [](double s, double e, const char* what) {
        if (!(s >= 0.0 && s < e && e <= 1.0))
            throw ParameterError(std::string("ramp fractions must satisfy 0 <= start < end <= 1 for ") + what);
    };
    check(phys_ramp_start, phys_ramp_end, "phys");
    check(prior_ramp_start, prior_ramp_end, "prior");
}

double ramp_weight(double epoch, double total, double target, double start_frac, double end_frac) {
    if (!(start_frac < end_frac)) throw ParameterError("ramp start must precede ramp end");
    const double s = start_frac * total;
    const double e = end_frac * total;
    if (epoch <= s) return 0.0;
    if (epoch >= e) return target;
    return target * (epoch - s) / (e - s);
}

SmoothingSpec smoothing_for_epoch(const LossConfig& cfg, double epoch, double total) {
    return epoch < 0.5 * total ? cfg.smooth_early : cfg.smooth_late;
}

TermValue loss_radar(const Field& h_hat, const ObservationLayer& obs, double delta,
                     double weight_floor) {
    require_same_shape(h_hat.geom, obs.mask.geom, "loss_radar");
    const Eigen::Index h = h_hat.rows(), w = h_hat.cols();

    double z = 0.0;
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < w; ++j)
            if (obs.mask(i, j)) z += std::max(weight_floor, obs.c(i, j));
    if (!(z > 0.0)) throw EmptyObservationsError("radar loss without observed cells");

    TermValue out;
    out.grad = Array2d::Zero(h, w);
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < w; ++j) {
            if (!obs.mask(i, j)) continue;
            const double wgt = std::max(weight_floor, obs.c(i, j)) / z;
            const ValueGrad hb = huber(h_hat(i, j) - obs.h_rad(i, j), delta);
            out.value += wgt * hb.value;
            out.grad(i, j) = wgt * hb.deriv;
        }
    return out;
}

namespace {

struct PooledScene {
    Field h, vx, vy, dhdt, smb;
};

PooledScene pool_scene(const Field& h_hat, const Scene& scene, int scale) {
    return PooledScene{avg_pool(h_hat, scale), avg_pool(scene.v.x, scale), avg_pool(scene.v.y, scale),
                       avg_pool(scene.dhdt, scale), avg_pool(scene.smb, scale)};
}

Field smoothed_flux_divergence(const PooledScene& p, const SmoothingSpec& smooth) {
    Field fx = p.h.with_values(p.h.values * p.vx.values);
    Field fy = p.h.with_values(p.h.values * p.vy.values);
    fx = gaussian_smooth(fx, smooth.size, smooth.sigma);
    fy = gaussian_smooth(fy, smooth.size, smooth.sigma);
    return divergence(VectorField(std::move(fx), std::move(fy)));
}

}  // namespace

Field mass_residual(const Field& h_hat, const Scene& scene, int scale, const SmoothingSpec& smooth) {
    require_same_shape(h_hat.geom, scene.geom(), "mass_residual");
    const PooledScene p = pool_scene(h_hat, scene, scale);
    const Field div = smoothed_flux_divergence(p, smooth);
    return p.dhdt.with_values(p.dhdt.values + div.values - p.smb.values);
}

TermValue loss_mass(const Field& h_hat, const Scene& scene, const ObservationLayer& obs,
                    const LossConfig& cfg, const SmoothingSpec& smooth) {
    require_same_shape(h_hat.geom, scene.geom(), "loss_mass");
    const Field conf_weight =
        obs.c.with_values((1.0 - obs.c.values).pow(cfg.conf_exponent));
    const std::vector<double> alpha = cfg.effective_scale_weights();

    TermValue out;
    out.grad = Array2d::Zero(h_hat.rows(), h_hat.cols());
    for (size_t si = 0; si < cfg.scales.size(); ++si) {
        const int k = cfg.scales[si];
        const double a = alpha[si];
        const PooledScene p = pool_scene(h_hat, scene, k);
        const Field omega = avg_pool(conf_weight, k);
        const Field div = smoothed_flux_divergence(p, smooth);
        const Array2d residual = p.dhdt.values + div.values - p.smb.values;

        const auto n = static_cast<double>(residual.size());
        Array2d co_r(residual.rows(), residual.cols());
        double term = 0.0;
        for (Eigen::Index i = 0; i < residual.rows(); ++i)
            for (Eigen::Index j = 0; j < residual.cols(); ++j) {
                const ValueGrad hb = huber(residual(i, j), cfg.delta_mass);
                term += omega(i, j) * hb.value;
                co_r(i, j) = a * omega(i, j) * hb.deriv / n;
            }
        out.value += a * term / n;

        auto [co_fx, co_fy] = divergence_adjoint(p.h.geom, co_r);
        co_fx = gaussian_smooth_adjoint(co_fx, smooth.size, smooth.sigma);
        co_fy = gaussian_smooth_adjoint(co_fy, smooth.size, smooth.sigma);
        const Array2d co_hk = co_fx * p.vx.values + co_fy * p.vy.values;
        out.grad += avg_pool_adjoint(co_hk, h_hat.geom, k);
    }
    return out;
}

TermValue loss_flow_tv(const Field& h_hat, const VectorField& v, const LossConfig& cfg) {
    require_same_shape(h_hat.geom, v.geom(), "loss_flow_tv");
    const VectorField g = gradient(h_hat);
    const Array2d speed = (v.x.values.square() + v.y.values.square()).sqrt() + cfg.flow_eps;
    const Array2d ux = v.x.values / speed;
    const Array2d uy = v.y.values / speed;

    const auto n = static_cast<double>(h_hat.geom.size());
    Array2d co_gx(h_hat.rows(), h_hat.cols()), co_gy(h_hat.rows(), h_hat.cols());
    TermValue out;
    for (Eigen::Index i = 0; i < h_hat.rows(); ++i)
        for (Eigen::Index j = 0; j < h_hat.cols(); ++j) {
            const double gx = g.x(i, j), gy = g.y(i, j);
            // u_perp = (-uy, ux)
            const ValueGrad perp = smooth_abs(gx * -uy(i, j) + gy * ux(i, j), cfg.smooth_abs_eta);
            const ValueGrad par = smooth_abs(gx * ux(i, j) + gy * uy(i, j), cfg.smooth_abs_eta);
            out.value += cfg.beta_perp * perp.value + cfg.beta_par * par.value;
            co_gx(i, j) = (cfg.beta_perp * perp.deriv * -uy(i, j) + cfg.beta_par * par.deriv * ux(i, j)) / n;
            co_gy(i, j) = (cfg.beta_perp * perp.deriv * ux(i, j) + cfg.beta_par * par.deriv * uy(i, j)) / n;
        }
    out.value /= n;
    out.grad = gradient_adjoint(h_hat.geom, co_gx, co_gy);
    return out;
}

TermValue loss_laplacian(const Field& r, double eta) {
    const Field lap = laplacian(r);
    const auto n = static_cast<double>(r.geom.size());
    Array2d co(r.rows(), r.cols());
    TermValue out;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            const ValueGrad sa = smooth_abs(lap(i, j), eta);
            out.value += sa.value;
            co(i, j) = sa.deriv / n;
        }
    out.value /= n;
    out.grad = laplacian_adjoint(r.geom, co);
    return out;
}

TermValue loss_nonneg(const Field& h_hat) {
    const auto n = static_cast<double>(h_hat.geom.size());
    const Array2d neg = (-h_hat.values).max(0.0);
    TermValue out;
    out.value = neg.square().sum() / n;
    out.grad = -2.0 * neg / n;
    return out;
}

Field slope_weight_field(const Field& b_p, const Mask& valid, double s90_floor) {
    require_same_shape(b_p.geom, valid.geom, "slope_weight_field");
    const VectorField g = gradient(b_p);
    const Array2d norm = (g.x.values.square() + g.y.values.square()).sqrt();

    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(norm.size()));
    for (Eigen::Index i = 0; i < norm.rows(); ++i)
        for (Eigen::Index j = 0; j < norm.cols(); ++j)
            if (valid(i, j)) vals.push_back(norm(i, j));
    double s90 = s90_floor;
    if (!vals.empty()) {
        const auto idx = static_cast<size_t>(0.9 * static_cast<double>(vals.size() - 1) + 0.5);
        std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(idx), vals.end());
        s90 = std::max(s90_floor, vals[idx]);
    }
    return b_p.with_values((-norm / s90).exp());
}

TermValue loss_prior(const Field& b_hat, const Field& b_p, const ObservationLayer& obs,
                     const Field& slope_w, double delta) {
    require_same_shape(b_hat.geom, b_p.geom, "loss_prior");
    const auto n = static_cast<double>(b_hat.geom.size());
    TermValue out;
    out.grad = Array2d::Zero(b_hat.rows(), b_hat.cols());
    for (Eigen::Index i = 0; i < b_hat.rows(); ++i)
        for (Eigen::Index j = 0; j < b_hat.cols(); ++j) {
            if (obs.mask(i, j)) continue;  // masked at picks
            const double cw = 1.0 - obs.c(i, j);
            const double wgt = cw * cw * slope_w(i, j);
            const ValueGrad hb = huber(b_hat(i, j) - b_p(i, j), delta);
            out.value += wgt * hb.value;
            out.grad(i, j) = wgt * hb.deriv / n;
        }
    out.value /= n;
    return out;
}

LossBreakdown total_loss(const ReconState& state, const Scene& scene, const ObservationLayer& obs,
                         const LossConfig& cfg, const Schedule& sched, double epoch,
                         const Field& slope_w) {
    require_same_shape(state.r_hat.geom, scene.geom(), "total_loss");
    const double sigma = state.norm.sigma;
    const auto total = static_cast<double>(sched.total_epochs);

    LossBreakdown out;
    out.lambda_phys = ramp_weight(epoch, total, cfg.lambda_phys, sched.phys_ramp_start, sched.phys_ramp_end);
    out.lambda_prior =
        ramp_weight(epoch, total, cfg.lambda_prior, sched.prior_ramp_start, sched.prior_ramp_end);
    out.grad_r_hat = Array2d::Zero(state.r_hat.rows(), state.r_hat.cols());

    const Reconstruction rec = reconstruct(state, scene);

    // Tiles without any radar cells still solve on physics and prior alone.
    if (cfg.lambda_data > 0.0 && count_true(obs.mask) > 0) {
        const TermValue t = loss_radar(rec.h_hat, obs, cfg.delta_radar, cfg.radar_weight_floor);
        out.radar = t.value;
        out.grad_r_hat += cfg.lambda_data * sigma * t.grad;
    }
    if (out.lambda_phys > 0.0) {
        const SmoothingSpec smooth = smoothing_for_epoch(cfg, epoch, total);
        const TermValue t = loss_mass(rec.h_hat, scene, obs, cfg, smooth);
        out.mass = t.value;
        out.grad_r_hat += out.lambda_phys * sigma * t.grad;
    }
    if (cfg.lambda_tv > 0.0) {
        const TermValue t = loss_flow_tv(rec.h_hat, scene.v, cfg);
        out.flow_tv = t.value;
        out.grad_r_hat += cfg.lambda_tv * sigma * t.grad;
    }
    if (cfg.lambda_lap > 0.0) {
        const Field r = state.r_hat.with_values(sigma * state.r_hat.values + state.norm.mu);
        const TermValue t = loss_laplacian(r, cfg.smooth_abs_eta);
        out.laplacian = t.value;
        out.grad_r_hat += cfg.lambda_lap * sigma * t.grad;
    }
    if (cfg.lambda_nonneg > 0.0) {
        const TermValue t = loss_nonneg(rec.h_hat);
        out.nonneg = t.value;
        out.grad_r_hat += cfg.lambda_nonneg * sigma * t.grad;
    }
    if (out.lambda_prior > 0.0) {
        const TermValue t = loss_prior(rec.b_hat, scene.b_p, obs, slope_w, cfg.delta_prior);
        out.prior = t.value;
        out.grad_r_hat += out.lambda_prior * -sigma * t.grad;
    }

    out.total = cfg.lambda_data * out.radar + out.lambda_phys * out.mass + cfg.lambda_tv * out.flow_tv +
                cfg.lambda_lap * out.laplacian + cfg.lambda_nonneg * out.nonneg +
                out.lambda_prior * out.prior;
    return out;
}

}  // namespace bedrecon
