#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "bedrecon/core/rng.hpp"
#include "bedrecon/data/synth.hpp"
#include "bedrecon/grid/dihedral.hpp"
#include "bedrecon/physics/huber.hpp"

#include "fd_support.hpp"
#include "bedrecon/physics/losses.hpp"

using namespace bedrecon;

namespace {

GridGeometry geom(Eigen::Index rows, Eigen::Index cols, double spacing = 1.0) {
    return GridGeometry{rows, cols, spacing, 0.0, 0.0};
}

struct PhysicsFixture {
    Scene scene;
    ObservationLayer obs;
    NormStats norm;
    Field slope_w;

    static PhysicsFixture make(std::uint64_t seed = 5) {
        SynthParams params;
        params.line_spacing = 6;
        params.flow_speed = 40.0;
        const SynthScene sc = synth_scene(seed, 24, 24, 150.0, params);
        ObservationParams op;
        ObservationLayer obs = build_observation_layer(sc.picks, sc.scene.s, op);
        NormStats norm = residual_norm_stats(obs, sc.scene, full_mask(sc.scene.geom()), 1.0);
        Field slope = slope_weight_field(sc.scene.b_p, sc.scene.valid, 1.0e-6);
        return PhysicsFixture{sc.scene, std::move(obs), norm, std::move(slope)};
    }
};

// Central-difference check via the shared crease-aware harness.
void check_gradient(const std::function<double(const Field&)>& value_of, const Field& at,
                    const Array2d& analytic, int samples, double step, double rel_tol,
                    std::uint64_t seed = 77) {
    Rng rng(seed);
    const testing::FdCheckResult r = testing::fd_check(value_of, at, analytic, step, samples, rel_tol, rng);
    CHECK(r.checked >= samples);
    CHECK(r.max_rel_err < rel_tol);
}

}  // namespace

TEST_CASE("huber penalty") {
    CHECK(huber(0.0, 1.0).value == 0.0);
    CHECK(huber(0.0, 1.0).deriv == 0.0);
    CHECK(huber(0.5, 1.0).value == doctest::Approx(0.125));
    CHECK(huber(0.5, 1.0).deriv == doctest::Approx(0.5));
    CHECK(huber(3.0, 1.0).value == doctest::Approx(2.5));
    CHECK(huber(3.0, 1.0).deriv == doctest::Approx(1.0));
    CHECK(huber(-3.0, 1.0).deriv == doctest::Approx(-1.0));
    CHECK_THROWS_AS((void)huber(1.0, 0.0), ParameterError);

    CHECK(smooth_abs(0.0, 1e-3).value == 0.0);
    CHECK(smooth_abs(2.0, 1e-3).value == doctest::Approx(2.0 - 1e-3).epsilon(1e-6));
}

TEST_CASE("ramp weight endpoints and midpoint") {
    CHECK(ramp_weight(0.0, 100.0, 5.0, 0.3, 0.9) == 0.0);
    CHECK(ramp_weight(90.0, 100.0, 5.0, 0.3, 0.9) == doctest::Approx(5.0));
    CHECK(ramp_weight(100.0, 100.0, 5.0, 0.3, 0.9) == doctest::Approx(5.0));
    CHECK(ramp_weight(60.0, 100.0, 5.0, 0.3, 0.9) == doctest::Approx(2.5));
    CHECK(ramp_weight(50.0, 100.0, 1.0, 0.0, 0.9) == doctest::Approx(1.0 * 50.0 / 90.0));
    CHECK_THROWS_AS((void)ramp_weight(1.0, 10.0, 1.0, 0.9, 0.9), ParameterError);
}

TEST_CASE("smoothing schedule switches at half-run") {
    LossConfig cfg;
    CHECK(smoothing_for_epoch(cfg, 0.0, 100.0).size == 11);
    CHECK(smoothing_for_epoch(cfg, 49.0, 100.0).size == 11);
    CHECK(smoothing_for_epoch(cfg, 50.0, 100.0).size == 15);
    CHECK(smoothing_for_epoch(cfg, 99.0, 100.0).sigma == doctest::Approx(5.0));
}

TEST_CASE("radar loss basics") {
    GridGeometry g = geom(5, 5);
    ObservationLayer obs = ObservationLayer::empty(g, 12.0);
    obs.mask(2, 2) = 1;
    obs.c(2, 2) = 1.0;
    obs.h_rad(2, 2) = 10.0;

    Field h(g, 10.0);
    CHECK(loss_radar(h, obs, 1.0, 0.05).value == 0.0);

    h(2, 2) = 10.5;
    const TermValue t = loss_radar(h, obs, 1.0, 0.05);
    CHECK(t.value == doctest::Approx(0.125));
    CHECK(t.grad(2, 2) == doctest::Approx(0.5));
    CHECK(t.grad(0, 0) == 0.0);

    CHECK_THROWS_AS((void)loss_radar(h, ObservationLayer::empty(g, 12.0), 1.0, 0.05),
                    EmptyObservationsError);
}

TEST_CASE("radar loss matches a direct summation oracle") {
    const PhysicsFixture fx = PhysicsFixture::make();
    Rng rng(13);
    Field h = fx.scene.h_p;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) += rng.normal() * 2.0;

    const double delta = 1.0, floor = 0.05;
    const TermValue t = loss_radar(h, fx.obs, delta, floor);

    double z = 0.0, acc = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            if (fx.obs.mask(i, j)) {
                const double w = std::max(floor, fx.obs.c(i, j));
                z += w;
                acc += w * huber(h(i, j) - fx.obs.h_rad(i, j), delta).value;
            }
    CHECK(t.value == doctest::Approx(acc / z).epsilon(1e-9));
}

TEST_CASE("mass residual zero configurations") {
    // Constructed truth: residual is identically zero at scale 1, no smoothing.
    SynthParams params;
    const SynthScene sc = synth_scene(3, 32, 32, 150.0, params);
    const Field h_true = sc.scene.s.with_values(sc.scene.s.values - sc.bed_true.values);
    const Field r0 = mass_residual(h_true, sc.scene, 1, SmoothingSpec{1, 1.0});
    CHECK(r0.values.abs().maxCoeff() < 1e-9);

    // Uniform thickness, linear velocity, compensating smb.
    GridGeometry g = geom(8, 8);
    const double h0 = 100.0, a = 0.02;
    Array2d vx(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 8; ++j) vx(i, j) = a * g.cell_x(j);
    Scene lin = make_scene(Field(g, 1000.0), VectorField(Field(g, vx), Field(g, 0.0)),
                           Field(g, h0 * a), Field(g, 0.0), Field(g, 900.0), full_mask(g));
    const Field rl = mass_residual(Field(g, h0), lin, 1, SmoothingSpec{1, 1.0});
    CHECK(rl.values.abs().maxCoeff() < 1e-12);

    // Constant thickness and velocity, no sources.
    Scene flat = make_scene(Field(g, 1000.0), VectorField(Field(g, 3.0), Field(g, -2.0)),
                            Field(g, 0.0), Field(g, 0.0), Field(g, 900.0), full_mask(g));
    const Field rf = mass_residual(Field(g, 50.0), flat, 1, SmoothingSpec{1, 1.0});
    CHECK(rf.values.abs().maxCoeff() < 1e-12);
}

TEST_CASE("mass loss: truth zero, alpha linearity, gradient") {
    const PhysicsFixture fx = PhysicsFixture::make();
    LossConfig cfg;
    cfg.scales = {1};
    cfg.scale_weights = {1.0};

    // On the constructed truth with identity smoothing the loss vanishes.
    SynthParams params;
    const SynthScene sc = synth_scene(3, 32, 32, 150.0, params);
    ObservationParams op;
    const ObservationLayer obs3 = build_observation_layer(sc.picks, sc.scene.s, op);
    const Field h_true = sc.scene.s.with_values(sc.scene.s.values - sc.bed_true.values);
    CHECK(loss_mass(h_true, sc.scene, obs3, cfg, SmoothingSpec{1, 1.0}).value < 1e-12);

    // Doubling a scale weight doubles the term.
    Rng rng(19);
    Field h = fx.scene.h_p;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) += rng.normal() * 3.0;
    LossConfig cfg2 = cfg;
    cfg2.scale_weights = {2.0};
    const double v1 = loss_mass(h, fx.scene, fx.obs, cfg, SmoothingSpec{1, 1.0}).value;
    const double v2 = loss_mass(h, fx.scene, fx.obs, cfg2, SmoothingSpec{1, 1.0}).value;
    CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-12));

    // Analytic gradient against finite differences, multi-scale + smoothing.
    LossConfig cfg3;
    cfg3.scales = {1, 2, 4};
    const SmoothingSpec smooth{5, 1.5};
    const TermValue t = loss_mass(h, fx.scene, fx.obs, cfg3, smooth);
    check_gradient(
        [&](const Field& hh) { return loss_mass(hh, fx.scene, fx.obs, cfg3, smooth).value; }, h,
        t.grad, 10, 1.0e-3, 1.0e-4);
}

TEST_CASE("flow-aligned TV") {
    LossConfig cfg;
    GridGeometry g = geom(10, 10);

    // Constant field: exactly zero through the eta-compensated |.|.
    Scene flat = make_scene(Field(g, 100.0), VectorField(Field(g, 1.0), Field(g, 0.0)),
                            Field(g, 0.0), Field(g, 0.0), Field(g, 0.0), full_mask(g));
    CHECK(loss_flow_tv(Field(g, 55.0), flat.v, cfg).value == 0.0);

    // Along-flow variation only: the perpendicular term drops out.
    Array2d hx(10, 10);
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 10; ++j) hx(i, j) = 3.0 * g.cell_x(j);
    const TermValue t = loss_flow_tv(Field(g, hx), flat.v, cfg);
    CHECK(t.value == doctest::Approx(cfg.beta_par * 3.0).epsilon(1e-3));

    // Cross-flow variation costs more than the same along-flow variation.
    const TermValue cross = loss_flow_tv(Field(g, hx), VectorField(Field(g, 0.0), Field(g, 1.0)), cfg);
    CHECK(cross.value > t.value);

    // Gradient check on a rough field.
    Rng rng(23);
    Array2d rough(10, 10);
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 10; ++j) rough(i, j) = rng.normal() * 5.0;
    Array2d vx(10, 10), vy(10, 10);
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 10; ++j) {
            vx(i, j) = 1.0 + 0.3 * rng.normal();
            vy(i, j) = 0.5 * rng.normal();
        }
    const VectorField v(Field(g, vx), Field(g, vy));
    const Field h(g, rough);
    const TermValue tr = loss_flow_tv(h, v, cfg);
    check_gradient([&](const Field& hh) { return loss_flow_tv(hh, v, cfg).value; }, h, tr.grad, 10,
                   1.0e-5, 1.0e-4);
}

TEST_CASE("flow TV is invariant under a quarter-turn of the whole problem") {
    LossConfig cfg;
    Rng rng(29);
    GridGeometry g = geom(12, 12);
    Array2d hv(12, 12), vx(12, 12), vy(12, 12);
    for (Eigen::Index i = 0; i < 12; ++i)
        for (Eigen::Index j = 0; j < 12; ++j) {
            hv(i, j) = rng.normal() * 10.0;
            vx(i, j) = rng.normal();
            vy(i, j) = rng.normal();
        }
    const Field h(g, hv);
    const VectorField v(Field(g, vx), Field(g, vy));
    const double base = loss_flow_tv(h, v, cfg).value;

    const DihedralElement rot{1, false};
    const Field h_rot = dihedral_apply_scalar(h, rot);
    const VectorField v_rot = dihedral_apply(v, rot);
    const double rotated = loss_flow_tv(h_rot, v_rot, cfg).value;
    CHECK(rotated == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("laplacian loss") {
    GridGeometry g = geom(9, 9);
    CHECK(loss_laplacian(Field(g, 7.0), 1e-3).value == 0.0);

    Rng rng(31);
    Array2d rv(9, 9);
    for (Eigen::Index i = 0; i < 9; ++i)
        for (Eigen::Index j = 0; j < 9; ++j) rv(i, j) = rng.normal() * 4.0;
    const Field r(g, rv);
    const TermValue t = loss_laplacian(r, 1e-3);

    // Even in r: negating the field leaves the value unchanged.
    CHECK(loss_laplacian(r.with_values(-r.values), 1e-3).value == doctest::Approx(t.value).epsilon(1e-12));

    check_gradient([&](const Field& rr) { return loss_laplacian(rr, 1e-3).value; }, r, t.grad, 10,
                   1.0e-5, 1.0e-4);
}

TEST_CASE("nonnegativity hinge") {
    GridGeometry g = geom(6, 6);
    const TermValue zero = loss_nonneg(Field(g, 5.0));
    CHECK(zero.value == 0.0);
    CHECK(zero.grad.abs().maxCoeff() == 0.0);

    Field h(g, 5.0);
    h(1, 2) = -2.0;
    const TermValue t = loss_nonneg(h);
    CHECK(t.value == doctest::Approx(4.0 / 36.0));
    CHECK(t.grad(1, 2) == doctest::Approx(-2.0 * 2.0 / 36.0));

    check_gradient([&](const Field& hh) { return loss_nonneg(hh).value; }, h, t.grad, 10, 1.0e-6,
                   1.0e-6);
}

TEST_CASE("prior loss") {
    const PhysicsFixture fx = PhysicsFixture::make();
    const Field& b_p = fx.scene.b_p;

    // Exactly on the prior: zero.
    CHECK(loss_prior(b_p, b_p, fx.obs, fx.slope_w, 10.0).value == 0.0);

    // Mask cells contribute nothing regardless of the prediction there.
    Field b_hat = b_p;
    bool touched = false;
    for (Eigen::Index i = 0; i < b_p.rows() && !touched; ++i)
        for (Eigen::Index j = 0; j < b_p.cols(); ++j)
            if (fx.obs.mask(i, j)) {
                b_hat(i, j) += 500.0;
                touched = true;
                break;
            }
    REQUIRE(touched);
    CHECK(loss_prior(b_hat, b_p, fx.obs, fx.slope_w, 10.0).value == 0.0);

    // Flat prior: slope weight is one everywhere.
    GridGeometry g = geom(8, 8);
    const Field flat_w = slope_weight_field(Field(g, 42.0), full_mask(g), 1.0e-6);
    CHECK((flat_w.values - 1.0).abs().maxCoeff() < 1e-12);

    // Gradient check.
    Rng rng(37);
    Field b2 = b_p;
    for (Eigen::Index i = 0; i < b2.rows(); ++i)
        for (Eigen::Index j = 0; j < b2.cols(); ++j) b2(i, j) += rng.normal() * 3.0;
    const TermValue t = loss_prior(b2, b_p, fx.obs, fx.slope_w, 10.0);
    check_gradient(
        [&](const Field& bb) { return loss_prior(bb, b_p, fx.obs, fx.slope_w, 10.0).value; }, b2,
        t.grad, 10, 1.0e-4, 1.0e-4);
}

TEST_CASE("total loss bookkeeping and gradient") {
    const PhysicsFixture fx = PhysicsFixture::make();
    Schedule sched;
    sched.total_epochs = 100;
    LossConfig cfg;
    cfg.scales = {1, 2};
    cfg.smooth_early = {5, 1.5};
    cfg.smooth_late = {5, 1.5};

    Rng rng(41);
    Field r_hat(fx.scene.geom(), 0.0);
    for (Eigen::Index i = 0; i < r_hat.rows(); ++i)
        for (Eigen::Index j = 0; j < r_hat.cols(); ++j) r_hat(i, j) = rng.normal() * 0.5;
    const ReconState state{r_hat, fx.norm};

    // All weights zero: zero total, zero gradient.
    LossConfig zero = cfg;
    zero.lambda_data = zero.lambda_phys = zero.lambda_tv = 0.0;
    zero.lambda_lap = zero.lambda_nonneg = zero.lambda_prior = 0.0;
    const LossBreakdown lz = total_loss(state, fx.scene, fx.obs, zero, sched, 100.0, fx.slope_w);
    CHECK(lz.total == 0.0);
    CHECK(lz.grad_r_hat.abs().maxCoeff() == 0.0);

    // Breakdown recombination identity at a mid-schedule epoch.
    const double epoch = 80.0;
    const LossBreakdown lb = total_loss(state, fx.scene, fx.obs, cfg, sched, epoch, fx.slope_w);
    const double recombined =
        cfg.lambda_data * lb.radar + lb.lambda_phys * lb.mass + cfg.lambda_tv * lb.flow_tv +
        cfg.lambda_lap * lb.laplacian + cfg.lambda_nonneg * lb.nonneg + lb.lambda_prior * lb.prior;
    CHECK(lb.total == doctest::Approx(recombined).epsilon(1e-12));

    // Total gradient against finite differences through the normalization chain.
    Rng cell_rng(77);
    const auto fd = testing::fd_check(
        [&](const Field& rr) {
            return total_loss(ReconState{rr, fx.norm}, fx.scene, fx.obs, cfg, sched, epoch,
                              fx.slope_w)
                .total;
        },
        r_hat, lb.grad_r_hat, 1.0e-3 * fx.norm.sigma, 20, 1.0e-4, cell_rng);
    CHECK(fd.checked >= 20);
    CHECK(fd.max_rel_err < 1.0e-4);
}

TEST_CASE("loss config validation") {
    LossConfig bad;
    bad.beta_par = 1.5;  // must stay below beta_perp
    CHECK_THROWS_AS(bad.validate(), ParameterError);

    LossConfig neg;
    neg.lambda_tv = -1.0;
    CHECK_THROWS_AS(neg.validate(), ParameterError);

    LossConfig scales;
    scales.scales = {};
    CHECK_THROWS_AS(scales.validate(), ParameterError);

    Schedule s;
    s.prior_ramp_start = 0.95;
    CHECK_THROWS_AS(s.validate(), ParameterError);
}
