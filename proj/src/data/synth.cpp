#include "bedrecon/data/synth.hpp"

#include <cmath>
#include <vector>

#include "bedrecon/core/rng.hpp"
#include "bedrecon/grid/stencils.hpp"

namespace bedrecon {

namespace {

// Sum of a few random low-frequency cosine modes, normalized to peak 1.
Array2d smooth_modes(Rng& rng, Eigen::Index rows, Eigen::Index cols, int modes,
                     double wavelength_cells) {
    Array2d out = Array2d::Zero(rows, cols);
    for (int m = 0; m < modes; ++m) {
        const double lambda = wavelength_cells * rng.uniform(0.8, 1.5);
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        const double fx = std::cos(theta) / lambda;
        const double fy = std::sin(theta) / lambda;
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        const double amp = rng.uniform(0.5, 1.0);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                out(i, j) += amp * std::cos(2.0 * M_PI * (fx * static_cast<double>(j) +
                                                          fy * static_cast<double>(i)) +
                                            phase);
    }
    const double peak = out.abs().maxCoeff();
    if (peak > 0.0) out /= peak;
    return out;
}

}  // namespace

double sample_bilinear(const Field& f, double x, double y) {
    const GridGeometry& g = f.geom;
    const double fx = (x - g.x0) / g.spacing - 0.5;
    const double fy = (y - g.y0) / g.spacing - 0.5;
    const auto clampi = [](double v, Eigen::Index n) {
        const double c = std::min(std::max(v, 0.0), static_cast<double>(n - 1));
        return c;
    };
    const double cx = clampi(fx, g.cols), cy = clampi(fy, g.rows);
    const auto j0 = static_cast<Eigen::Index>(std::floor(cx));
    const auto i0 = static_cast<Eigen::Index>(std::floor(cy));
    const Eigen::Index j1 = std::min(j0 + 1, g.cols - 1);
    const Eigen::Index i1 = std::min(i0 + 1, g.rows - 1);
    const double tx = cx - static_cast<double>(j0);
    const double ty = cy - static_cast<double>(i0);
    return (1.0 - ty) * ((1.0 - tx) * f(i0, j0) + tx * f(i0, j1)) +
           ty * ((1.0 - tx) * f(i1, j0) + tx * f(i1, j1));
}

SynthScene synth_scene(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols, double spacing,
                       const SynthParams& params) {
    if (rows < 3 || cols < 3) throw DimensionError("synthetic scene needs at least 3x3 cells");
    if (!(spacing > 0.0)) throw ParameterError("spacing must be positive");
    if (params.line_spacing < 1 || params.line_step < 1)
        throw ParameterError("flight-line spacing and step must be >= 1");

    Rng rng(seed);
    GridGeometry geom{rows, cols, spacing, 0.0, 0.0};
    const auto xt = [&](Eigen::Index j) { return (static_cast<double>(j) + 0.5) / static_cast<double>(cols); };
    const auto yt = [&](Eigen::Index i) { return (static_cast<double>(i) + 0.5) / static_cast<double>(rows); };

    // True bed: ramp plus Gaussian troughs.
    Array2d bed(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            bed(i, j) = params.bed_base - params.bed_relief * xt(j);
    for (int t = 0; t < params.trough_count; ++t) {
        const double cx = rng.uniform(0.15, 0.85) * static_cast<double>(cols);
        const double cy = rng.uniform(0.15, 0.85) * static_cast<double>(rows);
        const double depth = params.trough_depth * rng.uniform(0.7, 1.3);
        const double sx = params.trough_width * rng.uniform(0.8, 1.4);
        const double sy = params.trough_width * rng.uniform(0.8, 1.4);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double dy = (static_cast<double>(i) - cy) / sy;
            for (Eigen::Index j = 0; j < cols; ++j) {
                const double dx = (static_cast<double>(j) - cx) / sx;
                bed(i, j) -= depth * std::exp(-0.5 * (dx * dx + dy * dy));
            }
        }
    }

    // Smooth surface; thickness follows.
    const Array2d relief = smooth_modes(rng, rows, cols, 3, 0.6 * static_cast<double>(std::min(rows, cols)));
    Array2d surf(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            surf(i, j) = params.surface_base - params.surface_drop * xt(j) +
                         params.surface_relief * relief(i, j);

    const Array2d thick = surf - bed;
    if (thick.minCoeff() < params.min_thickness)
        throw ParameterError("synthetic parameters produce thickness below min_thickness");

    Field s(geom, surf);
    Field bed_true(geom, bed);

    // Velocity along -grad(s), scaled to the requested peak speed.
    const VectorField gs = gradient(s);
    const double gmax = (gs.x.values.square() + gs.y.values.square()).sqrt().maxCoeff();
    const double scale = gmax > 0.0 ? params.flow_speed / gmax : 0.0;
    VectorField v(s.with_values(-scale * gs.x.values), s.with_values(-scale * gs.y.values));

    Array2d smb(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        smb.row(i).setConstant(params.smb_base + params.smb_gradient * yt(i));

    // Tendency chosen so the discrete mass residual of the truth is zero.
    const VectorField flux(s.with_values(thick * v.x.values), s.with_values(thick * v.y.values));
    const Field div_flux = divergence(flux);
    Field dhdt(geom, smb - div_flux.values);

    // Prior: truth plus a long-wavelength bias.
    Array2d bias = Array2d::Zero(rows, cols);
    if (params.prior_bias_amplitude != 0.0) {
        bias = params.prior_bias_amplitude * smooth_modes(rng, rows, cols, 4, params.prior_bias_length);
    } else {
        (void)smooth_modes(rng, rows, cols, 4, params.prior_bias_length);  // keep the stream fixed
    }
    Field b_p(geom, bed + bias);

    Scene scene = make_scene(std::move(s), std::move(v), Field(geom, std::move(smb)),
                             std::move(dhdt), std::move(b_p), full_mask(geom));

    // Picks along flight lines, sampled from the true bed.
    RadarPicks picks;
    const auto add_line_pick = [&](Eigen::Index i, Eigen::Index j) {
        double x = geom.cell_x(j);
        double y = geom.cell_y(i);
        if (params.pick_jitter > 0.0) {
            x += params.pick_jitter * spacing * (rng.uniform() - 0.5);
            y += params.pick_jitter * spacing * (rng.uniform() - 0.5);
        }
        double value = sample_bilinear(bed_true, x, y);
        if (params.pick_noise_sd > 0.0) value += params.pick_noise_sd * rng.normal();
        picks.records.push_back(Pick{x, y, value});
    };
    if (params.line_pattern != LinePattern::Horizontal) {
        for (Eigen::Index j = params.line_spacing / 2; j < cols; j += params.line_spacing)
            for (Eigen::Index i = 0; i < rows; i += params.line_step) add_line_pick(i, j);
    }
    if (params.line_pattern != LinePattern::Vertical) {
        for (Eigen::Index i = params.line_spacing / 2; i < rows; i += params.line_spacing)
            for (Eigen::Index j = 0; j < cols; j += params.line_step) add_line_pick(i, j);
    }

    return SynthScene{std::move(scene), std::move(bed_true), std::move(picks)};
}

}  // namespace bedrecon
