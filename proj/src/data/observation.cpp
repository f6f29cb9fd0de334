#include "bedrecon/data/observation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bedrecon/grid/distance.hpp"

namespace bedrecon {

namespace {

double median_inplace(std::vector<double>& v) {
    const size_t n = v.size();
    const size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (n % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid - 1), v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

struct CellDist {
    double d2;
    Eigen::Index i, j;
};

// K nearest cell centers of a point. A window of index radius R around the
// containing cell is exact once the K-th distance is at most (R + 0.5) cells:
// any center outside the window is farther than that.
void k_nearest_cells(const GridGeometry& geom, double x, double y, int k,
                     std::vector<CellDist>& out) {
    const auto [ci, cj] = geom.cell_of(x, y);
    const auto max_radius = static_cast<Eigen::Index>(std::max(geom.rows, geom.cols));
    for (Eigen::Index radius = 1; radius <= max_radius; ++radius) {
        out.clear();
        const Eigen::Index i0 = std::max<Eigen::Index>(0, ci - radius);
        const Eigen::Index i1 = std::min<Eigen::Index>(geom.rows - 1, ci + radius);
        const Eigen::Index j0 = std::max<Eigen::Index>(0, cj - radius);
        const Eigen::Index j1 = std::min<Eigen::Index>(geom.cols - 1, cj + radius);
        for (Eigen::Index i = i0; i <= i1; ++i) {
            const double dy = geom.cell_y(i) - y;
            for (Eigen::Index j = j0; j <= j1; ++j) {
                const double dx = geom.cell_x(j) - x;
                out.push_back({dx * dx + dy * dy, i, j});
            }
        }
        const size_t want = std::min<size_t>(static_cast<size_t>(k), static_cast<size_t>(geom.size()));
        if (out.size() < want) continue;
        std::sort(out.begin(), out.end(), [](const CellDist& a, const CellDist& b) {
            if (a.d2 != b.d2) return a.d2 < b.d2;
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        out.resize(want);
        const double certified = (static_cast<double>(radius) + 0.5) * geom.spacing;
        const bool window_is_whole_grid = i0 == 0 && j0 == 0 && i1 == geom.rows - 1 && j1 == geom.cols - 1;
        if (out.back().d2 <= certified * certified || window_is_whole_grid) return;
    }
}

}  // namespace

SplatResult splat_picks(const RadarPicks& picks, const GridGeometry& geom, int k_cells,
                        double radius_px) {
    if (picks.empty()) throw EmptyObservationsError("splat of an empty pick set");
    if (k_cells < 1) throw ParameterError("splat neighbor count must be >= 1");
    if (!(radius_px > 0.0)) throw ParameterError("splat radius must be positive");
    require_valid(geom);

    const double r = radius_px * geom.spacing;
    Array2d num = Array2d::Zero(geom.rows, geom.cols);
    Array2d den = Array2d::Zero(geom.rows, geom.cols);

    std::vector<CellDist> nearest;
    for (const Pick& p : picks.records) {
        k_nearest_cells(geom, p.x, p.y, k_cells, nearest);
        for (const CellDist& c : nearest) {
            const double w = std::exp(-c.d2 / (r * r));
            num(c.i, c.j) += w * p.bed;
            den(c.i, c.j) += w;
        }
    }

    Mask mask(geom, static_cast<std::uint8_t>(0));
    Array2d bed = Array2d::Zero(geom.rows, geom.cols);
    for (Eigen::Index i = 0; i < geom.rows; ++i)
        for (Eigen::Index j = 0; j < geom.cols; ++j)
            if (den(i, j) > 0.0) {
                mask(i, j) = 1;
                bed(i, j) = num(i, j) / den(i, j);
            }
    return SplatResult{Field(geom, std::move(bed)), std::move(mask)};
}

Field confidence_map(const Field& d_rad, double tau_px) {
    if (!(tau_px > 0.0)) throw ParameterError("confidence tau must be positive");
    return d_rad.with_values((-d_rad.values / tau_px).exp());
}

ObservationLayer ObservationLayer::empty(const GridGeometry& geom, double tau_px) {
    ObservationLayer obs;
    obs.mask = Mask(geom, static_cast<std::uint8_t>(0));
    obs.h_rad = Field(geom, 0.0);
    obs.d_rad = Field(geom, 1.0e30);
    obs.c = Field(geom, 0.0);
    obs.tau_px = tau_px;
    return obs;
}

ObservationLayer build_observation_layer(const RadarPicks& picks, const Field& surface,
                                         const ObservationParams& params) {
    SplatResult splat = splat_picks(picks, surface.geom, params.splat_k, params.splat_radius_px);
    ObservationLayer obs;
    obs.tau_px = params.tau_px;
    obs.h_rad = Field(surface.geom, Array2d::Zero(surface.geom.rows, surface.geom.cols));
    for (Eigen::Index i = 0; i < surface.rows(); ++i)
        for (Eigen::Index j = 0; j < surface.cols(); ++j)
            if (splat.mask(i, j)) obs.h_rad(i, j) = surface(i, j) - splat.bed(i, j);
    obs.d_rad = distance_transform(splat.mask);
    obs.c = confidence_map(obs.d_rad, params.tau_px);
    obs.mask = std::move(splat.mask);
    return obs;
}

NormStats residual_norm_stats(const ObservationLayer& obs, const Scene& scene, const Mask& region,
                              double sigma_floor) {
    require_same_shape(obs.mask.geom, scene.geom(), "residual_norm_stats");
    require_same_shape(region.geom, scene.geom(), "residual_norm_stats");
    if (!(sigma_floor > 0.0)) throw ParameterError("sigma floor must be positive");

    std::vector<double> res;
    for (Eigen::Index i = 0; i < region.rows(); ++i)
        for (Eigen::Index j = 0; j < region.cols(); ++j)
            if (obs.mask(i, j) && region(i, j)) res.push_back(obs.h_rad(i, j) - scene.h_p(i, j));
    if (res.empty()) throw EmptyObservationsError("no radar cells inside the normalization region");

    NormStats stats;
    stats.mu = median_inplace(res);
    for (double& v : res) v = std::abs(v - stats.mu);
    stats.sigma = std::max(sigma_floor, 1.4826 * median_inplace(res));
    return stats;
}

}  // namespace bedrecon
