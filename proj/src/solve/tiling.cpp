#include "bedrecon/solve/tiling.hpp"

#include <atomic>
#include <thread>

#include "bedrecon/grid/distance.hpp"

namespace bedrecon {

void TileConfig::validate() const {
    if (patch < 1 || stride < 1) throw ParameterError("tile patch and stride must be >= 1");
    if (border < 0 || 2 * border >= patch)
        throw ParameterError("tile border must satisfy 0 <= 2*border < patch");
    if (stride > patch - 2 * border)
        throw ParameterError("stride must not exceed patch - 2*border, or cores leave gaps");
}

namespace {

std::vector<Eigen::Index> axis_origins(Eigen::Index extent, int patch, int stride) {
    std::vector<Eigen::Index> origins;
    if (extent <= patch) {
        origins.push_back(0);
        return origins;
    }
    for (Eigen::Index o = 0;; o += stride) {
        if (o + patch >= extent) {
            origins.push_back(extent - patch);
            break;
        }
        origins.push_back(o);
    }
    return origins;
}

Field crop(const Field& f, const Tile& t) {
    GridGeometry g = f.geom;
    g.rows = t.rows;
    g.cols = t.cols;
    g.x0 = f.geom.x0 + static_cast<double>(t.col0) * f.geom.spacing;
    g.y0 = f.geom.y0 + static_cast<double>(t.row0) * f.geom.spacing;
    return Field(g, f.values.block(t.row0, t.col0, t.rows, t.cols));
}

Mask crop(const Mask& m, const Tile& t) {
    GridGeometry g = m.geom;
    g.rows = t.rows;
    g.cols = t.cols;
    g.x0 = m.geom.x0 + static_cast<double>(t.col0) * m.geom.spacing;
    g.y0 = m.geom.y0 + static_cast<double>(t.row0) * m.geom.spacing;
    return Mask(g, m.values.block(t.row0, t.col0, t.rows, t.cols));
}

Eigen::Index reflect_index(Eigen::Index q, Eigen::Index n) {
    const Eigen::Index period = 2 * n;
    q = ((q % period) + period) % period;
    return q < n ? q : period - 1 - q;
}

template <typename Scalar>
Array2<Scalar> pad_reflect(const Array2<Scalar>& a, Eigen::Index rows, Eigen::Index cols) {
    Array2<Scalar> out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = a(reflect_index(i, a.rows()), reflect_index(j, a.cols()));
    return out;
}

template <typename Scalar>
Array2<Scalar> pad_zero(const Array2<Scalar>& a, Eigen::Index rows, Eigen::Index cols) {
    Array2<Scalar> out = Array2<Scalar>::Zero(rows, cols);
    out.topLeftCorner(a.rows(), a.cols()) = a;
    return out;
}

}  // namespace

std::vector<Tile> make_tiles(const GridGeometry& geom, const TileConfig& cfg) {
    cfg.validate();
    require_valid(geom);
    const auto row_origins = axis_origins(geom.rows, cfg.patch, cfg.stride);
    const auto col_origins = axis_origins(geom.cols, cfg.patch, cfg.stride);

    std::vector<Tile> tiles;
    tiles.reserve(row_origins.size() * col_origins.size());
    for (const Eigen::Index r0 : row_origins)
        for (const Eigen::Index c0 : col_origins) {
            Tile t;
            t.row0 = r0;
            t.col0 = c0;
            t.rows = std::min<Eigen::Index>(cfg.patch, geom.rows - r0);
            t.cols = std::min<Eigen::Index>(cfg.patch, geom.cols - c0);
            // Core: inset by the border except where the tile touches the grid edge.
            t.core_r0 = r0 == 0 ? 0 : r0 + cfg.border;
            t.core_r1 = r0 + t.rows == geom.rows ? geom.rows : r0 + t.rows - cfg.border;
            t.core_c0 = c0 == 0 ? 0 : c0 + cfg.border;
            t.core_c1 = c0 + t.cols == geom.cols ? geom.cols : c0 + t.cols - cfg.border;
            tiles.push_back(t);
        }
    return tiles;
}

std::vector<Tile> tiles_for_region(const GridGeometry& geom, const TileConfig& cfg,
                                   const Mask& region) {
    require_same_shape(geom, region.geom, "tiles_for_region");
    std::vector<Tile> out;
    for (const Tile& t : make_tiles(geom, cfg)) {
        bool inside = true;
        for (Eigen::Index i = t.core_r0; inside && i < t.core_r1; ++i)
            for (Eigen::Index j = t.core_c0; j < t.core_c1; ++j)
                if (!region(i, j)) {
                    inside = false;
                    break;
                }
        if (inside) out.push_back(t);
    }
    return out;
}

Array2<int> core_coverage(const GridGeometry& geom, const std::vector<Tile>& tiles) {
    Array2<int> count = Array2<int>::Zero(geom.rows, geom.cols);
    for (const Tile& t : tiles)
        count.block(t.core_r0, t.core_c0, t.core_r1 - t.core_r0, t.core_c1 - t.core_c0) += 1;
    return count;
}

TiledSolveResult solve_tiled(const Scene& scene, const ObservationLayer& obs, const NormStats& norm,
                             const LossConfig& loss_cfg, const Schedule& sched,
                             const SolverConfig& solver_cfg, const TileConfig& tile_cfg,
                             const Mask& region, const Mask& monitor_region, int jobs) {
    const GridGeometry& geom = scene.geom();
    const std::vector<Tile> tiles = make_tiles(geom, tile_cfg);

    std::vector<Field> tile_rhat(tiles.size());
    std::atomic<size_t> next{0};

    auto solve_one = [&](size_t ti) {
        const Tile& t = tiles[ti];
        Field s = crop(scene.s, t);
        Field vx = crop(scene.v.x, t), vy = crop(scene.v.y, t);
        Field smb = crop(scene.smb, t), dhdt = crop(scene.dhdt, t), b_p = crop(scene.b_p, t);
        Mask valid = crop(scene.valid, t);
        Mask mask = crop(obs.mask, t);
        Field h_rad = crop(obs.h_rad, t);
        Mask reg = crop(region, t);
        Mask mon = crop(monitor_region, t);

        GridGeometry local = s.geom;
        const Eigen::Index pr = std::max<Eigen::Index>(t.rows, tile_cfg.patch);
        const Eigen::Index pc = std::max<Eigen::Index>(t.cols, tile_cfg.patch);
        if (pr != t.rows || pc != t.cols) {
            // Undersized grid: reflect-pad the physical fields; padded cells carry
            // no observations and stay frozen.
            local.rows = pr;
            local.cols = pc;
            s = Field(local, pad_reflect(s.values, pr, pc));
            vx = Field(local, pad_reflect(vx.values, pr, pc));
            vy = Field(local, pad_reflect(vy.values, pr, pc));
            smb = Field(local, pad_reflect(smb.values, pr, pc));
            dhdt = Field(local, pad_reflect(dhdt.values, pr, pc));
            b_p = Field(local, pad_reflect(b_p.values, pr, pc));
            valid = Mask(local, pad_reflect(valid.values, pr, pc));
            mask = Mask(local, pad_zero(mask.values, pr, pc));
            h_rad = Field(local, pad_zero(h_rad.values, pr, pc));
            reg = Mask(local, pad_zero(reg.values, pr, pc));
            mon = Mask(local, pad_zero(mon.values, pr, pc));
        }

        ObservationLayer local_obs;
        local_obs.tau_px = obs.tau_px;
        local_obs.mask = mask;
        local_obs.h_rad = h_rad;
        if (count_true(mask) > 0) {
            local_obs.d_rad = distance_transform(mask);
            local_obs.c = confidence_map(local_obs.d_rad, obs.tau_px);
        } else {
            local_obs.d_rad = Field(local, 1.0e30);
            local_obs.c = Field(local, 0.0);
        }

        Scene local_scene = make_scene(std::move(s), VectorField(std::move(vx), std::move(vy)),
                                       std::move(smb), std::move(dhdt), std::move(b_p), std::move(valid));
        SolveResult r = solve_variational(local_scene, local_obs, norm, loss_cfg, sched, solver_cfg,
                                          reg, mon);
        tile_rhat[ti] = std::move(r.state.r_hat);
    };

    const int workers = std::max(1, jobs);
    if (workers == 1 || tiles.size() <= 1) {
        for (size_t ti = 0; ti < tiles.size(); ++ti) solve_one(ti);
    } else {
        std::vector<std::thread> pool;
        for (int wkr = 0; wkr < workers; ++wkr)
            pool.emplace_back([&]() {
                for (size_t ti = next.fetch_add(1); ti < tiles.size(); ti = next.fetch_add(1))
                    solve_one(ti);
            });
        for (auto& th : pool) th.join();
    }

    // Accumulate cores in canonical tile order; sum/count is independent of
    // which thread solved what.
    Array2d sum = Array2d::Zero(geom.rows, geom.cols);
    Array2<int> count = core_coverage(geom, tiles);
    for (size_t ti = 0; ti < tiles.size(); ++ti) {
        const Tile& t = tiles[ti];
        sum.block(t.core_r0, t.core_c0, t.core_r1 - t.core_r0, t.core_c1 - t.core_c0) +=
            tile_rhat[ti].values.block(t.core_r0 - t.row0, t.core_c0 - t.col0,
                                       t.core_r1 - t.core_r0, t.core_c1 - t.core_c0);
    }
    if ((count < 1).any()) throw std::runtime_error("tile layout left cells uncovered");
    const Array2d r_hat = sum / count.cast<double>();

    return TiledSolveResult{ReconState{Field(geom, r_hat), norm}, tiles};
}

}  // namespace bedrecon
