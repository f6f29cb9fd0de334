#pragma once

#include <vector>

#include "bedrecon/solve/solver.hpp"

namespace bedrecon {

struct TileConfig {
    int patch = 256;
    int stride = 64;
    int border = 96;  // core inset in pixels

    void validate() const;
};

// One tile of the sliding layout. The core is the half-open region this tile
// contributes to the canvas: inset by `border`, except along grid edges where
// it extends to the tile boundary so every cell is covered.
struct Tile {
    Eigen::Index row0 = 0, col0 = 0;
    Eigen::Index rows = 0, cols = 0;
    Eigen::Index core_r0 = 0, core_r1 = 0;
    Eigen::Index core_c0 = 0, core_c1 = 0;
};

std::vector<Tile> make_tiles(const GridGeometry& geom, const TileConfig& cfg);

/// Tiles of the sliding layout whose core lies fully inside `region`.
std::vector<Tile> tiles_for_region(const GridGeometry& geom, const TileConfig& cfg,
                                   const Mask& region);

/// Number of tile cores covering each cell of the layout.
Array2<int> core_coverage(const GridGeometry& geom, const std::vector<Tile>& tiles);

struct TiledSolveResult {
    ReconState state;
    std::vector<Tile> tiles;
};

/// Solves overlapping tiles independently (each with a locally rebuilt
/// observation layer) and averages the cores into one canvas. Tile results
/// are accumulated in canonical order regardless of solve order, so the
/// output does not depend on scheduling. Grids smaller than the patch are
/// solved as a single reflect-padded tile.
TiledSolveResult solve_tiled(const Scene& scene, const ObservationLayer& obs, const NormStats& norm,
                             const LossConfig& loss_cfg, const Schedule& sched,
                             const SolverConfig& solver_cfg, const TileConfig& tile_cfg,
                             const Mask& region, const Mask& monitor_region, int jobs = 1);

}  // namespace bedrecon
