#pragma once

#include <vector>

#include "bedrecon/grid/raster.hpp"
#include "bedrecon/solve/tiling.hpp"

namespace bedrecon {

enum class SplitAxis { Vertical, Horizontal };

struct SplitSpec {
    SplitAxis axis = SplitAxis::Vertical;
    int delta_px = 96;
    // Default erodes from the split line only; set to also erode from the
    // outer image boundary.
    bool erode_all_boundaries = false;
};

struct BlockSplit {
    Mask train_core;
    Mask test_core;
    Eigen::Index split_index = 0;  // first column/row of the test block
};

/// Median-coordinate block split with a delta-pixel safety buffer. Vertical
/// splits train west / test east; horizontal splits train south / test north.
BlockSplit block_split(const GridGeometry& geom, const SplitSpec& spec);

struct LeakageReport {
    std::vector<size_t> violators;  // indices into the checked tile list
    size_t tiles_checked = 0;
    bool ok() const { return violators.empty(); }
};

/// Verifies that every tile's core (recomputed from the tile origin and the
/// border rule) lies fully inside the training core.
LeakageReport check_tile_leakage(const std::vector<Tile>& tiles, const TileConfig& cfg,
                                 const Mask& train_core);

}  // namespace bedrecon
