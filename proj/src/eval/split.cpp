#include "bedrecon/eval/split.hpp"

namespace bedrecon {

BlockSplit block_split(const GridGeometry& geom, const SplitSpec& spec) {
    require_valid(geom);
    if (spec.delta_px < 0) throw ParameterError("split buffer must be nonnegative");

    const bool vertical = spec.axis == SplitAxis::Vertical;
    const Eigen::Index extent = vertical ? geom.cols : geom.rows;
    const Eigen::Index split = extent / 2;
    const Eigen::Index delta = spec.delta_px;

    const Eigen::Index train_end = split - delta;   // exclusive
    const Eigen::Index test_begin = split + delta;  // inclusive
    if (train_end <= 0 || test_begin >= extent)
        throw ParameterError("split buffer leaves an empty core");

    BlockSplit out;
    out.split_index = split;
    out.train_core = Mask(geom, static_cast<std::uint8_t>(0));
    out.test_core = Mask(geom, static_cast<std::uint8_t>(0));

    Eigen::Index lo_other = 0, hi_other = vertical ? geom.rows : geom.cols;
    Eigen::Index train_begin = 0, test_end = extent;
    if (spec.erode_all_boundaries) {
        lo_other += delta;
        hi_other -= delta;
        train_begin += delta;
        test_end -= delta;
        if (train_begin >= train_end || test_begin >= test_end || lo_other >= hi_other)
            throw ParameterError("split buffer leaves an empty core");
    }

    for (Eigen::Index a = lo_other; a < hi_other; ++a) {
        for (Eigen::Index t = train_begin; t < train_end; ++t)
            (vertical ? out.train_core(a, t) : out.train_core(t, a)) = 1;
        for (Eigen::Index t = test_begin; t < test_end; ++t)
            (vertical ? out.test_core(a, t) : out.test_core(t, a)) = 1;
    }
    return out;
}

LeakageReport check_tile_leakage(const std::vector<Tile>& tiles, const TileConfig& cfg,
                                 const Mask& train_core) {
    cfg.validate();
    const GridGeometry& geom = train_core.geom;

    LeakageReport report;
    report.tiles_checked = tiles.size();
    for (size_t ti = 0; ti < tiles.size(); ++ti) {
        const Tile& t = tiles[ti];
        const Eigen::Index r0 = t.row0 == 0 ? 0 : t.row0 + cfg.border;
        const Eigen::Index r1 = t.row0 + t.rows >= geom.rows ? geom.rows : t.row0 + t.rows - cfg.border;
        const Eigen::Index c0 = t.col0 == 0 ? 0 : t.col0 + cfg.border;
        const Eigen::Index c1 = t.col0 + t.cols >= geom.cols ? geom.cols : t.col0 + t.cols - cfg.border;
        bool inside = true;
        for (Eigen::Index i = r0; inside && i < r1; ++i)
            for (Eigen::Index j = c0; j < c1; ++j)
                if (!train_core(i, j)) {
                    inside = false;
                    break;
                }
        if (!inside) report.violators.push_back(ti);
    }
    return report;
}

}  // namespace bedrecon
