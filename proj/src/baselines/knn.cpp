#include "bedrecon/baselines/knn.hpp"

#include <algorithm>
#include <cmath>

namespace bedrecon {

PickIndex::PickIndex(const RadarPicks& picks, const GridGeometry& geom)
    : picks_(&picks), geom_(geom) {
    require_valid(geom);
    buckets_.resize(static_cast<size_t>(geom.rows * geom.cols));
    for (size_t idx = 0; idx < picks.records.size(); ++idx) {
        const Pick& p = picks.records[idx];
        const auto [i, j] = geom.cell_of(p.x, p.y);
        buckets_[static_cast<size_t>(i * geom.cols + j)].push_back(static_cast<int>(idx));
    }
}

void PickIndex::nearest(double x, double y, int k, std::vector<Neighbor>& out) const {
    out.clear();
    if (k < 1) throw ParameterError("neighbor count must be >= 1");
    const size_t want = std::min<size_t>(static_cast<size_t>(k), picks_->records.size());
    if (want == 0) return;

    const auto [ci, cj] = geom_.cell_of(x, y);
    const auto max_radius = static_cast<Eigen::Index>(std::max(geom_.rows, geom_.cols));

    const auto scan_bucket = [&](Eigen::Index i, Eigen::Index j) {
        for (const int idx : buckets_[static_cast<size_t>(i * geom_.cols + j)]) {
            const Pick& p = picks_->records[static_cast<size_t>(idx)];
            const double dx = p.x - x, dy = p.y - y;
            out.push_back(Neighbor{dx * dx + dy * dy, &p});
        }
    };

    const auto order = [](const Neighbor& a, const Neighbor& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.pick->x != b.pick->x) return a.pick->x < b.pick->x;
        if (a.pick->y != b.pick->y) return a.pick->y < b.pick->y;
        return a.pick->bed < b.pick->bed;
    };

    for (Eigen::Index radius = 0; radius <= max_radius; ++radius) {
        // Scan the new ring at this radius.
        const Eigen::Index i0 = std::max<Eigen::Index>(0, ci - radius);
        const Eigen::Index i1 = std::min<Eigen::Index>(geom_.rows - 1, ci + radius);
        const Eigen::Index j0 = std::max<Eigen::Index>(0, cj - radius);
        const Eigen::Index j1 = std::min<Eigen::Index>(geom_.cols - 1, cj + radius);
        if (radius == 0) {
            scan_bucket(ci, cj);
        } else {
            for (Eigen::Index j = j0; j <= j1; ++j) {
                if (ci - radius >= 0) scan_bucket(ci - radius, j);
                if (ci + radius < geom_.rows) scan_bucket(ci + radius, j);
            }
            for (Eigen::Index i = std::max<Eigen::Index>(i0, ci - radius + 1);
                 i <= std::min<Eigen::Index>(i1, ci + radius - 1); ++i) {
                if (cj - radius >= 0) scan_bucket(i, cj - radius);
                if (cj + radius < geom_.cols) scan_bucket(i, cj + radius);
            }
        }

        if (out.size() >= want) {
            std::sort(out.begin(), out.end(), order);
            // Points in unscanned buckets are farther than radius*spacing away.
            const double certified = static_cast<double>(radius) * geom_.spacing;
            const bool whole_grid = i0 == 0 && j0 == 0 && i1 == geom_.rows - 1 && j1 == geom_.cols - 1;
            if (out[want - 1].d2 <= certified * certified || whole_grid) {
                out.resize(want);
                return;
            }
        }
    }
    std::sort(out.begin(), out.end(), order);
    if (out.size() > want) out.resize(want);
}

}  // namespace bedrecon
