#pragma once

#include <vector>

#include "bedrecon/data/scene.hpp"

namespace bedrecon {

struct Neighbor {
    double d2 = 0.0;
    const Pick* pick = nullptr;
};

// Exact k-nearest-pick queries over a cell-bucketed index. Results are sorted
// by (distance, x, y, bed), so they do not depend on the order picks were
// supplied in.
class PickIndex {
  public:
    PickIndex(const RadarPicks& picks, const GridGeometry& geom);

    void nearest(double x, double y, int k, std::vector<Neighbor>& out) const;

    size_t size() const { return picks_->records.size(); }

  private:
    const RadarPicks* picks_;
    GridGeometry geom_;
    std::vector<std::vector<int>> buckets_;  // rows*cols cell buckets
};

}  // namespace bedrecon
