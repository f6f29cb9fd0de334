#pragma once

#include <utility>
#include <vector>

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

struct Pick {
    double x = 0.0;
    double y = 0.0;
    double bed = 0.0;
};

struct RadarPicks {
    std::vector<Pick> records;

    size_t count() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

struct PickClipResult {
    RadarPicks picks;
    size_t dropped = 0;
};

/// Drops picks outside the grid extent, reporting how many were removed.
PickClipResult clip_picks(const RadarPicks& picks, const GridGeometry& geom);

// Bundle of geophysical input fields on one grid. Prior thickness is always
// derived as surface minus prior bed, so the bundle cannot drift out of that
// identity.
struct Scene {
    Field s;        // surface elevation [m]
    VectorField v;  // surface velocity [m/yr]
    Field smb;      // surface mass balance [m/yr ice-eq]
    Field dhdt;     // thickness tendency [m/yr]
    Field b_p;      // prior bed [m]
    Field h_p;      // prior thickness, s - b_p [m]
    Mask valid;

    const GridGeometry& geom() const { return s.geom; }
};

inline Scene make_scene(Field s, VectorField v, Field smb, Field dhdt, Field b_p, Mask valid) {
    const GridGeometry& g = s.geom;
    if (!v.geom().same_grid(g) || !smb.geom.same_grid(g) || !dhdt.geom.same_grid(g) ||
        !b_p.geom.same_grid(g) || !valid.geom.same_grid(g))
        throw DimensionError("scene fields must share one grid");
    Field h_p = s.with_values(s.values - b_p.values);
    return Scene{std::move(s), std::move(v), std::move(smb), std::move(dhdt),
                 std::move(b_p), std::move(h_p), std::move(valid)};
}

inline PickClipResult clip_picks(const RadarPicks& picks, const GridGeometry& geom) {
    PickClipResult out;
    for (const Pick& p : picks.records) {
        if (geom.contains(p.x, p.y))
            out.picks.records.push_back(p);
        else
            ++out.dropped;
    }
    return out;
}

}  // namespace bedrecon
