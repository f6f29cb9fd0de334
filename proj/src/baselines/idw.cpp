#include "bedrecon/baselines/idw.hpp"

#include <cmath>

#include "bedrecon/baselines/knn.hpp"

namespace bedrecon {

Field idw_interpolate(const RadarPicks& picks, const GridGeometry& geom, int k, double power) {
    if (picks.empty()) throw EmptyObservationsError("idw with no picks");
    if (k < 1) throw ParameterError("idw neighborhood must be >= 1");
    if (!(power > 0.0)) throw ParameterError("idw power must be positive");

    const PickIndex index(picks, geom);
    const double exact_hit = 0.5 * geom.spacing;

    Array2d out(geom.rows, geom.cols);
    std::vector<Neighbor> nn;
    for (Eigen::Index i = 0; i < geom.rows; ++i) {
        const double y = geom.cell_y(i);
        for (Eigen::Index j = 0; j < geom.cols; ++j) {
            const double x = geom.cell_x(j);
            index.nearest(x, y, k, nn);
            if (nn.front().d2 <= exact_hit * exact_hit) {
                out(i, j) = nn.front().pick->bed;
                continue;
            }
            double num = 0.0, den = 0.0;
            for (const Neighbor& n : nn) {
                const double w = std::pow(n.d2, -0.5 * power);
                num += w * n.pick->bed;
                den += w;
            }
            out(i, j) = num / den;
        }
    }
    return Field(geom, std::move(out));
}

}  // namespace bedrecon
