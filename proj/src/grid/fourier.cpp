#include "bedrecon/grid/fourier.hpp"

#include <cmath>

namespace bedrecon {

std::vector<Field> fourier_coords(const GridGeometry& geom, int bands) {
    if (bands < 1) throw ParameterError("fourier bands must be >= 1");
    require_valid(geom);

    Eigen::ArrayXd xn(geom.cols), yn(geom.rows);
    for (Eigen::Index j = 0; j < geom.cols; ++j)
        xn(j) = geom.cols > 1 ? -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(geom.cols - 1) : 0.0;
    for (Eigen::Index i = 0; i < geom.rows; ++i)
        yn(i) = geom.rows > 1 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(geom.rows - 1) : 0.0;

    std::vector<Field> out;
    out.reserve(static_cast<size_t>(4 * bands));
    for (int l = 0; l < bands; ++l) {
        const double freq = std::ldexp(M_PI, l);  // 2^l * pi
        Array2d sx(geom.rows, geom.cols), cx(geom.rows, geom.cols);
        Array2d sy(geom.rows, geom.cols), cy(geom.rows, geom.cols);
        for (Eigen::Index i = 0; i < geom.rows; ++i) {
            const double sv = std::sin(freq * yn(i)), cv = std::cos(freq * yn(i));
            sy.row(i).setConstant(sv);
            cy.row(i).setConstant(cv);
        }
        for (Eigen::Index j = 0; j < geom.cols; ++j) {
            const double sv = std::sin(freq * xn(j)), cv = std::cos(freq * xn(j));
            sx.col(j).setConstant(sv);
            cx.col(j).setConstant(cv);
        }
        out.emplace_back(geom, std::move(sx));
        out.emplace_back(geom, std::move(cx));
        out.emplace_back(geom, std::move(sy));
        out.emplace_back(geom, std::move(cy));
    }
    return out;
}

}  // namespace bedrecon
