#include "bedrecon/grid/stencils.hpp"

namespace bedrecon {

namespace {

void require_stencil_size(const GridGeometry& g) {
    if (g.rows < 3 || g.cols < 3) throw DimensionError("stencil operators need a grid of at least 3x3");
}

// d/dx along columns: central interior, one-sided at the first/last column.
Array2d ddx(const Array2d& f, double spacing) {
    const Eigen::Index h = f.rows(), w = f.cols();
    Array2d g(h, w);
    g.col(0) = (f.col(1) - f.col(0)) / spacing;
    g.col(w - 1) = (f.col(w - 1) - f.col(w - 2)) / spacing;
    g.middleCols(1, w - 2) = (f.rightCols(w - 2) - f.leftCols(w - 2)) / (2.0 * spacing);
    return g;
}

Array2d ddy(const Array2d& f, double spacing) {
    const Eigen::Index h = f.rows(), w = f.cols();
    Array2d g(h, w);
    g.row(0) = (f.row(1) - f.row(0)) / spacing;
    g.row(h - 1) = (f.row(h - 1) - f.row(h - 2)) / spacing;
    g.middleRows(1, h - 2) = (f.bottomRows(h - 2) - f.topRows(h - 2)) / (2.0 * spacing);
    return g;
}

Array2d ddx_adjoint(const Array2d& co, double spacing) {
    const Eigen::Index h = co.rows(), w = co.cols();
    Array2d out = Array2d::Zero(h, w);
    out.col(1) += co.col(0) / spacing;
    out.col(0) -= co.col(0) / spacing;
    out.col(w - 1) += co.col(w - 1) / spacing;
    out.col(w - 2) -= co.col(w - 1) / spacing;
    out.rightCols(w - 2) += co.middleCols(1, w - 2) / (2.0 * spacing);
    out.leftCols(w - 2) -= co.middleCols(1, w - 2) / (2.0 * spacing);
    return out;
}

Array2d ddy_adjoint(const Array2d& co, double spacing) {
    const Eigen::Index h = co.rows(), w = co.cols();
    Array2d out = Array2d::Zero(h, w);
    out.row(1) += co.row(0) / spacing;
    out.row(0) -= co.row(0) / spacing;
    out.row(h - 1) += co.row(h - 1) / spacing;
    out.row(h - 2) -= co.row(h - 1) / spacing;
    out.bottomRows(h - 2) += co.middleRows(1, h - 2) / (2.0 * spacing);
    out.topRows(h - 2) -= co.middleRows(1, h - 2) / (2.0 * spacing);
    return out;
}

}  // namespace

VectorField gradient(const Field& f) {
    require_stencil_size(f.geom);
    return VectorField(f.with_values(ddx(f.values, f.geom.spacing)),
                       f.with_values(ddy(f.values, f.geom.spacing)));
}

Array2d gradient_adjoint(const GridGeometry& geom, const Array2d& co_gx, const Array2d& co_gy) {
    require_stencil_size(geom);
    return ddx_adjoint(co_gx, geom.spacing) + ddy_adjoint(co_gy, geom.spacing);
}

Field divergence(const VectorField& f) {
    require_stencil_size(f.geom());
    const double spacing = f.geom().spacing;
    return f.x.with_values(ddx(f.x.values, spacing) + ddy(f.y.values, spacing));
}

std::pair<Array2d, Array2d> divergence_adjoint(const GridGeometry& geom, const Array2d& co_div) {
    require_stencil_size(geom);
    return {ddx_adjoint(co_div, geom.spacing), ddy_adjoint(co_div, geom.spacing)};
}

Field laplacian(const Field& f) {
    require_stencil_size(f.geom);
    const Eigen::Index h = f.rows(), w = f.cols();
    const Array2d& v = f.values;
    Array2d out(h, w);

    // 4*center minus the 4-neighborhood, edges reflected (edge cell repeated).
    for (Eigen::Index i = 0; i < h; ++i) {
        const Eigen::Index iu = i > 0 ? i - 1 : 0;
        const Eigen::Index id = i < h - 1 ? i + 1 : h - 1;
        for (Eigen::Index j = 0; j < w; ++j) {
            const Eigen::Index jl = j > 0 ? j - 1 : 0;
            const Eigen::Index jr = j < w - 1 ? j + 1 : w - 1;
            out(i, j) = 4.0 * v(i, j) - v(iu, j) - v(id, j) - v(i, jl) - v(i, jr);
        }
    }
    return f.with_values(std::move(out));
}

Array2d laplacian_adjoint(const GridGeometry& geom, const Array2d& co_out) {
    require_stencil_size(geom);
    const Eigen::Index h = co_out.rows(), w = co_out.cols();
    Array2d out = Array2d::Zero(h, w);
    for (Eigen::Index i = 0; i < h; ++i) {
        const Eigen::Index iu = i > 0 ? i - 1 : 0;
        const Eigen::Index id = i < h - 1 ? i + 1 : h - 1;
        for (Eigen::Index j = 0; j < w; ++j) {
            const Eigen::Index jl = j > 0 ? j - 1 : 0;
            const Eigen::Index jr = j < w - 1 ? j + 1 : w - 1;
            const double c = co_out(i, j);
            out(i, j) += 4.0 * c;
            out(iu, j) -= c;
            out(id, j) -= c;
            out(i, jl) -= c;
            out(i, jr) -= c;
        }
    }
    return out;
}

}  // namespace bedrecon
