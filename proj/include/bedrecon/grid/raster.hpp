#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <utility>

#include "bedrecon/core/errors.hpp"

namespace bedrecon {

template <typename Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Array2d = Array2<double>;
using Array2b = Array2<std::uint8_t>;

// Uniform raster geometry. (x0, y0) is the lower-left corner of the
// lower-left cell; cell centers sit half a spacing in. Row index grows
// northward (y up), column index grows eastward (x right).
struct GridGeometry {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    double spacing = 1.0;
    double x0 = 0.0;
    double y0 = 0.0;

    Eigen::Index size() const { return rows * cols; }

    double cell_x(Eigen::Index j) const { return x0 + (static_cast<double>(j) + 0.5) * spacing; }
    double cell_y(Eigen::Index i) const { return y0 + (static_cast<double>(i) + 0.5) * spacing; }

    // Index of the cell containing (x, y), clamped into the grid.
    std::pair<Eigen::Index, Eigen::Index> cell_of(double x, double y) const {
        auto clamp = [](Eigen::Index v, Eigen::Index n) {
            return v < 0 ? 0 : (v >= n ? n - 1 : v);
        };
        const auto i = static_cast<Eigen::Index>(std::floor((y - y0) / spacing));
        const auto j = static_cast<Eigen::Index>(std::floor((x - x0) / spacing));
        return {clamp(i, rows), clamp(j, cols)};
    }

    bool contains(double x, double y) const {
        return x >= x0 && x <= x0 + static_cast<double>(cols) * spacing && y >= y0 &&
               y <= y0 + static_cast<double>(rows) * spacing;
    }

    bool same_shape(const GridGeometry& o) const { return rows == o.rows && cols == o.cols; }

    bool same_grid(const GridGeometry& o) const {
        return same_shape(o) && spacing == o.spacing && x0 == o.x0 && y0 == o.y0;
    }
};

inline void require_valid(const GridGeometry& g) {
    if (g.rows < 1 || g.cols < 1) throw DimensionError("raster must have at least one cell");
    if (!(g.spacing > 0.0)) throw ParameterError("raster spacing must be positive");
}

// Dense scalar field on a uniform grid. Values are stored row-major; the
// nodata sentinel marks cells to exclude from the valid mask.
template <typename Scalar>
struct Raster {
    GridGeometry geom;
    Array2<Scalar> values;
    std::optional<double> nodata;

    Raster() = default;

    Raster(GridGeometry g, Scalar fill) : geom(g) {
        require_valid(geom);
        values = Array2<Scalar>::Constant(geom.rows, geom.cols, fill);
    }

    Raster(GridGeometry g, Array2<Scalar> v) : geom(g), values(std::move(v)) {
        require_valid(geom);
        if (values.rows() != geom.rows || values.cols() != geom.cols)
            throw DimensionError("raster values do not match geometry shape");
    }

    Eigen::Index rows() const { return geom.rows; }
    Eigen::Index cols() const { return geom.cols; }

    Scalar& operator()(Eigen::Index i, Eigen::Index j) { return values(i, j); }
    Scalar operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }

    Raster with_values(Array2<Scalar> v) const {
        Raster out(geom, std::move(v));
        out.nodata = nodata;
        return out;
    }
};

using Field = Raster<double>;
using Mask = Raster<std::uint8_t>;

inline void require_same_shape(const GridGeometry& a, const GridGeometry& b, const char* what) {
    if (!a.same_shape(b)) throw DimensionError(std::string("shape mismatch in ") + what);
}

inline Eigen::Index count_true(const Mask& m) {
    return (m.values != static_cast<std::uint8_t>(0)).count();
}

inline Mask full_mask(const GridGeometry& g, bool value = true) {
    return Mask(g, static_cast<std::uint8_t>(value ? 1 : 0));
}

// Two-component field (x east, y north) sharing one geometry.
struct VectorField {
    Field x;
    Field y;

    VectorField() = default;
    VectorField(Field fx, Field fy) : x(std::move(fx)), y(std::move(fy)) {
        if (!x.geom.same_grid(y.geom)) throw DimensionError("vector field components disagree on geometry");
    }

    const GridGeometry& geom() const { return x.geom; }
};

}  // namespace bedrecon
