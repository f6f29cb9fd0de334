#include "bedrecon/grid/filters.hpp"

#include <cmath>
#include <vector>

namespace bedrecon {

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0) throw ParameterError("gaussian kernel size must be odd and >= 1");
    if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
    const int m = size / 2;
    std::vector<double> k(static_cast<size_t>(size));
    double sum = 0.0;
    for (int t = -m; t <= m; ++t) {
        const double v = std::exp(-0.5 * (static_cast<double>(t) * t) / (sigma * sigma));
        k[static_cast<size_t>(t + m)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// Symmetric reflection (edge cell repeated), valid for any overhang.
Eigen::Index reflect(Eigen::Index q, Eigen::Index n) {
    const Eigen::Index period = 2 * n;
    q = ((q % period) + period) % period;
    return q < n ? q : period - 1 - q;
}

Array2d conv_rows(const Array2d& f, const std::vector<double>& k) {
    const Eigen::Index h = f.rows(), w = f.cols();
    const int m = static_cast<int>(k.size()) / 2;
    Array2d out = Array2d::Zero(h, w);
    for (int t = -m; t <= m; ++t) {
        const double kv = k[static_cast<size_t>(t + m)];
        for (Eigen::Index j = 0; j < w; ++j) out.col(j) += kv * f.col(reflect(j + t, w));
    }
    return out;
}

Array2d conv_cols(const Array2d& f, const std::vector<double>& k) {
    const Eigen::Index h = f.rows(), w = f.cols();
    const int m = static_cast<int>(k.size()) / 2;
    Array2d out = Array2d::Zero(h, w);
    for (int t = -m; t <= m; ++t) {
        const double kv = k[static_cast<size_t>(t + m)];
        for (Eigen::Index i = 0; i < h; ++i) out.row(i) += kv * f.row(reflect(i + t, h));
    }
    return out;
}

Array2d conv_rows_adjoint(const Array2d& co, const std::vector<double>& k) {
    const Eigen::Index h = co.rows(), w = co.cols();
    const int m = static_cast<int>(k.size()) / 2;
    Array2d out = Array2d::Zero(h, w);
    for (int t = -m; t <= m; ++t) {
        const double kv = k[static_cast<size_t>(t + m)];
        for (Eigen::Index j = 0; j < w; ++j) out.col(reflect(j + t, w)) += kv * co.col(j);
    }
    return out;
}

Array2d conv_cols_adjoint(const Array2d& co, const std::vector<double>& k) {
    const Eigen::Index h = co.rows(), w = co.cols();
    const int m = static_cast<int>(k.size()) / 2;
    Array2d out = Array2d::Zero(h, w);
    for (int t = -m; t <= m; ++t) {
        const double kv = k[static_cast<size_t>(t + m)];
        for (Eigen::Index i = 0; i < h; ++i) out.row(reflect(i + t, h)) += kv * co.row(i);
    }
    return out;
}

}  // namespace

Field gaussian_smooth(const Field& f, int size, double sigma) {
    const auto k = gaussian_kernel(size, sigma);
    if (size == 1) return f;
    return f.with_values(conv_cols(conv_rows(f.values, k), k));
}

Array2d gaussian_smooth_adjoint(const Array2d& co, int size, double sigma) {
    const auto k = gaussian_kernel(size, sigma);
    if (size == 1) return co;
    return conv_rows_adjoint(conv_cols_adjoint(co, k), k);
}

GridGeometry pooled_geometry(const GridGeometry& g, int k) {
    if (k <= 0) throw ParameterError("pooling factor must be positive");
    GridGeometry p = g;
    p.rows = (g.rows + k - 1) / k;
    p.cols = (g.cols + k - 1) / k;
    p.spacing = g.spacing * k;
    return p;
}

Field avg_pool(const Field& f, int k) {
    const GridGeometry pg = pooled_geometry(f.geom, k);
    if (k == 1) return Field(pg, f.values);
    Array2d out(pg.rows, pg.cols);
    for (Eigen::Index bi = 0; bi < pg.rows; ++bi) {
        const Eigen::Index i0 = bi * k;
        const Eigen::Index bh = std::min<Eigen::Index>(k, f.rows() - i0);
        for (Eigen::Index bj = 0; bj < pg.cols; ++bj) {
            const Eigen::Index j0 = bj * k;
            const Eigen::Index bw = std::min<Eigen::Index>(k, f.cols() - j0);
            out(bi, bj) = f.values.block(i0, j0, bh, bw).mean();
        }
    }
    Field pooled(pg, std::move(out));
    pooled.nodata = f.nodata;
    return pooled;
}

Array2d avg_pool_adjoint(const Array2d& co_pooled, const GridGeometry& fine, int k) {
    const GridGeometry pg = pooled_geometry(fine, k);
    if (co_pooled.rows() != pg.rows || co_pooled.cols() != pg.cols)
        throw DimensionError("pooled co-field does not match pooled shape");
    if (k == 1) return co_pooled;
    Array2d out(fine.rows, fine.cols);
    for (Eigen::Index bi = 0; bi < pg.rows; ++bi) {
        const Eigen::Index i0 = bi * k;
        const Eigen::Index bh = std::min<Eigen::Index>(k, fine.rows - i0);
        for (Eigen::Index bj = 0; bj < pg.cols; ++bj) {
            const Eigen::Index j0 = bj * k;
            const Eigen::Index bw = std::min<Eigen::Index>(k, fine.cols - j0);
            out.block(i0, j0, bh, bw).setConstant(co_pooled(bi, bj) / static_cast<double>(bh * bw));
        }
    }
    return out;
}

}  // namespace bedrecon
