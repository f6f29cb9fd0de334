#include "bedrecon/baselines/kriging.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "bedrecon/baselines/knn.hpp"

namespace bedrecon {

namespace {

struct SolveOutcome {
    Eigen::VectorXd w;
    bool ok = false;
};

SolveOutcome solve_weights(const Eigen::MatrixXd& k_mat, const Eigen::VectorXd& c_vec,
                           KrigingMode mode) {
    SolveOutcome out;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(k_mat);
    if (ldlt.info() != Eigen::Success) return out;

    if (mode == KrigingMode::Simple) {
        out.w = ldlt.solve(c_vec);
        const double rel = (k_mat * out.w - c_vec).norm() / std::max(1.0, c_vec.norm());
        out.ok = out.w.allFinite() && rel < 1.0e-8;
        return out;
    }

    // Ordinary mode via reduction of the Lagrange system: w = K^-1 (c - mu*1),
    // mu = (1^T K^-1 c - 1) / (1^T K^-1 1); the weights then sum to one.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k_mat.rows());
    const Eigen::VectorXd kc = ldlt.solve(c_vec);
    const Eigen::VectorXd k1 = ldlt.solve(ones);
    const double denom = ones.dot(k1);
    if (!std::isfinite(denom) || std::abs(denom) < 1.0e-14) return out;
    const double mu = (ones.dot(kc) - 1.0) / denom;
    out.w = kc - mu * k1;
    const double rel = (k_mat * out.w + mu * ones - c_vec).norm() / std::max(1.0, c_vec.norm());
    out.ok = out.w.allFinite() && rel < 1.0e-8;
    return out;
}

}  // namespace

KrigingResult krige_residual(const RadarPicks& picks, const Field& prior_bed,
                             const KrigingParams& params) {
    if (picks.empty()) throw EmptyObservationsError("kriging with no picks");
    if (params.k < 1) throw ParameterError("kriging neighborhood must be >= 1");
    const GridGeometry& geom = prior_bed.geom;

    // Residuals relative to the prior at the pick's containing cell.
    RadarPicks residuals = picks;
    for (Pick& p : residuals.records) {
        const auto [i, j] = geom.cell_of(p.x, p.y);
        p.bed -= prior_bed(i, j);
    }

    double max_lag = params.max_lag;
    if (!(max_lag > 0.0)) {
        double xlo = residuals.records[0].x, xhi = xlo;
        double ylo = residuals.records[0].y, yhi = ylo;
        for (const Pick& p : residuals.records) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
        max_lag = 0.5 * std::hypot(xhi - xlo, yhi - ylo);
        if (!(max_lag > 0.0)) max_lag = geom.spacing;
    }

    KrigingResult result;
    result.model = params.fixed_model
                       ? *params.fixed_model
                       : fit_exponential_variogram(
                             empirical_variogram(residuals, params.variogram_bins, max_lag));
    const VariogramModel& model = result.model;

    const PickIndex index(residuals, geom);
    const double jitter = 1.0e-8 * (model.sill + model.nugget);

    Array2d bed(geom.rows, geom.cols);
    std::vector<Neighbor> nn;
    for (Eigen::Index i = 0; i < geom.rows; ++i) {
        const double y = geom.cell_y(i);
        for (Eigen::Index j = 0; j < geom.cols; ++j) {
            const double x = geom.cell_x(j);
            index.nearest(x, y, params.k, nn);
            const auto n = static_cast<Eigen::Index>(nn.size());

            Eigen::MatrixXd k_mat(n, n);
            Eigen::VectorXd c_vec(n), r_vec(n);
            for (Eigen::Index a = 0; a < n; ++a) {
                const Pick& pa = *nn[static_cast<size_t>(a)].pick;
                r_vec(a) = pa.bed;
                c_vec(a) = model.cov(std::sqrt(nn[static_cast<size_t>(a)].d2));
                k_mat(a, a) = model.cov(0.0);
                for (Eigen::Index b = a + 1; b < n; ++b) {
                    const Pick& pb = *nn[static_cast<size_t>(b)].pick;
                    const double d = std::hypot(pa.x - pb.x, pa.y - pb.y);
                    k_mat(a, b) = k_mat(b, a) = model.cov(d);
                }
            }

            SolveOutcome s = solve_weights(k_mat, c_vec, params.mode);
            if (!s.ok) {
                k_mat.diagonal().array() += jitter;
                s = solve_weights(k_mat, c_vec, params.mode);
            }
            if (s.ok) {
                bed(i, j) = prior_bed(i, j) + s.w.dot(r_vec);
            } else {
                // Singular even with jitter: fall back to IDW of the residuals.
                double num = 0.0, den = 0.0;
                bool hit = false;
                for (const Neighbor& nb : nn) {
                    if (nb.d2 == 0.0) {
                        bed(i, j) = prior_bed(i, j) + nb.pick->bed;
                        hit = true;
                        break;
                    }
                    const double wgt = 1.0 / nb.d2;
                    num += wgt * nb.pick->bed;
                    den += wgt;
                }
                if (!hit) bed(i, j) = prior_bed(i, j) + num / den;
                ++result.fallback_cells;
            }
        }
    }

    result.bed = Field(geom, std::move(bed));
    return result;
}

}  // namespace bedrecon
