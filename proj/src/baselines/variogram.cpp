#include "bedrecon/baselines/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bedrecon {

double VariogramModel::gamma(double d) const {
    if (d <= 0.0) return 0.0;
    return nugget + sill * (1.0 - std::exp(-d / range));
}

std::vector<VariogramPoint> empirical_variogram(const RadarPicks& residuals, int bins,
                                                double max_lag) {
    if (residuals.count() < 2) throw InsufficientDataError("semivariogram needs at least two picks");
    if (bins < 1) throw ParameterError("semivariogram needs at least one bin");
    if (!(max_lag > 0.0)) throw ParameterError("semivariogram max lag must be positive");

    const double width = max_lag / static_cast<double>(bins);
    std::vector<double> root_sum(static_cast<size_t>(bins), 0.0);
    std::vector<double> lag_sum(static_cast<size_t>(bins), 0.0);
    std::vector<long> counts(static_cast<size_t>(bins), 0);

    const auto& r = residuals.records;
    for (size_t a = 0; a < r.size(); ++a)
        for (size_t b = a + 1; b < r.size(); ++b) {
            const double dx = r[a].x - r[b].x, dy = r[a].y - r[b].y;
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d >= max_lag) continue;
            const auto bin = static_cast<size_t>(d / width);
            root_sum[bin] += std::sqrt(std::abs(r[a].bed - r[b].bed));
            lag_sum[bin] += d;
            counts[bin] += 1;
        }

    std::vector<VariogramPoint> out;
    for (size_t bin = 0; bin < counts.size(); ++bin) {
        if (counts[bin] == 0) continue;
        const auto n = static_cast<double>(counts[bin]);
        const double m = root_sum[bin] / n;
        VariogramPoint p;
        p.lag = lag_sum[bin] / n;
        p.gamma = m * m * m * m / (0.914 + 0.988 / n);  // Cressie-Hawkins
        p.pairs = counts[bin];
        out.push_back(p);
    }
    return out;
}

double variogram_wls(const VariogramModel& model, const std::vector<VariogramPoint>& points) {
    double obj = 0.0;
    for (const VariogramPoint& p : points) {
        const double g = std::max(model.gamma(p.lag), 1.0e-12);
        const double r = p.gamma - g;
        obj += static_cast<double>(p.pairs) * r * r / (g * g);
    }
    return obj;
}

namespace {

// Golden-section minimization of a unimodal slice.
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 60) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace

VariogramModel fit_variogram_from(const VariogramModel& start,
                                  const std::vector<VariogramPoint>& points) {
    double gmax = 0.0, lag_max = 0.0;
    for (const VariogramPoint& p : points) {
        gmax = std::max(gmax, p.gamma);
        lag_max = std::max(lag_max, p.lag);
    }
    const double sill_hi = std::max(2.0 * gmax, 1.0e-9);
    const double range_lo = std::max(lag_max * 1.0e-3, 1.0e-9);
    const double range_hi = 4.0 * std::max(lag_max, 1.0e-9);

    VariogramModel m = start;
    double best = variogram_wls(m, points);
    for (int sweep = 0; sweep < 40; ++sweep) {
        m.nugget = golden_min(
            [&](double x) {
                VariogramModel t = m;
                t.nugget = x;
                return variogram_wls(t, points);
            },
            0.0, sill_hi);
        m.sill = golden_min(
            [&](double x) {
                VariogramModel t = m;
                t.sill = x;
                return variogram_wls(t, points);
            },
            1.0e-9, sill_hi);
        m.range = golden_min(
            [&](double x) {
                VariogramModel t = m;
                t.range = x;
                return variogram_wls(t, points);
            },
            range_lo, range_hi);
        const double obj = variogram_wls(m, points);
        if (best - obj < 1.0e-14 * (1.0 + best)) {
            best = obj;
            break;
        }
        best = obj;
    }
    return m;
}

VariogramModel fit_exponential_variogram(const std::vector<VariogramPoint>& points) {
    if (points.size() < 3) throw InsufficientDataError("variogram fit needs at least three bins");

    double gmax = 0.0, lag_max = 0.0;
    for (const VariogramPoint& p : points) {
        gmax = std::max(gmax, p.gamma);
        lag_max = std::max(lag_max, p.lag);
    }
    if (!(gmax > 0.0)) {
        VariogramModel flat;
        flat.nugget = 0.0;
        flat.sill = 1.0e-12;
        flat.range = std::max(lag_max, 1.0);
        flat.degenerate = true;
        return flat;
    }

    VariogramModel best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (const double n0 : {0.0, 0.25 * gmax})
        for (const double s0 : {0.5 * gmax, gmax})
            for (const double r0 : {0.1 * lag_max, 0.3 * lag_max, lag_max}) {
                VariogramModel start;
                start.nugget = n0;
                start.sill = s0;
                start.range = r0;
                const VariogramModel fit = fit_variogram_from(start, points);
                const double obj = variogram_wls(fit, points);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = fit;
                }
            }
    return best;
}

}  // namespace bedrecon
