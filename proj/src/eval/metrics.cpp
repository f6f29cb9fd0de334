#include "bedrecon/eval/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bedrecon {

namespace {

double core_range(const Field& ref, const Mask& core) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ref.rows(); ++i)
        for (Eigen::Index j = 0; j < ref.cols(); ++j)
            if (core(i, j)) {
                lo = std::min(lo, ref(i, j));
                hi = std::max(hi, ref(i, j));
            }
    return hi - lo;
}

}  // namespace

PixelMetrics pixel_metrics(const Field& pred, const Field& ref, const Mask& core) {
    require_same_shape(pred.geom, ref.geom, "pixel_metrics");
    require_same_shape(pred.geom, core.geom, "pixel_metrics");

    PixelMetrics out;
    double abs_sum = 0.0, sq_sum = 0.0, ref_sum = 0.0;
    for (Eigen::Index i = 0; i < pred.rows(); ++i)
        for (Eigen::Index j = 0; j < pred.cols(); ++j)
            if (core(i, j)) {
                const double e = pred(i, j) - ref(i, j);
                abs_sum += std::abs(e);
                sq_sum += e * e;
                ref_sum += ref(i, j);
                ++out.count;
            }
    if (out.count == 0) throw InsufficientDataError("metrics over an empty core");

    const auto n = static_cast<double>(out.count);
    out.mae = abs_sum / n;
    out.rmse = std::sqrt(sq_sum / n);

    const double ref_mean = ref_sum / n;
    double ss_tot = 0.0;
    for (Eigen::Index i = 0; i < pred.rows(); ++i)
        for (Eigen::Index j = 0; j < pred.cols(); ++j)
            if (core(i, j)) {
                const double d = ref(i, j) - ref_mean;
                ss_tot += d * d;
            }
    if (ss_tot > 0.0) {
        out.r2 = 1.0 - sq_sum / ss_tot;
    } else {
        out.r2 = std::numeric_limits<double>::quiet_NaN();
        out.r2_defined = false;
    }
    return out;
}

double ssim(const Field& pred, const Field& ref, const Mask& core, int window, double window_sigma,
            double k1, double k2) {
    require_same_shape(pred.geom, ref.geom, "ssim");
    require_same_shape(pred.geom, core.geom, "ssim");
    if (window < 1 || window % 2 == 0) throw ParameterError("ssim window must be odd and >= 1");

    const int m = window / 2;
    // Normalized Gaussian window.
    Array2d wgt(window, window);
    for (int a = -m; a <= m; ++a)
        for (int b = -m; b <= m; ++b)
            wgt(a + m, b + m) = std::exp(-0.5 * (a * a + b * b) / (window_sigma * window_sigma));
    wgt /= wgt.sum();

    const double range = core_range(ref, core);
    const double c1 = (k1 * range) * (k1 * range);
    const double c2 = (k2 * range) * (k2 * range);

    double sum = 0.0;
    long windows = 0;
    for (Eigen::Index i = m; i < pred.rows() - m; ++i)
        for (Eigen::Index j = m; j < pred.cols() - m; ++j) {
            bool inside = true;
            for (Eigen::Index a = i - m; inside && a <= i + m; ++a)
                for (Eigen::Index b = j - m; b <= j + m; ++b)
                    if (!core(a, b)) {
                        inside = false;
                        break;
                    }
            if (!inside) continue;

            double mu_p = 0.0, mu_r = 0.0, pp = 0.0, rr = 0.0, pr = 0.0;
            for (int a = -m; a <= m; ++a)
                for (int b = -m; b <= m; ++b) {
                    const double w = wgt(a + m, b + m);
                    const double vp = pred(i + a, j + b), vr = ref(i + a, j + b);
                    mu_p += w * vp;
                    mu_r += w * vr;
                    pp += w * vp * vp;
                    rr += w * vr * vr;
                    pr += w * vp * vr;
                }
            const double var_p = pp - mu_p * mu_p;
            const double var_r = rr - mu_r * mu_r;
            const double cov = pr - mu_p * mu_r;
            sum += (2.0 * mu_p * mu_r + c1) * (2.0 * cov + c2) /
                   ((mu_p * mu_p + mu_r * mu_r + c1) * (var_p + var_r + c2));
            ++windows;
        }
    if (windows == 0) throw InsufficientDataError("core is smaller than the ssim window");
    return std::min(1.0, std::max(0.0, sum / static_cast<double>(windows)));
}

PsnrResult psnr(const Field& pred, const Field& ref, const Mask& core) {
    require_same_shape(pred.geom, ref.geom, "psnr");
    const double range = core_range(ref, core);

    double sq_sum = 0.0;
    long n = 0;
    for (Eigen::Index i = 0; i < pred.rows(); ++i)
        for (Eigen::Index j = 0; j < pred.cols(); ++j)
            if (core(i, j)) {
                const double e = pred(i, j) - ref(i, j);
                sq_sum += e * e;
                ++n;
            }
    if (n == 0) throw InsufficientDataError("psnr over an empty core");

    PsnrResult out;
    if (!(range > 0.0)) {
        out.defined = false;
        out.db = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double mse = sq_sum / static_cast<double>(n);
    out.db = mse == 0.0 ? std::numeric_limits<double>::infinity()
                        : 10.0 * std::log10(range * range / mse);
    return out;
}

Field tri(const Field& f) {
    Array2d out = Array2d::Zero(f.rows(), f.cols());
    for (Eigen::Index i = 1; i + 1 < f.rows(); ++i)
        for (Eigen::Index j = 1; j + 1 < f.cols(); ++j) {
            double s = 0.0;
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b) {
                    if (a == 0 && b == 0) continue;
                    const double d = f(i + a, j + b) - f(i, j);
                    s += d * d;
                }
            out(i, j) = std::sqrt(s);
        }
    return f.with_values(std::move(out));
}

double tri_diff(const Field& pred, const Field& ref, const Mask& core) {
    require_same_shape(pred.geom, ref.geom, "tri_diff");
    const Field tp = tri(pred), tr = tri(ref);
    double sum = 0.0;
    long n = 0;
    for (Eigen::Index i = 1; i + 1 < pred.rows(); ++i)
        for (Eigen::Index j = 1; j + 1 < pred.cols(); ++j)
            if (core(i, j)) {
                sum += std::abs(tp(i, j) - tr(i, j));
                ++n;
            }
    if (n == 0) throw InsufficientDataError("no interior core cells for tri_diff");
    return sum / static_cast<double>(n);
}

RadarMetrics radar_errors(const Field& pred, const RadarPicks& picks, const Mask& core) {
    require_same_shape(pred.geom, core.geom, "radar_errors");
    RadarMetrics out;

    double abs_sum = 0.0, sq_sum = 0.0, ref_sum = 0.0;
    std::vector<double> refs;
    for (const Pick& p : picks.records) {
        if (!pred.geom.contains(p.x, p.y)) {
            ++out.excluded;
            continue;
        }
        const auto [i, j] = pred.geom.cell_of(p.x, p.y);
        if (!core(i, j)) {
            ++out.excluded;
            continue;
        }
        const double e = pred(i, j) - p.bed;
        abs_sum += std::abs(e);
        sq_sum += e * e;
        ref_sum += p.bed;
        refs.push_back(p.bed);
        ++out.errors.count;
    }

    if (out.errors.count == 0) {
        out.errors.mae = out.errors.rmse = out.errors.r2 = std::numeric_limits<double>::quiet_NaN();
        out.errors.r2_defined = false;
        return out;
    }
    const auto n = static_cast<double>(out.errors.count);
    out.errors.mae = abs_sum / n;
    out.errors.rmse = std::sqrt(sq_sum / n);
    const double mean = ref_sum / n;
    double ss_tot = 0.0;
    for (const double r : refs) ss_tot += (r - mean) * (r - mean);
    if (ss_tot > 0.0) {
        out.errors.r2 = 1.0 - sq_sum / ss_tot;
    } else {
        out.errors.r2 = std::numeric_limits<double>::quiet_NaN();
        out.errors.r2_defined = false;
    }
    return out;
}

std::vector<StratifiedBin> stratified_rmse(const Field& pred, const Field& ref, const Mask& core,
                                           const Field& d_rad) {
    require_same_shape(pred.geom, ref.geom, "stratified_rmse");
    require_same_shape(pred.geom, d_rad.geom, "stratified_rmse");

    std::vector<StratifiedBin> bins = {{"[0,2]", 0.0, 0}, {"(2,6]", 0.0, 0}, {"(6,inf)", 0.0, 0}};
    std::vector<double> sq(3, 0.0);
    for (Eigen::Index i = 0; i < pred.rows(); ++i)
        for (Eigen::Index j = 0; j < pred.cols(); ++j) {
            if (!core(i, j)) continue;
            const double d = d_rad(i, j);
            const size_t b = d <= 2.0 ? 0 : (d <= 6.0 ? 1 : 2);
            const double e = pred(i, j) - ref(i, j);
            sq[b] += e * e;
            bins[b].count += 1;
        }
    for (size_t b = 0; b < bins.size(); ++b)
        bins[b].rmse = bins[b].count > 0 ? std::sqrt(sq[b] / static_cast<double>(bins[b].count))
                                         : std::numeric_limits<double>::quiet_NaN();
    return bins;
}

std::pair<DihedralElement, Field> align_orientation(const Field& pred, const Field& ref,
                                                    const Mask& core) {
    require_same_shape(pred.geom, ref.geom, "align_orientation");
    const bool square = pred.rows() == pred.cols();

    DihedralElement best_g;
    Field best_field = pred;
    double best_rmse = std::numeric_limits<double>::infinity();
    for (const DihedralElement& g : dihedral_elements()) {
        if (!square && (g.quarter_turns % 2) != 0) continue;
        Field cand = dihedral_apply_scalar(pred, g);
        const double rmse = pixel_metrics(cand, ref, core).rmse;
        if (rmse < best_rmse) {
            best_rmse = rmse;
            best_g = g;
            best_field = std::move(cand);
        }
    }
    return {best_g, best_field};
}

std::string render_table(const MetricsReport& report) {
    std::ostringstream os;
    char line[160];

    os << "metric            value\n";
    os << "----------------  ----------\n";
    const auto row = [&](const char* name, double v) {
        std::snprintf(line, sizeof line, "%-16s  %10.4f\n", name, v);
        os << line;
    };
    row("mae_m", report.reference.mae);
    row("rmse_m", report.reference.rmse);
    if (report.reference.r2_defined) row("r2", report.reference.r2);
    else os << "r2                 undefined\n";
    row("ssim", report.ssim_value);
    if (!report.psnr_value.defined) os << "psnr_db            undefined\n";
    else if (std::isinf(report.psnr_value.db)) os << "psnr_db                   inf\n";
    else row("psnr_db", report.psnr_value.db);
    row("tri_diff_m", report.tri_difference);
    if (report.radar.errors.count > 0) {
        row("radar_mae_m", report.radar.errors.mae);
        row("radar_rmse_m", report.radar.errors.rmse);
        if (report.radar.errors.r2_defined) row("radar_r2", report.radar.errors.r2);
    } else {
        os << "radar              no in-core picks\n";
    }
    for (const StratifiedBin& b : report.stratified) {
        std::snprintf(line, sizeof line, "rmse %-8s     %10.4f  (n=%ld)\n", b.label.c_str(),
                      b.rmse, b.count);
        os << line;
    }
    std::snprintf(line, sizeof line, "core_cells        %10ld\n", report.core_cells);
    os << line;
    std::snprintf(line, sizeof line, "orientation       rot%d%s\n", 90 * report.orientation.quarter_turns,
                  report.orientation.hflip ? "+hflip" : "");
    os << line;
    return os.str();
}

}  // namespace bedrecon
