#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bedrecon/data/scene.hpp"
#include "bedrecon/grid/dihedral.hpp"

namespace bedrecon {

struct PixelMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    bool r2_defined = true;
    long count = 0;
};

/// MAE/RMSE/R^2 over core cells, R^2 about the reference mean. A constant
/// reference leaves R^2 undefined (flagged NaN).
PixelMetrics pixel_metrics(const Field& pred, const Field& ref, const Mask& core);

/// Mean local SSIM with a Gaussian window; only windows lying fully inside
/// the core contribute. The dynamic range is the reference max-min over the
/// core. Clamped to [0, 1].
double ssim(const Field& pred, const Field& ref, const Mask& core, int window = 7,
            double window_sigma = 1.5, double k1 = 0.01, double k2 = 0.03);

struct PsnrResult {
    double db = 0.0;      // +infinity when the error is exactly zero
    bool defined = true;  // false when the reference has zero dynamic range
};

/// 10*log10(R^2 / MSE) with R the reference dynamic range over the core.
PsnrResult psnr(const Field& pred, const Field& ref, const Mask& core);

/// Terrain ruggedness index: root of the summed squared differences to the 8
/// neighbors. Defined on interior cells; boundary cells are zero.
Field tri(const Field& f);

/// Mean |TRI(pred) - TRI(ref)| over core cells that are grid-interior.
double tri_diff(const Field& pred, const Field& ref, const Mask& core);

struct RadarMetrics {
    PixelMetrics errors;
    long excluded = 0;  // picks outside the core
};

/// Errors of the prediction sampled at the containing cell of each in-core pick.
RadarMetrics radar_errors(const Field& pred, const RadarPicks& picks, const Mask& core);

struct StratifiedBin {
    std::string label;
    double rmse = 0.0;
    long count = 0;
};

/// RMSE over core cells stratified by distance-to-radar bins [0,2], (2,6],
/// (6,inf) pixels. Empty bins are reported with count zero.
std::vector<StratifiedBin> stratified_rmse(const Field& pred, const Field& ref, const Mask& core,
                                           const Field& d_rad);

/// Exhaustive search over the dihedral elements (shape-preserving ones for
/// non-square grids) for the transform of pred that minimizes core RMSE
/// against ref. Ties resolve toward identity, then enumeration order.
std::pair<DihedralElement, Field> align_orientation(const Field& pred, const Field& ref,
                                                    const Mask& core);

struct MetricsReport {
    DihedralElement orientation;
    PixelMetrics reference;  // against the reference raster
    double ssim_value = 0.0;
    PsnrResult psnr_value;
    double tri_difference = 0.0;
    RadarMetrics radar;
    std::vector<StratifiedBin> stratified;
    long core_cells = 0;
};

std::string render_table(const MetricsReport& report);

}  // namespace bedrecon
