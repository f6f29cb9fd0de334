#pragma once

#include <optional>

#include "bedrecon/baselines/variogram.hpp"
#include "bedrecon/data/scene.hpp"

namespace bedrecon {

enum class KrigingMode { Simple, Ordinary };

struct KrigingParams {
    int k = 16;
    KrigingMode mode = KrigingMode::Ordinary;
    int variogram_bins = 24;
    double max_lag = 0.0;  // meters; <= 0 derives half the pick-extent diagonal
    std::optional<VariogramModel> fixed_model;  // skip fitting when set
};

struct KrigingResult {
    Field bed;
    VariogramModel model;
    long fallback_cells = 0;  // cells predicted by IDW after a singular system
};

/// Residual kriging: krige pick-bed minus prior-bed residuals with a fitted
/// exponential variogram and add the prior back. Simple mode assumes residual
/// mean zero; ordinary mode solves with the unbiasedness constraint.
KrigingResult krige_residual(const RadarPicks& picks, const Field& prior_bed,
                             const KrigingParams& params);

}  // namespace bedrecon
