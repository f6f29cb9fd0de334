#pragma once

#include <string>

#include "bedrecon/cli/config.hpp"
#include "bedrecon/eval/metrics.hpp"

namespace bedrecon {

/// Generates a synthetic scene and writes its rasters, picks and manifest.
void run_synth(const RunConfig& cfg);

/// Full reconstruction pipeline: split, normalization stats on the train
/// core, variational solve (whole-grid or tiled, optionally dihedral-averaged)
/// and raster outputs.
void run_reconstruct(const RunConfig& cfg);

/// Classical interpolation baselines fitted on train-core picks.
void run_baseline(const RunConfig& cfg, const std::string& which);

/// Leakage-safe evaluation of a prediction raster against a reference.
MetricsReport run_eval(const RunConfig& cfg, const std::string& pred_path,
                       const std::string& ref_path);

nlohmann::json metrics_to_json(const MetricsReport& report);

/// FNV-1a 64-bit content hash, hex-encoded; used in run manifests.
std::string file_hash(const std::string& path);

}  // namespace bedrecon
