#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bedrecon/baselines/kriging.hpp"
#include "bedrecon/data/observation.hpp"
#include "bedrecon/data/synth.hpp"
#include "bedrecon/eval/split.hpp"
#include "bedrecon/physics/loss_config.hpp"
#include "bedrecon/solve/solver.hpp"
#include "bedrecon/solve/tiling.hpp"

namespace bedrecon {

struct PathsConfig {
    std::string surface, vx, vy, smb, dhdt, prior_bed, picks, bed_true;
    std::string output_dir;  // empty: $BEDRECON_OUT or "."
};

struct SynthSection {
    Eigen::Index rows = 128;
    Eigen::Index cols = 128;
    double spacing = 150.0;
    SynthParams params;
};

struct IdwSection {
    int k = 12;
    double power = 2.0;
};

struct BaselineSection {
    IdwSection idw;
    KrigingParams kriging;
};

struct ReconstructSection {
    std::string mode = "whole-grid";  // or "tiled"
    bool tta = false;
    int jobs = 1;
    bool restrict_picks_to_train_core = true;
};

struct RunConfig {
    std::uint64_t seed = 42;
    PathsConfig paths;
    SynthSection synth;
    ObservationParams data;
    double sigma_floor = 1.0;
    SplitSpec split;
    LossConfig loss;
    Schedule schedule;
    SolverConfig solver;
    TileConfig tile;
    BaselineSection baseline;
    ReconstructSection reconstruct;

    std::string resolved_output_dir() const;
    void validate() const;
};

/// Parses the JSON config after applying `--set dotted.key=value` overrides.
/// Unknown keys are rejected to catch typos.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);

RunConfig run_config_from_json(const nlohmann::json& j);

/// Fully resolved configuration (defaults expanded) for run manifests.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace bedrecon
