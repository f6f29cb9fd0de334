#pragma once

#include <cstdint>
#include <vector>

#include "bedrecon/physics/losses.hpp"
#include "bedrecon/solve/state.hpp"

namespace bedrecon {

struct SolverConfig {
    int max_epochs = 6000;
    double lr = 1.0e-4;
    double weight_decay = 1.0e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1.0e-8;
    int cosine_t0 = 500;     // warm-restart cycle length in epochs
    int cosine_t_mult = 2;   // cycle growth factor
    double ema_decay = 0.999;
    int patience = 2000;     // early-stop patience in epochs
    int monitor_every = 10;  // monitor evaluation cadence
    std::uint64_t seed = 42;

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double radar = 0.0, mass = 0.0, flow_tv = 0.0, laplacian = 0.0, nonneg = 0.0, prior = 0.0;
    double total = 0.0;
    double lr = 0.0;
    double monitor = 0.0;  // last evaluated monitor value
};

struct SolveResult {
    ReconState state;  // EMA snapshot with the best monitored fit
    std::vector<EpochStats> history;
    double best_monitor = 0.0;
    int best_epoch = 0;
};

/// Convex blend alpha*shadow + (1-alpha)*current.
Field ema_update(const Field& shadow, const Field& current, double alpha);

/// Cosine-annealed learning rate with warm restarts, stepped per epoch.
double cosine_restart_lr(double base_lr, int epoch, int t0, int t_mult);

/// Minimizes the scheduled total loss over the normalized residual grid with
/// Adam plus decoupled weight decay. Cells outside `region` stay frozen at
/// zero. An EMA shadow of the iterate is monitored on the radar-thickness fit
/// inside `monitor_region`; the best shadow is returned. Deterministic.
SolveResult solve_variational(const Scene& scene, const ObservationLayer& obs,
                              const NormStats& norm, const LossConfig& loss_cfg,
                              const Schedule& sched, const SolverConfig& cfg, const Mask& region,
                              const Mask& monitor_region);

/// Weighted Huber fit of the reconstruction at radar cells inside `region`;
/// NaN when the region holds no radar cells.
double radar_fit_monitor(const ReconState& state, const Scene& scene, const ObservationLayer& obs,
                         const Mask& region, double delta, double weight_floor);

}  // namespace bedrecon
