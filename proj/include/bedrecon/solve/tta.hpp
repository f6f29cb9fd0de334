#pragma once

#include <functional>

#include "bedrecon/grid/dihedral.hpp"
#include "bedrecon/solve/solver.hpp"

namespace bedrecon {

struct TtaProblem {
    Scene scene;
    ObservationLayer obs;
    Mask region;
    Mask monitor_region;
};

TtaProblem dihedral_apply(const TtaProblem& p, const DihedralElement& g);

using TtaSolveFn = std::function<Field(const TtaProblem&)>;

/// Eight-way dihedral averaging: the whole problem is transformed
/// (vector-aware for velocity), solved, and the result inverse-transformed
/// before averaging. Requires a square grid.
Field tta_solve(const TtaProblem& problem, const TtaSolveFn& solve);

/// Convenience wrapper running solve_variational for every variant.
ReconState tta_solve_variational(const TtaProblem& problem, const NormStats& norm,
                                 const LossConfig& loss_cfg, const Schedule& sched,
                                 const SolverConfig& solver_cfg);

}  // namespace bedrecon
