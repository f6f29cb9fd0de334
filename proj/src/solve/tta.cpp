#include "bedrecon/solve/tta.hpp"

namespace bedrecon {

TtaProblem dihedral_apply(const TtaProblem& p, const DihedralElement& g) {
    TtaProblem out;
    out.scene = make_scene(dihedral_apply_scalar(p.scene.s, g), dihedral_apply(p.scene.v, g),
                           dihedral_apply_scalar(p.scene.smb, g),
                           dihedral_apply_scalar(p.scene.dhdt, g),
                           dihedral_apply_scalar(p.scene.b_p, g),
                           dihedral_apply_scalar(p.scene.valid, g));
    out.obs.mask = dihedral_apply_scalar(p.obs.mask, g);
    out.obs.h_rad = dihedral_apply_scalar(p.obs.h_rad, g);
    out.obs.d_rad = dihedral_apply_scalar(p.obs.d_rad, g);
    out.obs.c = dihedral_apply_scalar(p.obs.c, g);
    out.obs.tau_px = p.obs.tau_px;
    out.region = dihedral_apply_scalar(p.region, g);
    out.monitor_region = dihedral_apply_scalar(p.monitor_region, g);
    return out;
}

Field tta_solve(const TtaProblem& problem, const TtaSolveFn& solve) {
    if (problem.scene.geom().rows != problem.scene.geom().cols)
        throw DimensionError("dihedral averaging needs a square grid");

    Array2d sum;
    for (const DihedralElement& g : dihedral_elements()) {
        const TtaProblem variant = dihedral_apply(problem, g);
        const Field solved = solve(variant);
        const Field back = dihedral_apply_scalar(solved, dihedral_inverse(g));
        if (sum.size() == 0)
            sum = back.values;
        else
            sum += back.values;
    }
    return Field(problem.scene.geom(), sum / 8.0);
}

ReconState tta_solve_variational(const TtaProblem& problem, const NormStats& norm,
                                 const LossConfig& loss_cfg, const Schedule& sched,
                                 const SolverConfig& solver_cfg) {
    const Field r_hat = tta_solve(problem, [&](const TtaProblem& p) {
        return solve_variational(p.scene, p.obs, norm, loss_cfg, sched, solver_cfg, p.region,
                                 p.monitor_region)
            .state.r_hat;
    });
    return ReconState{r_hat, norm};
}

}  // namespace bedrecon
