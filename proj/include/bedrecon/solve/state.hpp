#pragma once

#include <utility>

#include "bedrecon/data/observation.hpp"
#include "bedrecon/data/scene.hpp"

namespace bedrecon {

// The unknown of the variational problem: a normalized residual-thickness
// grid plus the statistics that de-normalize it.
struct ReconState {
    Field r_hat;     // unitless
    NormStats norm;  // r = sigma * r_hat + mu
};

struct Reconstruction {
    Field h_hat;  // thickness [m]
    Field b_hat;  // bed [m]
};

/// h = h_p + sigma*r_hat + mu, b = s - h.
inline Reconstruction reconstruct(const ReconState& state, const Scene& scene) {
    require_same_shape(state.r_hat.geom, scene.geom(), "reconstruct");
    Field h = scene.h_p.with_values(scene.h_p.values + state.norm.sigma * state.r_hat.values +
                                    state.norm.mu);
    Field b = scene.s.with_values(scene.s.values - h.values);
    return {std::move(h), std::move(b)};
}

}  // namespace bedrecon
