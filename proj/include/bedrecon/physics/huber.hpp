#pragma once

#include <cmath>

#include "bedrecon/core/errors.hpp"

namespace bedrecon {

struct ValueGrad {
    double value = 0.0;
    double deriv = 0.0;
};

/// Huber penalty: t^2/2 inside |t| <= delta, delta*(|t| - delta/2) outside.
inline ValueGrad huber(double t, double delta) {
    if (!(delta > 0.0)) throw ParameterError("huber delta must be positive");
    const double a = std::abs(t);
    if (a <= delta) return {0.5 * t * t, t};
    return {delta * (a - 0.5 * delta), t > 0.0 ? delta : -delta};
}

/// Differentiable |t|: sqrt(t^2 + eta^2) - eta, zero at t = 0.
inline ValueGrad smooth_abs(double t, double eta) {
    const double s = std::sqrt(t * t + eta * eta);
    return {s - eta, t / s};
}

}  // namespace bedrecon
