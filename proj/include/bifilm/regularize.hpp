#pragma once

namespace bifilm {

// Regularization strength. Valid range (0, 1]; the upper bound keeps the
// regularized entropy density non-negative everywhere.
struct RegEps {
    explicit RegEps(double e);
    double value;
};

// a_eps(s) = s + eps for s >= 0, eps for s < 0. Affine on non-negative states,
// bounded below by eps, Lipschitz with constant 1.
double mobility(double s, RegEps eps) noexcept;

// phi(s) = s log s - s + 1 (phi(0) = 1 by limit). Throws std::domain_error for s < 0.
double entropy_density(double s);

// The C^1 regularization of phi with phi_eps'' = 1/a_eps:
//   s >= 0:  (s+eps) log(s+eps) - (s+eps) + 1
//   s <  0:  s^2/(2 eps) + s log eps + eps log eps - eps + 1
// deriv selects the value (0), first (1) or second (2) derivative.
double entropy_density_reg(double s, RegEps eps, int deriv = 0);

}  // namespace bifilm
