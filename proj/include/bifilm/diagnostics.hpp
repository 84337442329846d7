#pragma once

#include <optional>
#include <span>

#include "bifilm/basis.hpp"
#include "bifilm/dynamics.hpp"
#include "bifilm/regularize.hpp"

namespace bifilm {

// One sampled row of a run: everything the structural checks and the CSV need.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_f = 0.0;
    double mass_g = 0.0;
    double energy1 = 0.0;            // surface energy, Parseval route
    double energy2_eps = 0.0;        // regularized entropy, grid quadrature
    std::optional<double> energy2;   // unregularized entropy; absent off the positive cone
    double dissipation1 = 0.0;       // third-order dissipation driving energy1
    double dissipation2 = 0.0;       // curvature dissipation driving energy2_eps
    double min_f = 0.0;              // grid minima (negativity monitor)
    double min_g = 0.0;
    double dt_last = 0.0;            // last accepted step before this sample
};

// integral of u = coeff of the constant mode * sqrt(L).
double mass(const SpectralCoeffs& c);

// E1 = 1/2 integral |dx f|^2 + (B/(A-B)) |dx (f+g)|^2. The Parseval form
// 1/2 sum_k kappa_k^2 [F_k^2 + (B/(A-B)) (F_k+G_k)^2] is exact for the basis;
// the quadrature route exists as an independent cross-check.
double energy1(const State& state, const PhysParams& phys);
double energy1_quadrature(const State& state, const PhysParams& phys, const Basis& basis);

// E2eps = integral phi_eps(f) + B phi_eps(g), by grid quadrature.
double energy2_eps(const State& state, const PhysParams& phys, RegEps eps, const Basis& basis);

// Unregularized entropy; empty when either layer is negative anywhere on the grid.
std::optional<double> energy2(const State& state, const PhysParams& phys, const Basis& basis);

// D1 = 1/(A-B) integral a_eps(f) |dxxx(A f + B g)|^2 + B a_eps(g) |dxxx(f+g)|^2.
double dissipation1(const State& state, const PhysParams& phys, RegEps eps, const Basis& basis);

// D2 = integral (A-B) |dxx f|^2 + B |dxx (f+g)|^2, Parseval route plus cross-check.
double dissipation2(const State& state, const PhysParams& phys);
double dissipation2_quadrature(const State& state, const PhysParams& phys, const Basis& basis);

DiagnosticsRecord measure(const State& state, const PhysParams& phys, RegEps eps,
                          const Basis& basis, double dt_last);

// Residual of the sampled trajectory against the weak form of the unregularized
// (eps = 0) system, tested with mode j:
//   r_f = F_j(T) - F_j(0)
//       + int_0^T int (A dxx f + B dxx g) (dx f dx phi_j + f dxx phi_j) dx dt
// and r_g with kernel (dxx f + dxx g) and layer g. Space integrals by grid
// quadrature, time integral by the trapezoid rule over the samples with t <= T
// (the last such sample is used as the endpoint). Requires >= 2 usable samples.
struct WeakResidual {
    double r_f = 0.0;
    double r_g = 0.0;
};
WeakResidual weak_residual(std::span<const State> samples, const PhysParams& phys,
                           const Basis& basis, int test_mode, double T);

}  // namespace bifilm
