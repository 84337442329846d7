#include "bifilm/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bifilm/kernels.hpp"

namespace bifilm {

double mass(const SpectralCoeffs& c) {
    if (c.coeffs.empty()) throw std::invalid_argument("empty coefficient vector");
    return c.coeffs[0] * std::sqrt(c.length);
}

namespace {

double ratio(const PhysParams& phys) { return phys.B / (phys.A - phys.B); }

double kappa_k(int k, double L) { return k * std::numbers::pi / L; }

}  // namespace

double energy1(const State& state, const PhysParams& phys) {
    if (state.f.modes() != state.g.modes())
        throw std::invalid_argument("mismatched coefficient counts");
    const double c = ratio(phys);
    double e = 0.0;
    for (int k = 1; k <= state.f.modes(); ++k) {
        const double kap = kappa_k(k, state.f.length);
        const double fk = state.f.coeffs[k];
        const double sk = fk + state.g.coeffs[k];
        e += kap * kap * (fk * fk + c * sk * sk);
    }
    return 0.5 * e;
}

double energy1_quadrature(const State& state, const PhysParams& phys, const Basis& basis) {
    validate_state(state, basis);
    const auto fx = basis.synthesize(state.f, 1);
    const auto gx = basis.synthesize(state.g, 1);
    const auto& grid = basis.grid();
    const double c = ratio(phys);
    double e = 0.0;
    for (std::size_t m = 0; m < fx.size(); ++m) {
        const double s = fx[m] + gx[m];
        e += grid.weights[m] * (fx[m] * fx[m] + c * s * s);
    }
    return 0.5 * e;
}

double energy2_eps(const State& state, const PhysParams& phys, RegEps eps, const Basis& basis) {
    validate_state(state, basis);
    const auto fv = basis.synthesize(state.f, 0);
    const auto gv = basis.synthesize(state.g, 0);
    const auto& w = basis.grid().weights;
    double e = 0.0;
    for (std::size_t m = 0; m < fv.size(); ++m)
        e += w[m] * (entropy_density_reg(fv[m], eps) + phys.B * entropy_density_reg(gv[m], eps));
    return e;
}

std::optional<double> energy2(const State& state, const PhysParams& phys, const Basis& basis) {
    validate_state(state, basis);
    const auto fv = basis.synthesize(state.f, 0);
    const auto gv = basis.synthesize(state.g, 0);
    const auto& ops = kernels::active();
    if (ops.min_value(fv.data(), fv.size()) < 0.0 || ops.min_value(gv.data(), gv.size()) < 0.0)
        return std::nullopt;
    const auto& w = basis.grid().weights;
    double e = 0.0;
    for (std::size_t m = 0; m < fv.size(); ++m)
        e += w[m] * (entropy_density(fv[m]) + phys.B * entropy_density(gv[m]));
    return e;
}

double dissipation1(const State& state, const PhysParams& phys, RegEps eps, const Basis& basis) {
    validate_state(state, basis);
    const int n = basis.modes();
    const auto& ops = kernels::active();
    const auto fv = basis.synthesize(state.f, 0);
    const auto gv = basis.synthesize(state.g, 0);
    std::vector<double> mob(fv.size());

    std::vector<double> comb(n + 1);
    for (int k = 0; k <= n; ++k)
        comb[k] = phys.A * state.f.coeffs[k] + phys.B * state.g.coeffs[k];
    std::vector<double> p3(fv.size());
    basis.synthesize(comb, 3, p3);

    const auto& w = basis.grid().weights;
    double d = 0.0;
    ops.mobility_cutoff(fv.data(), eps.value, mob.data(), fv.size());
    for (std::size_t m = 0; m < fv.size(); ++m) d += w[m] * mob[m] * p3[m] * p3[m];

    for (int k = 0; k <= n; ++k) comb[k] = state.f.coeffs[k] + state.g.coeffs[k];
    basis.synthesize(comb, 3, p3);
    ops.mobility_cutoff(gv.data(), eps.value, mob.data(), gv.size());
    double dg = 0.0;
    for (std::size_t m = 0; m < gv.size(); ++m) dg += w[m] * mob[m] * p3[m] * p3[m];

    return (d + phys.B * dg) / (phys.A - phys.B);
}

double dissipation2(const State& state, const PhysParams& phys) {
    if (state.f.modes() != state.g.modes())
        throw std::invalid_argument("mismatched coefficient counts");
    double d = 0.0;
    for (int k = 1; k <= state.f.modes(); ++k) {
        const double kap = kappa_k(k, state.f.length);
        const double k4 = kap * kap * kap * kap;
        const double fk = state.f.coeffs[k];
        const double sk = fk + state.g.coeffs[k];
        d += k4 * ((phys.A - phys.B) * fk * fk + phys.B * sk * sk);
    }
    return d;
}

double dissipation2_quadrature(const State& state, const PhysParams& phys, const Basis& basis) {
    validate_state(state, basis);
    const auto fxx = basis.synthesize(state.f, 2);
    const auto gxx = basis.synthesize(state.g, 2);
    const auto& w = basis.grid().weights;
    double d = 0.0;
    for (std::size_t m = 0; m < fxx.size(); ++m) {
        const double s = fxx[m] + gxx[m];
        d += w[m] * ((phys.A - phys.B) * fxx[m] * fxx[m] + phys.B * s * s);
    }
    return d;
}

DiagnosticsRecord measure(const State& state, const PhysParams& phys, RegEps eps,
                          const Basis& basis, double dt_last) {
    validate_state(state, basis);
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.mass_f = mass(state.f);
    rec.mass_g = mass(state.g);
    rec.energy1 = energy1(state, phys);
    rec.energy2_eps = energy2_eps(state, phys, eps, basis);
    rec.energy2 = energy2(state, phys, basis);
    rec.dissipation1 = dissipation1(state, phys, eps, basis);
    rec.dissipation2 = dissipation2(state, phys);
    const auto fv = basis.synthesize(state.f, 0);
    const auto gv = basis.synthesize(state.g, 0);
    const auto& ops = kernels::active();
    rec.min_f = ops.min_value(fv.data(), fv.size());
    rec.min_g = ops.min_value(gv.data(), gv.size());
    rec.dt_last = dt_last;
    return rec;
}

WeakResidual weak_residual(std::span<const State> samples, const PhysParams& phys,
                           const Basis& basis, int test_mode, double T) {
    if (test_mode < 0 || test_mode > basis.modes())
        throw std::invalid_argument("test mode outside basis range");
    // usable prefix: samples at t <= T (tolerate rounding at the endpoint)
    const double t_tol = 1e-12 * (1.0 + std::abs(T));
    std::size_t count = 0;
    for (const State& s : samples) {
        if (s.t > T + t_tol) break;
        if (count > 0 && !(s.t > samples[count - 1].t))
            throw std::invalid_argument("trajectory samples must be strictly increasing in t");
        ++count;
    }
    if (count < 2) throw std::invalid_argument("need at least two samples up to T");

    const auto& grid = basis.grid();
    const auto& w = grid.weights;
    const auto dphi = basis.row(1, test_mode);
    const auto ddphi = basis.row(2, test_mode);

    // space integrand per sample, both channels
    std::vector<double> If(count), Ig(count);
    for (std::size_t i = 0; i < count; ++i) {
        const State& s = samples[i];
        validate_state(s, basis);
        const auto fv = basis.synthesize(s.f, 0);
        const auto gv = basis.synthesize(s.g, 0);
        const auto fx = basis.synthesize(s.f, 1);
        const auto gx = basis.synthesize(s.g, 1);
        const auto fxx = basis.synthesize(s.f, 2);
        const auto gxx = basis.synthesize(s.g, 2);
        double af = 0.0, ag = 0.0;
        for (std::size_t m = 0; m < fv.size(); ++m) {
            const double pf = phys.A * fxx[m] + phys.B * gxx[m];
            const double pg = fxx[m] + gxx[m];
            af += w[m] * pf * (fx[m] * dphi[m] + fv[m] * ddphi[m]);
            ag += w[m] * pg * (gx[m] * dphi[m] + gv[m] * ddphi[m]);
        }
        If[i] = af;
        Ig[i] = ag;
    }

    double tf = 0.0, tg = 0.0;  // trapezoid in time
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double dt = samples[i + 1].t - samples[i].t;
        tf += 0.5 * dt * (If[i] + If[i + 1]);
        tg += 0.5 * dt * (Ig[i] + Ig[i + 1]);
    }

    // integral u(T) phi_j dx is just the coefficient, by orthonormality
    const State& first = samples[0];
    const State& last = samples[count - 1];
    WeakResidual r;
    r.r_f = last.f.coeffs[test_mode] - first.f.coeffs[test_mode] + tf;
    r.r_g = last.g.coeffs[test_mode] - first.g.coeffs[test_mode] + tg;
    return r;
}

}  // namespace bifilm
