#include "bifilm/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bifilm/errors.hpp"
#include "bifilm/kernels.hpp"

namespace bifilm {

PhysParams::PhysParams(double A_, double B_, double L_) : A(A_), B(B_), L(L_) {
    if (!(std::isfinite(A) && std::isfinite(B) && std::isfinite(L)))
        throw std::invalid_argument("physical parameters must be finite");
    if (!(B > 0.0 && A > B)) throw std::invalid_argument("need A > B > 0");
    if (!(L > 0.0)) throw std::invalid_argument("domain length must be positive");
}

PhysParams PhysParams::from_physical(double mu_minus, double mu_plus, double gamma_w,
                                     double gamma_d, double L_) {
    if (!(mu_minus > 0.0 && mu_plus > 0.0)) throw std::invalid_argument("viscosities must be positive");
    if (!(gamma_w > 0.0 && gamma_d > 0.0)) throw std::invalid_argument("tensions must be positive");
    const double B_ = mu_plus / mu_minus;
    const double A_ = B_ * (gamma_d + gamma_w) / gamma_d;
    return PhysParams(A_, B_, L_);
}

void validate_state(const State& state, const Basis& basis) {
    if (state.f.modes() != basis.modes() || state.g.modes() != basis.modes())
        throw std::invalid_argument("state coefficient count does not match basis");
    if (state.f.length != basis.length() || state.g.length != basis.length())
        throw std::invalid_argument("state domain length does not match basis");
}

System::System(PhysParams phys, RegEps eps, const Basis& basis, FluxMode mode)
    : phys_(phys), eps_(eps), basis_(basis), mode_(mode) {
    if (phys_.L != basis.length())
        throw std::invalid_argument("physical domain length does not match basis");
}

namespace {

void size_workspace(Workspace& ws, std::size_t M, std::size_t nc) {
    ws.fval.resize(M);
    ws.gval.resize(M);
    ws.mob_f.resize(M);
    ws.mob_g.resize(M);
    ws.flux_f.resize(M);
    ws.flux_g.resize(M);
    ws.wq.resize(M);
    ws.comb.resize(nc);
}

}  // namespace

RhsInfo System::rhs(const State& state, std::span<double> df, std::span<double> dg,
                    Workspace& ws) const {
    validate_state(state, basis_);
    const int n = basis_.modes();
    if (static_cast<int>(df.size()) != n + 1 || static_cast<int>(dg.size()) != n + 1)
        throw std::invalid_argument("rhs output spans must hold modes+1 entries");

    const auto& ops = kernels::active();
    const auto& grid = basis_.grid();
    const std::size_t M = grid.nodes.size();
    size_workspace(ws, M, n + 1);

    basis_.synthesize(state.f.coeffs, 0, ws.fval);
    basis_.synthesize(state.g.coeffs, 0, ws.gval);
    ops.mobility_cutoff(ws.fval.data(), eps_.value, ws.mob_f.data(), M);
    ops.mobility_cutoff(ws.gval.data(), eps_.value, ws.mob_g.data(), M);

    RhsInfo info;
    info.max_mobility_f = ops.max_value(ws.mob_f.data(), M);
    info.max_mobility_g = ops.max_value(ws.mob_g.data(), M);

    // Third derivative of the pressure combinations on the grid.
    if (mode_ == FluxMode::coupled) {
        for (int k = 0; k <= n; ++k)
            ws.comb[k] = phys_.A * state.f.coeffs[k] + phys_.B * state.g.coeffs[k];
        basis_.synthesize(ws.comb, 3, ws.flux_f);
        for (int k = 0; k <= n; ++k) ws.comb[k] = state.f.coeffs[k] + state.g.coeffs[k];
        basis_.synthesize(ws.comb, 3, ws.flux_g);
    } else {
        basis_.synthesize(state.g.coeffs, 3, ws.flux_g);
    }

    df[0] = 0.0;
    dg[0] = 0.0;
    if (mode_ == FluxMode::coupled) {
        ops.mul(ws.mob_f.data(), ws.flux_f.data(), ws.wq.data(), M);
        ops.mul(grid.weights.data(), ws.wq.data(), ws.wq.data(), M);
        for (int j = 1; j <= n; ++j) df[j] = ops.dot(ws.wq.data(), basis_.row(1, j).data(), M);
    } else {
        for (int j = 1; j <= n; ++j) df[j] = 0.0;
    }
    ops.mul(ws.mob_g.data(), ws.flux_g.data(), ws.wq.data(), M);
    ops.mul(grid.weights.data(), ws.wq.data(), ws.wq.data(), M);
    for (int j = 1; j <= n; ++j) dg[j] = ops.dot(ws.wq.data(), basis_.row(1, j).data(), M);

    for (int j = 0; j <= n; ++j) {
        if (!std::isfinite(df[j])) throw NonFiniteError("vector field overflow in f-channel", j);
        if (!std::isfinite(dg[j])) throw NonFiniteError("vector field overflow in g-channel", j);
    }
    return info;
}

std::pair<SpectralCoeffs, SpectralCoeffs> System::rhs(const State& state) const {
    Workspace ws;
    SpectralCoeffs df{std::vector<double>(basis_.modes() + 1), basis_.length()};
    SpectralCoeffs dg{std::vector<double>(basis_.modes() + 1), basis_.length()};
    rhs(state, df.coeffs, dg.coeffs, ws);
    return {std::move(df), std::move(dg)};
}

std::vector<double> System::jacobian(const State& state) const {
    const int n = basis_.modes();
    const int dim = 2 * (n + 1);
    std::vector<double> jac(static_cast<std::size_t>(dim) * dim, 0.0);

    Workspace ws;
    std::vector<double> df0(n + 1), dg0(n + 1), df1(n + 1), dg1(n + 1);
    rhs(state, df0, dg0, ws);

    double amax = 0.0;
    for (int k = 0; k <= n; ++k) {
        amax = std::max(amax, std::abs(state.f.coeffs[k]));
        amax = std::max(amax, std::abs(state.g.coeffs[k]));
    }
    const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + amax);

    State pert = state;
    for (int channel = 0; channel < 2; ++channel) {
        auto& coeffs = channel == 0 ? pert.f.coeffs : pert.g.coeffs;
        for (int k = 1; k <= n; ++k) {  // mode-0 columns stay zero: conserved quantity
            const double saved = coeffs[k];
            coeffs[k] = saved + h;
            rhs(pert, df1, dg1, ws);
            coeffs[k] = saved;
            const int col = channel * (n + 1) + k;
            for (int j = 0; j <= n; ++j) {
                jac[static_cast<std::size_t>(j) * dim + col] = (df1[j] - df0[j]) / h;
                jac[static_cast<std::size_t>(n + 1 + j) * dim + col] = (dg1[j] - dg0[j]) / h;
            }
        }
    }
    return jac;
}

double System::stability_rate(const State& state) const {
    Workspace ws;
    std::vector<double> df(basis_.modes() + 1), dg(basis_.modes() + 1);
    const RhsInfo info = rhs(state, df, dg, ws);
    const double kn = basis_.kappa(basis_.modes());
    const double kn4 = kn * kn * kn * kn;
    return std::max(info.max_mobility_f, info.max_mobility_g) * phys_.A * kn4;
}

}  // namespace bifilm
