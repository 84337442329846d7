#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bifilm/basis.hpp"
#include "bifilm/regularize.hpp"

namespace bifilm {

// Coupling constants of the two-layer system. The f-channel flux carries the
// pressure combination A*f + B*g, the g-channel flux carries f + g; well-posedness
// of the energy structure needs A > B > 0.
struct PhysParams {
    PhysParams(double A_, double B_, double L_);
    // A = (mu_plus/mu_minus) * (gamma_d + gamma_w) / gamma_d, B = mu_plus/mu_minus.
    static PhysParams from_physical(double mu_minus, double mu_plus, double gamma_w,
                                    double gamma_d, double L_);
    double A;
    double B;
    double L;
};

// One point of the coupled flow: coefficient vectors of both layers plus time.
struct State {
    SpectralCoeffs f;
    SpectralCoeffs g;
    double t = 0.0;
};

// coupled: full two-layer dynamics.
// lower_layer_only: f frozen (zero rhs) and the cross-coupling removed, so g
// evolves by dt g = -dx(a_eps(g) dxxx g); used for the single-layer limit check.
enum class FluxMode { coupled, lower_layer_only };

// Scratch buffers for one vector-field evaluation (reused across steps).
struct Workspace {
    std::vector<double> fval, gval, mob_f, mob_g, flux_f, flux_g, wq;
    std::vector<double> comb;
};

struct RhsInfo {
    double max_mobility_f = 0.0;  // max over grid of a_eps(f); frozen coefficient
    double max_mobility_g = 0.0;  // for the semi-implicit split, stability estimates
};

// The Galerkin vector field: df[j] = integral a_eps(f) dxxx(A f + B g) dx phi_j dx
// and dg[j] likewise with a_eps(g), dxxx(f + g). Mode 0 of both channels has
// identically zero rhs (mass conservation is exact by construction). Evaluation is
// pseudo-spectral: synthesize on the grid, apply the mobility cutoff pointwise,
// project back through the precomputed mode tables.
class System {
public:
    System(PhysParams phys, RegEps eps, const Basis& basis, FluxMode mode = FluxMode::coupled);

    // df/dg must hold modes+1 entries. Throws NonFiniteError if the result
    // overflows. Pure in the inputs; the workspace is the only mutation.
    RhsInfo rhs(const State& state, std::span<double> df, std::span<double> dg,
                Workspace& ws) const;
    std::pair<SpectralCoeffs, SpectralCoeffs> rhs(const State& state) const;

    // Dense directional-derivative matrix of the rhs by forward differences with
    // step sqrt(machine eps) * (1 + max|coeff|). Layout: row-major square of size
    // 2(modes+1), index = channel*(modes+1) + mode with f first. Mode-0 rows and
    // columns are identically zero: mode 0 is conserved and every solver freezes it.
    std::vector<double> jacobian(const State& state) const;

    // Largest one-sided decay rate of the frozen-coefficient linearization,
    // max(a_eps) * A * (n pi / L)^4; explicit stepping must resolve 1/rate.
    double stability_rate(const State& state) const;

    const PhysParams& phys() const noexcept { return phys_; }
    const RegEps& eps() const noexcept { return eps_; }
    const Basis& basis() const noexcept { return basis_; }
    FluxMode mode() const noexcept { return mode_; }

private:
    PhysParams phys_;
    RegEps eps_;
    const Basis& basis_;
    FluxMode mode_;
};

void validate_state(const State& state, const Basis& basis);

}  // namespace bifilm
