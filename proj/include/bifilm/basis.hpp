#pragma once

#include <array>
#include <span>
#include <vector>

namespace bifilm {

// Coefficients against the Neumann cosine eigenbasis on (0, L):
//   phi_0 = sqrt(1/L),  phi_k = sqrt(2/L) cos(k pi x / L)  (k >= 1),
// entry k holds the coefficient of phi_k. The basis is L2-orthonormal and every
// basis function has vanishing first and third derivative at x = 0 and x = L.
struct SpectralCoeffs {
    std::vector<double> coeffs;  // size modes()+1, finite entries
    double length = 1.0;         // domain length L > 0

    int modes() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
};

// Composite midpoint rule on [0, L]: M uniform panels, node at each panel center,
// weight L/M. Integrates products of basis modes exactly (to rounding) whenever
// M >= n+1; run configurations demand the safety margin M >= 4(n+1).
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double length = 1.0;
    int panels() const noexcept { return static_cast<int>(nodes.size()); }
};

QuadratureGrid make_grid(int panels, double domain_length);

// Pointwise mode evaluation, deriv in 0..3. Throws std::invalid_argument outside
// 0 <= x <= L or for an unsupported derivative order.
double eval_basis(int k, double x, double domain_length, int deriv);

// Precomputed mode values on a grid: value_rows(d) is a (modes+1) x panels row-major
// table of the d-th derivative of each mode at each node. This is what the hot
// paths (vector-field assembly, diagnostics) consume; a fast transform could
// replace the table-backed synthesize/analyze without changing call sites.
class Basis {
public:
    Basis(int modes, QuadratureGrid grid);

    int modes() const noexcept { return n_; }
    const QuadratureGrid& grid() const noexcept { return grid_; }
    double length() const noexcept { return grid_.length; }
    // kappa(k) = k pi / L; the one-dimensional symbol of d/dx on mode k.
    double kappa(int k) const noexcept;

    std::span<const double> row(int deriv, int k) const;

    // values[m] = sum_k coeffs[k] * phi_k^(deriv)(x_m); out.size() == panels.
    void synthesize(std::span<const double> coeffs, int deriv, std::span<double> out) const;
    std::vector<double> synthesize(const SpectralCoeffs& c, int deriv) const;

    // coeffs[k] = sum_m w_m grid_values[m] phi_k(x_m): the L2 projection onto the
    // span, exact for band-limited data when the grid resolves the products.
    void analyze(std::span<const double> grid_values, std::span<double> coeffs_out) const;
    SpectralCoeffs analyze(std::span<const double> grid_values) const;

private:
    int n_;
    QuadratureGrid grid_;
    std::array<std::vector<double>, 4> rows_;  // [deriv][(k, m)] row-major
};

// Convenience one-shot forms (build a temporary table; test and cold paths only).
std::vector<double> synthesize(const SpectralCoeffs& c, const QuadratureGrid& grid, int deriv);
SpectralCoeffs analyze(std::span<const double> grid_values, const QuadratureGrid& grid, int modes);

}  // namespace bifilm
