#include "bifilm/basis.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bifilm/kernels.hpp"

namespace bifilm {

QuadratureGrid make_grid(int panels, double domain_length) {
    if (panels < 2) throw std::invalid_argument("quadrature grid needs at least 2 panels");
    if (!(domain_length > 0.0) || !std::isfinite(domain_length))
        throw std::invalid_argument("domain length must be positive and finite");
    QuadratureGrid g;
    g.length = domain_length;
    g.nodes.resize(panels);
    g.weights.resize(panels);
    const double h = domain_length / panels;
    for (int m = 0; m < panels; ++m) {
        g.nodes[m] = (m + 0.5) * h;
        g.weights[m] = h;
    }
    return g;
}

double eval_basis(int k, double x, double domain_length, int deriv) {
    if (k < 0) throw std::invalid_argument("basis mode index must be non-negative");
    if (deriv < 0 || deriv > 3)
        throw std::invalid_argument("basis derivative order must be in 0..3");
    if (!(domain_length > 0.0)) throw std::invalid_argument("domain length must be positive");
    if (!(x >= 0.0 && x <= domain_length))
        throw std::invalid_argument("basis evaluation outside [0, L]");
    const double L = domain_length;
    if (k == 0) return deriv == 0 ? std::sqrt(1.0 / L) : 0.0;
    const double kappa = k * std::numbers::pi / L;
    const double amp = std::sqrt(2.0 / L);
    switch (deriv) {
        case 0: return amp * std::cos(kappa * x);
        case 1: return -amp * kappa * std::sin(kappa * x);
        case 2: return -amp * kappa * kappa * std::cos(kappa * x);
        default: return amp * kappa * kappa * kappa * std::sin(kappa * x);
    }
}

Basis::Basis(int modes, QuadratureGrid grid) : n_(modes), grid_(std::move(grid)) {
    if (modes < 0) throw std::invalid_argument("mode count must be non-negative");
    if (grid_.panels() < modes + 1)
        throw std::invalid_argument("grid too coarse: need at least modes+1 panels, got " +
                                    std::to_string(grid_.panels()));
    const int M = grid_.panels();
    for (int d = 0; d < 4; ++d) {
        rows_[d].resize(static_cast<std::size_t>(n_ + 1) * M);
        for (int k = 0; k <= n_; ++k) {
            double* row = rows_[d].data() + static_cast<std::size_t>(k) * M;
            for (int m = 0; m < M; ++m) row[m] = eval_basis(k, grid_.nodes[m], grid_.length, d);
        }
    }
}

double Basis::kappa(int k) const noexcept { return k * std::numbers::pi / grid_.length; }

std::span<const double> Basis::row(int deriv, int k) const {
    if (deriv < 0 || deriv > 3) throw std::invalid_argument("derivative order must be in 0..3");
    if (k < 0 || k > n_) throw std::invalid_argument("mode index out of range");
    const int M = grid_.panels();
    return {rows_[deriv].data() + static_cast<std::size_t>(k) * M, static_cast<std::size_t>(M)};
}

void Basis::synthesize(std::span<const double> coeffs, int deriv, std::span<double> out) const {
    if (static_cast<int>(coeffs.size()) > n_ + 1)
        throw std::invalid_argument("more coefficients than basis modes");
    const std::size_t M = grid_.nodes.size();
    if (out.size() != M) throw std::invalid_argument("output span must match grid size");
    std::memset(out.data(), 0, M * sizeof(double));
    const auto& ops = kernels::active();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) continue;  // mode 0 contributes nothing for deriv >= 1 anyway
        ops.axpy(coeffs[k], rows_[deriv].data() + k * M, out.data(), M);
    }
}

std::vector<double> Basis::synthesize(const SpectralCoeffs& c, int deriv) const {
    std::vector<double> out(grid_.nodes.size());
    synthesize(c.coeffs, deriv, out);
    return out;
}

void Basis::analyze(std::span<const double> grid_values, std::span<double> coeffs_out) const {
    const std::size_t M = grid_.nodes.size();
    if (grid_values.size() != M) throw std::invalid_argument("grid data must match grid size");
    if (static_cast<int>(coeffs_out.size()) != n_ + 1)
        throw std::invalid_argument("coefficient span must hold modes+1 entries");
    const auto& ops = kernels::active();
    for (int k = 0; k <= n_; ++k)
        coeffs_out[k] = ops.dot3(grid_.weights.data(), grid_values.data(),
                                 rows_[0].data() + static_cast<std::size_t>(k) * M, M);
}

SpectralCoeffs Basis::analyze(std::span<const double> grid_values) const {
    SpectralCoeffs c;
    c.length = grid_.length;
    c.coeffs.resize(n_ + 1);
    analyze(grid_values, c.coeffs);
    return c;
}

std::vector<double> synthesize(const SpectralCoeffs& c, const QuadratureGrid& grid, int deriv) {
    return Basis(c.modes(), grid).synthesize(c, deriv);
}

SpectralCoeffs analyze(std::span<const double> grid_values, const QuadratureGrid& grid, int modes) {
    return Basis(modes, grid).analyze(grid_values);
}

}  // namespace bifilm
