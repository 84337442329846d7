#pragma once

// Independent slow-path references the tests compare the library against.
// Deliberately no shared machinery: literal transcriptions of the definitions
// with plain loops, std::cos/std::sin and naive midpoint sums.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "bifilm/dynamics.hpp"

namespace oracle {

inline double phi(int k, double x, double L, int deriv) {
    if (k == 0) return deriv == 0 ? std::sqrt(1.0 / L) : 0.0;
    const double kap = k * std::numbers::pi / L;
    const double amp = std::sqrt(2.0 / L);
    switch (deriv) {
        case 0: return amp * std::cos(kap * x);
        case 1: return -amp * kap * std::sin(kap * x);
        case 2: return -amp * kap * kap * std::cos(kap * x);
        default: return amp * kap * kap * kap * std::sin(kap * x);
    }
}

inline double synth(const std::vector<double>& c, double x, double L, int deriv) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
        s += c[k] * phi(static_cast<int>(k), x, L, deriv);
    return s;
}

inline double mobility(double s, double eps) { return std::max(s, 0.0) + eps; }

struct Rhs {
    std::vector<double> df, dg;
};

// The coefficient vector field by direct double sums on an M-panel midpoint grid:
//   df[j] = sum_m w a_eps(f(x_m)) dxxx(A f + B g)(x_m) dx phi_j(x_m)
// and dg[j] with a_eps(g), dxxx(f + g); mode 0 identically zero.
inline Rhs rhs(const bifilm::State& st, double A, double B, double eps, int M,
               bool lower_only = false) {
    const double L = st.f.length;
    const int n = st.f.modes();
    Rhs out{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
    const double w = L / M;
    for (int j = 1; j <= n; ++j) {
        double sf = 0.0, sg = 0.0;
        for (int m = 0; m < M; ++m) {
            const double x = (m + 0.5) * w;
            const double af = mobility(synth(st.f.coeffs, x, L, 0), eps);
            const double ag = mobility(synth(st.g.coeffs, x, L, 0), eps);
            double pf = 0.0, pg = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double d3 = phi(k, x, L, 3);
                pf += (A * st.f.coeffs[k] + B * st.g.coeffs[k]) * d3;
                pg += (lower_only ? st.g.coeffs[k] : st.f.coeffs[k] + st.g.coeffs[k]) * d3;
            }
            const double dphi = phi(j, x, L, 1);
            sf += af * pf * dphi;
            sg += ag * pg * dphi;
        }
        out.df[j] = lower_only ? 0.0 : w * sf;
        out.dg[j] = w * sg;
    }
    return out;
}

// exp(t M) for a 2x2 matrix with distinct real eigenvalues, via
//   exp(tM) = e^{l1 t} (M - l2 I)/(l1 - l2) + e^{l2 t} (M - l1 I)/(l2 - l1).
// Row-major {m00, m01, m10, m11}.
inline std::array<double, 4> expm2(const std::array<double, 4>& m, double t) {
    const double tr = m[0] + m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    const double disc = tr * tr - 4.0 * det;
    const double sq = std::sqrt(disc);
    const double l1 = 0.5 * (tr + sq);
    const double l2 = 0.5 * (tr - sq);
    const double e1 = std::exp(l1 * t), e2 = std::exp(l2 * t);
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
        const double id = (i == 0 || i == 3) ? 1.0 : 0.0;
        out[i] = e1 * (m[i] - l2 * id) / (l1 - l2) + e2 * (m[i] - l1 * id) / (l2 - l1);
    }
    return out;
}

}  // namespace oracle
