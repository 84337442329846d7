#include "bifilm/regularize.hpp"

#include <cmath>
#include <stdexcept>

namespace bifilm {

RegEps::RegEps(double e) : value(e) {
    if (!(e > 0.0) || !(e <= 1.0) || !std::isfinite(e))
        throw std::invalid_argument("regularization strength must lie in (0, 1]");
}

double mobility(double s, RegEps eps) noexcept { return (s > 0.0 ? s : 0.0) + eps.value; }

double entropy_density(double s) {
    if (s < 0.0) throw std::domain_error("entropy density undefined for negative values");
    if (s == 0.0) return 1.0;  // s log s -> 0
    return s * std::log(s) - s + 1.0;
}

double entropy_density_reg(double s, RegEps eps, int deriv) {
    const double e = eps.value;
    switch (deriv) {
        case 0:
            if (s >= 0.0) {
                const double t = s + e;
                return t * std::log(t) - t + 1.0;
            }
            return s * s / (2.0 * e) + s * std::log(e) + e * std::log(e) - e + 1.0;
        case 1:
            return s >= 0.0 ? std::log(s + e) : s / e + std::log(e);
        case 2:
            return s >= 0.0 ? 1.0 / (s + e) : 1.0 / e;
        default:
            throw std::invalid_argument("regularized entropy derivative order must be 0..2");
    }
}

}  // namespace bifilm
