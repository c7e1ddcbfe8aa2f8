#include "ftsdos/margin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftsdos {

StabilityMargin stability_margin(const LyapunovCertificate& cert, double delta_bar, double theta,
                                 double tau_d, double kappa, double eta)
{
    if (!(delta_bar > 0.0) || !std::isfinite(delta_bar)) {
        throw std::invalid_argument("stability_margin: delta_bar must be positive");
    }
    if (!(theta > 1.0)) {
        throw std::invalid_argument("stability_margin: theta must exceed 1");
    }
    if (!(tau_d > 0.0)) {
        throw std::invalid_argument("stability_margin: tau_d must be positive");
    }
    if (!(kappa >= 0.0) || !(eta >= 0.0) || !std::isfinite(kappa) || !std::isfinite(eta)) {
        throw std::invalid_argument("stability_margin: kappa and eta must be non-negative");
    }

    const double c = cert.c();
    const double lambda = cert.lambda();
    const double mu = cert.mu();

    StabilityMargin m;
    m.omega1 = c * lambda;
    m.omega2 = c * (1.0 - lambda) + 2.0 * mu;
    m.attack_load = 1.0 / theta + delta_bar / tau_d;
    m.threshold = c * lambda / (c + 2.0 * mu);
    m.xi = c * lambda - m.attack_load * (c + 2.0 * mu);
    m.rho = (c + 2.0 * mu) * (kappa + delta_bar * eta);
    m.satisfied = m.xi > 0.0;
    return m;
}

double settling_bound(const LyapunovCertificate& cert, double V0, const StabilityMargin& margin)
{
    if (!(V0 >= 0.0)) {
        throw std::invalid_argument("settling_bound: V0 must be non-negative");
    }
    if (!(margin.xi > 0.0)) {
        throw std::domain_error("settling_bound: margin not satisfied (xi <= 0)");
    }
    const double q = 1.0 - cert.a();
    return (std::pow(V0, q) + q * margin.rho) / (q * margin.xi);
}

double state_envelope(const LyapunovCertificate& cert, double x0_norm,
                      const StabilityMargin& margin, double t)
{
    if (!(x0_norm >= 0.0) || !(t >= 0.0)) {
        throw std::invalid_argument("state_envelope: |x0| and t must be non-negative");
    }
    const double q = 1.0 - cert.a();
    const double inner = std::pow(cert.alpha2()(x0_norm), q) + q * (margin.rho - margin.xi * t);
    if (inner <= 0.0) {
        return 0.0;
    }
    return cert.alpha1().inverse(std::pow(inner, 1.0 / q));
}

double envelope_zero_time(const LyapunovCertificate& cert, double x0_norm,
                          const StabilityMargin& margin)
{
    if (!(margin.xi > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    const double q = 1.0 - cert.a();
    return (std::pow(cert.alpha2()(x0_norm), q) + q * margin.rho) / (q * margin.xi);
}

}  // namespace ftsdos
