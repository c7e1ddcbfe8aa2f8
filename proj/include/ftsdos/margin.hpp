#pragma once

#include "ftsdos/certificate.hpp"

namespace ftsdos {

/**
 * @brief Decay/growth rates and the finite-time condition under DoS.
 *
 * omega1 = c*lambda is the decay rate of V^(1-a) outside denial,
 * omega2 = c(1-lambda) + 2mu bounds its growth rate during denial.
 * xi is the net decay rate once the attack frequency and duration are
 * accounted for, rho the offset contributed by the attack bursts.
 */
struct StabilityMargin {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double xi = 0.0;
    double rho = 0.0;
    double threshold = 0.0;   // c*lambda / (c + 2mu)
    double attack_load = 0.0; // 1/theta + delta_bar/tau_d
    bool satisfied = false;   // attack_load < threshold, equivalently xi > 0
};

/**
 * Evaluates the attack-load condition for hold-last hybrid triggering.
 *
 * @p theta must exceed 1; either @p theta or @p tau_d may be +inf (no
 * sustained denial / no recurring transitions). Throws std::invalid_argument
 * on out-of-range parameters.
 */
StabilityMargin stability_margin(const LyapunovCertificate& cert, double delta_bar, double theta,
                                 double tau_d, double kappa, double eta);

/**
 * Time at which the bound V^(1-a)(t) <= V0^(1-a) + (1-a)(rho - xi t) reaches
 * zero: (V0^(1-a) + (1-a) rho) / ((1-a) xi). Throws std::domain_error when xi <= 0.
 */
double settling_bound(const LyapunovCertificate& cert, double V0, const StabilityMargin& margin);

/// alpha1^-1( max(0, alpha2(|x0|)^(1-a) + (1-a)(rho - xi t))^(1/(1-a)) ).
double state_envelope(const LyapunovCertificate& cert, double x0_norm,
                      const StabilityMargin& margin, double t);

/// First t at which state_envelope() is zero; +inf when xi <= 0.
double envelope_zero_time(const LyapunovCertificate& cert, double x0_norm,
                          const StabilityMargin& margin);

}  // namespace ftsdos
