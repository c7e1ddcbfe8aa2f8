#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftsdos/certificate.hpp"
#include "ftsdos/dos.hpp"
#include "ftsdos/engine.hpp"
#include "ftsdos/margin.hpp"

namespace ftsdos {

enum class BoundId { Theorem1Decay, Lemma5Growth, Theorem2Envelope, LambdaMeasure };

std::string to_string(BoundId id);

struct BoundViolation {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

struct BoundReport {
    BoundId bound_id = BoundId::Theorem1Decay;
    std::vector<BoundViolation> violations;
    double max_residual = -std::numeric_limits<double>::infinity();
    std::size_t intervals_checked = 0;
    std::size_t points_checked = 0;
    std::string note;

    bool passed() const { return violations.empty(); }
};

/// Tolerance used by every bound check: 1e-6 relative above 1, absolute below.
inline double bound_tolerance(double rhs) { return 1e-6 * std::max(1.0, std::abs(rhs)); }

/**
 * Decay V^(1-a)(t) <= V^(1-a)(t_k) - (1-a) c lambda (t - t_k) on every grid
 * point between a delivered sample and the next event, for sub-intervals
 * untouched by denial. The right side is floored at zero (V stays zero once
 * it reaches zero).
 */
BoundReport check_theorem1(const SimLog& log, const LyapunovCertificate& cert);

/**
 * Growth V^(1-a)(t) <= V^(1-a)(t_f) + (1-a) omega2 (t - t_f) from the first
 * denied event t_f after a delivered sample until the next delivered one.
 * Episodes before the first delivered sample are skipped.
 */
BoundReport check_lemma5(const SimLog& log, const LyapunovCertificate& cert,
                         const DosSchedule& schedule);

/// |x(t)| <= state_envelope(t) on every grid point, 1e-6 absolute.
BoundReport check_theorem2_envelope(const SimLog& log, const LyapunovCertificate& cert,
                                    const StabilityMargin& margin);

struct LambdaMeasure {
    double measured = 0.0;
    double bound = 0.0;
};

/**
 * Measure of the growth region on [0, t): every denial interval that saw a
 * sampling attempt, extended to the first delivered sample after it, against
 * kappa + t/theta + delta_bar (eta + t/tau_d). theta and tau_d may be +inf.
 */
LambdaMeasure lambda_measure(const SimLog& log, const DosSchedule& schedule, double delta_bar,
                             double eta, double tau_d, double theta, double kappa, double t);

/// lambda_measure() at every interval end and at the end of the log.
BoundReport check_lambda_measure(const SimLog& log, const DosSchedule& schedule, double delta_bar,
                                 const DosCharacterization& params);

/// First grid time after which |x| stays below epsilon through the end of a completed run.
std::optional<double> settling_time(const SimLog& log, double epsilon);

}  // namespace ftsdos
