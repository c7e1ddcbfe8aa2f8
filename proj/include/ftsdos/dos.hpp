#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftsdos {

/// Denial interval [start, start + duration).
struct DosInterval {
    double start = 0.0;
    double duration = 0.0;

    double end() const { return start + duration; }
    bool operator==(const DosInterval&) const = default;
};

/**
 * @brief Ordered, non-overlapping denial intervals inside [0, horizon).
 *
 * Intervals are half-open: the right endpoint itself is not denied.
 * Adjacent intervals may touch (end == next start).
 */
class DosSchedule {
public:
    /// Empty schedule with an unbounded horizon.
    DosSchedule() = default;
    /// Throws std::invalid_argument if the intervals are unordered, overlap or leave [0, horizon].
    DosSchedule(std::vector<DosInterval> intervals, double horizon);

    const std::vector<DosInterval>& intervals() const { return intervals_; }
    double horizon() const { return horizon_; }
    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }

    /// Throws std::out_of_range outside [0, horizon].
    bool is_denied(double t) const;

    /// Interval containing t, or -1.
    long interval_at(double t) const;

    /// n(t): number of intervals with start < t.
    std::size_t count_transitions(double t) const;

    /// |Xi(t)|: measure of the denied set intersected with [0, t).
    double total_denied(double t) const;

    double duty_cycle() const { return horizon_ > 0.0 ? total_denied(horizon_) / horizon_ : 0.0; }

private:
    void require_in_range(double t) const;

    std::vector<DosInterval> intervals_;
    double horizon_ = std::numeric_limits<double>::infinity();
};

/**
 * Frequency/duration parameters n(t) <= eta + t/tau_d and
 * |Xi(t)| <= kappa + t/theta. Reciprocals are stored so that "no recurring
 * transitions" and "no sustained denial" are representable as zero.
 */
struct DosCharacterization {
    double eta = 1.0;
    double inv_tau_d = 0.0;
    double kappa = 0.0;
    double inv_theta = 0.0;
    double duty_cycle = 0.0;

    double tau_d() const
    {
        return inv_tau_d > 0.0 ? 1.0 / inv_tau_d : std::numeric_limits<double>::infinity();
    }
    double theta() const
    {
        return inv_theta > 0.0 ? 1.0 / inv_theta : std::numeric_limits<double>::infinity();
    }
    bool duration_feasible() const { return inv_theta < 1.0; }
};

/// Tightest 1/tau_d and 1/theta for the given anchors eta and kappa.
DosCharacterization characterize(const DosSchedule& schedule, double eta = 1.0, double kappa = 0.1);

struct AssumptionViolation {
    enum class Kind { Frequency, Duration } kind;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;

    double residual() const { return lhs - rhs; }
};

struct AssumptionReport {
    std::vector<AssumptionViolation> violations;
    std::size_t points_checked = 0;

    bool passed() const { return violations.empty(); }
};

inline constexpr int kAssumptionGridPoints = 10000;
inline constexpr double kAssumptionTolerance = 1e-12;

/**
 * Evaluates both inequalities at every interval endpoint (right limits at
 * interval starts) and on a uniform grid of [0, horizon].
 */
AssumptionReport check_assumptions(const DosSchedule& schedule, const DosCharacterization& params,
                                   int grid_points = kAssumptionGridPoints);

class InfeasibleConstraints : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxRejections = 100000;

/**
 * Random schedule obeying @p constraints on [0, horizon).
 *
 * Off-times and on-times are uniform on [0, 2 * mean] with means chosen so
 * that an unconstrained draw would produce one interval every tau_d with the
 * permitted average duty. Each off-time is measured from the earliest start
 * that both budgets still admit; a candidate that would break either
 * inequality is rejected and redrawn. Deterministic in @p seed.
 * Throws InfeasibleConstraints after kMaxRejections consecutive rejections.
 */
DosSchedule generate_random(const DosCharacterization& constraints, double horizon,
                            std::uint64_t seed);

}  // namespace ftsdos
