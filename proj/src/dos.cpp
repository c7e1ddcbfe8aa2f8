#include "ftsdos/dos.hpp"

#include <algorithm>
#include <cmath>

#include "ftsdos/rng.hpp"

namespace ftsdos {

DosSchedule::DosSchedule(std::vector<DosInterval> intervals, double horizon)
    : intervals_(std::move(intervals)), horizon_(horizon)
{
    if (!(horizon_ > 0.0)) {
        throw std::invalid_argument("DoS schedule: horizon must be positive");
    }
    double previous_end = 0.0;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const DosInterval& h = intervals_[i];
        if (!std::isfinite(h.start) || !std::isfinite(h.duration) || !(h.duration > 0.0)) {
            throw std::invalid_argument("DoS schedule: interval " + std::to_string(i) +
                                        " needs a finite start and positive duration");
        }
        if (h.start < previous_end) {
            throw std::invalid_argument("DoS schedule: interval " + std::to_string(i) +
                                        " overlaps or precedes its predecessor");
        }
        if (h.end() > horizon_) {
            throw std::invalid_argument("DoS schedule: interval " + std::to_string(i) +
                                        " extends past the horizon");
        }
        previous_end = h.end();
    }
}

void DosSchedule::require_in_range(double t) const
{
    if (!(t >= 0.0) || t > horizon_) {
        throw std::out_of_range("DoS schedule queried outside [0, horizon]");
    }
}

long DosSchedule::interval_at(double t) const
{
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double v, const DosInterval& h) { return v < h.start; });
    if (it == intervals_.begin()) {
        return -1;
    }
    --it;
    return t < it->end() ? static_cast<long>(it - intervals_.begin()) : -1;
}

bool DosSchedule::is_denied(double t) const
{
    require_in_range(t);
    return interval_at(t) >= 0;
}

std::size_t DosSchedule::count_transitions(double t) const
{
    require_in_range(t);
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), t,
                               [](const DosInterval& h, double v) { return h.start < v; });
    return static_cast<std::size_t>(it - intervals_.begin());
}

double DosSchedule::total_denied(double t) const
{
    require_in_range(t);
    double sum = 0.0;
    for (const DosInterval& h : intervals_) {
        if (h.start >= t) {
            break;
        }
        sum += std::min(h.end(), t) - h.start;
    }
    return sum;
}

DosCharacterization characterize(const DosSchedule& schedule, double eta, double kappa)
{
    if (!(eta >= 0.0) || !(kappa >= 0.0)) {
        throw std::invalid_argument("characterize: anchors eta and kappa must be non-negative");
    }
    DosCharacterization out;
    out.eta = eta;
    out.kappa = kappa;
    out.duty_cycle = std::isfinite(schedule.horizon()) ? schedule.duty_cycle() : 0.0;

    double denied = 0.0;
    const auto& intervals = schedule.intervals();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const DosInterval& h = intervals[i];
        // n jumps to i+1 just after the start.
        const double excess_count = static_cast<double>(i + 1) - eta;
        if (excess_count > 0.0) {
            out.inv_tau_d = h.start > 0.0
                                ? std::max(out.inv_tau_d, excess_count / h.start)
                                : std::numeric_limits<double>::infinity();
        }
        // |Xi| - t/theta peaks at interval ends.
        denied += h.duration;
        const double excess_time = denied - kappa;
        if (excess_time > 0.0) {
            out.inv_theta = std::max(out.inv_theta, excess_time / h.end());
        }
    }
    return out;
}

AssumptionReport check_assumptions(const DosSchedule& schedule, const DosCharacterization& params,
                                   int grid_points)
{
    AssumptionReport report;
    const double horizon = schedule.horizon();

    auto check = [&](double t, double count, double denied) {
        ++report.points_checked;
        const double freq_rhs = params.eta + t * params.inv_tau_d;
        if (count > freq_rhs + kAssumptionTolerance) {
            report.violations.push_back({AssumptionViolation::Kind::Frequency, t, count, freq_rhs});
        }
        const double dur_rhs = params.kappa + t * params.inv_theta;
        if (denied > dur_rhs + kAssumptionTolerance) {
            report.violations.push_back({AssumptionViolation::Kind::Duration, t, denied, dur_rhs});
        }
    };

    double denied = 0.0;
    const auto& intervals = schedule.intervals();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const DosInterval& h = intervals[i];
        check(h.start, static_cast<double>(i + 1), denied);  // right limit at the start
        denied += h.duration;
        check(h.end(), static_cast<double>(i + 1), denied);
    }

    if (std::isfinite(horizon) && grid_points > 0) {
        for (int j = 0; j <= grid_points; ++j) {
            const double t = horizon * static_cast<double>(j) / grid_points;
            check(t, static_cast<double>(schedule.count_transitions(t)), schedule.total_denied(t));
        }
    }
    return report;
}

DosSchedule generate_random(const DosCharacterization& c, double horizon, std::uint64_t seed)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("generate_random: horizon must be positive and finite");
    }
    if (!(c.inv_theta >= 0.0) || !(c.inv_tau_d >= 0.0) || !(c.kappa >= 0.0) || !(c.eta >= 0.0)) {
        throw std::invalid_argument("generate_random: constraint parameters must be non-negative");
    }
    if (!c.duration_feasible()) {
        throw InfeasibleConstraints("generate_random: 1/theta must be below 1");
    }
    if (c.kappa == 0.0 && c.inv_theta == 0.0) {
        return DosSchedule({}, horizon);
    }

    const double cycle = c.inv_tau_d > 0.0 ? 1.0 / c.inv_tau_d : horizon / std::max(1.0, c.eta);
    const double duty = std::min(0.95, c.inv_theta + c.kappa / horizon);
    const double mean_on = duty * cycle;
    const double mean_off = cycle - mean_on;

    Rng rng(seed);
    std::vector<DosInterval> out;
    double cursor = 0.0;
    double denied = 0.0;
    int rejections = 0;

    for (;;) {
        const double count = static_cast<double>(out.size() + 1);
        // Stop once no start in [cursor, horizon) could satisfy either inequality.
        if (count > c.eta + horizon * c.inv_tau_d || c.kappa + horizon * c.inv_theta - denied <= 0.0) {
            break;
        }

        // Off-times run from the earliest start both budgets admit.
        double earliest = cursor;
        if (count > c.eta) {
            earliest = std::max(earliest, (count - c.eta) / c.inv_tau_d);
        }
        if (denied >= c.kappa) {
            earliest = std::max(earliest, (denied - c.kappa) / c.inv_theta);
        }
        const double off = rng.uniform(0.0, 2.0 * mean_off);
        const double on = rng.uniform(0.0, 2.0 * mean_on);
        const double start = earliest + off;
        if (start >= horizon) {
            break;
        }
        const double duration = std::min(on, horizon - start);
        const bool ok = duration > 0.0 && count <= c.eta + start * c.inv_tau_d &&
                        denied + duration <= c.kappa + (start + duration) * c.inv_theta;
        if (!ok) {
            if (++rejections >= kMaxRejections) {
                throw InfeasibleConstraints("generate_random: no admissible interval after " +
                                            std::to_string(kMaxRejections) + " draws");
            }
            continue;
        }
        rejections = 0;
        out.push_back({start, duration});
        denied += duration;
        cursor = start + duration;
    }
    return DosSchedule(std::move(out), horizon);
}

}  // namespace ftsdos
