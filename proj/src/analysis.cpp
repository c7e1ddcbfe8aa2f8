#include "ftsdos/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace ftsdos {

std::string to_string(BoundId id)
{
    switch (id) {
    case BoundId::Theorem1Decay: return "theorem1-decay";
    case BoundId::Lemma5Growth: return "lemma5-growth";
    case BoundId::Theorem2Envelope: return "theorem2-envelope";
    case BoundId::LambdaMeasure: return "lambda-measure";
    }
    return "unknown";
}

namespace {

void compare(BoundReport& report, double t, double lhs, double rhs, double tol)
{
    ++report.points_checked;
    const double residual = lhs - rhs;
    report.max_residual = std::max(report.max_residual, residual);
    if (!(residual <= tol)) {
        report.violations.push_back({t, lhs, rhs, residual});
    }
}

// Rows with times strictly inside (t_lo, t_hi).
std::pair<std::size_t, std::size_t> rows_between(const SimLog& log, double t_lo, double t_hi)
{
    const auto first = std::upper_bound(log.times.begin(), log.times.end(), t_lo);
    const auto last = std::lower_bound(first, log.times.end(), t_hi);
    return {static_cast<std::size_t>(first - log.times.begin()),
            static_cast<std::size_t>(last - log.times.begin())};
}

double log_end(const SimLog& log)
{
    return log.times.empty() ? 0.0 : log.times.back();
}

}  // namespace

BoundReport check_theorem1(const SimLog& log, const LyapunovCertificate& cert)
{
    BoundReport report;
    report.bound_id = BoundId::Theorem1Decay;
    const double q = 1.0 - cert.a();
    const double omega1 = cert.c() * cert.lambda();

    for (std::size_t k = 0; k < log.events.size(); ++k) {
        const EventRecord& ev = log.events[k];
        if (!ev.transmitted) {
            continue;
        }
        // The last sub-interval runs to the end of the log, inclusive.
        const bool last = k + 1 == log.events.size();
        const double t_next = last ? std::nextafter(log_end(log), INFINITY) : log.events[k + 1].t;
        auto [first, end] = rows_between(log, ev.t, t_next);

        bool touched = false;
        for (std::size_t i = first; i < end && !touched; ++i) {
            touched = log.denied[i] != 0;
        }
        if (touched) {
            continue;
        }
        ++report.intervals_checked;
        const double base = std::pow(cert.V(ev.state), q);
        for (std::size_t i = first; i < end; ++i) {
            const double lhs = std::pow(std::max(log.lyapunov[i], 0.0), q);
            const double rhs = std::max(0.0, base - q * omega1 * (log.times[i] - ev.t));
            compare(report, log.times[i], lhs, rhs, bound_tolerance(rhs));
        }
    }
    return report;
}

BoundReport check_lemma5(const SimLog& log, const LyapunovCertificate& cert,
                         const DosSchedule& schedule)
{
    BoundReport report;
    report.bound_id = BoundId::Lemma5Growth;
    if (schedule.empty()) {
        report.note = "no denial intervals";
        return report;
    }
    if (log.policy.strategy != InputStrategy::HoldLast) {
        report.note = "not applicable: growth bound assumes the hold-last strategy";
        return report;
    }
    const double q = 1.0 - cert.a();
    const double omega2 = cert.c() * (1.0 - cert.lambda()) + 2.0 * cert.mu();

    bool delivered_before = false;
    for (std::size_t k = 0; k < log.events.size(); ++k) {
        const EventRecord& ev = log.events[k];
        if (ev.transmitted) {
            delivered_before = true;
            continue;
        }
        const bool episode_start = k > 0 && log.events[k - 1].transmitted;
        if (!episode_start || !delivered_before) {
            continue;
        }
        double t_success = std::nextafter(log_end(log), INFINITY);
        for (std::size_t j = k + 1; j < log.events.size(); ++j) {
            if (log.events[j].transmitted) {
                t_success = log.events[j].t;
                break;
            }
        }
        ++report.intervals_checked;
        const double base = std::pow(cert.V(ev.state), q);
        auto [first, end] = rows_between(log, ev.t, t_success);
        for (std::size_t i = first; i < end; ++i) {
            const double lhs = std::pow(std::max(log.lyapunov[i], 0.0), q);
            const double rhs = base + q * omega2 * (log.times[i] - ev.t);
            compare(report, log.times[i], lhs, rhs, bound_tolerance(rhs));
        }
    }
    return report;
}

BoundReport check_theorem2_envelope(const SimLog& log, const LyapunovCertificate& cert,
                                    const StabilityMargin& margin)
{
    BoundReport report;
    report.bound_id = BoundId::Theorem2Envelope;
    std::vector<std::string> unmet;
    if (!margin.satisfied) {
        unmet.push_back("attack-load condition not satisfied");
    }
    if (log.policy.kind != TriggerKind::HybridEtm && log.policy.kind != TriggerKind::ContinuousEtm) {
        unmet.push_back("trigger is not the hybrid event-triggered mechanism");
    }
    if (log.policy.strategy != InputStrategy::HoldLast) {
        unmet.push_back("strategy is not hold-last");
    }
    if (log.status != RunStatus::Completed) {
        unmet.push_back("run did not complete");
    }
    for (const std::string& s : unmet) {
        report.note += (report.note.empty() ? "preconditions unmet: " : "; ") + s;
    }
    if (log.rows() == 0) {
        return report;
    }

    const double x0_norm = log.states.front().norm();
    ++report.intervals_checked;
    for (std::size_t i = 0; i < log.rows(); ++i) {
        const double rhs = state_envelope(cert, x0_norm, margin, log.times[i]);
        compare(report, log.times[i], log.states[i].norm(), rhs, 1e-6);
    }
    return report;
}

LambdaMeasure lambda_measure(const SimLog& log, const DosSchedule& schedule, double delta_bar,
                             double eta, double tau_d, double theta, double kappa, double t)
{
    LambdaMeasure out;
    const double inv_theta = std::isinf(theta) ? 0.0 : 1.0 / theta;
    const double inv_tau_d = std::isinf(tau_d) ? 0.0 : 1.0 / tau_d;
    out.bound = kappa + t * inv_theta + delta_bar * (eta + t * inv_tau_d);

    std::vector<std::pair<double, double>> regions;
    for (const DosInterval& h : schedule.intervals()) {
        if (h.start >= t) {
            break;
        }
        const bool attempted = std::any_of(log.events.begin(), log.events.end(), [&](const EventRecord& e) {
            return e.t >= h.start && e.t < h.end();
        });
        double stop = h.end();
        if (attempted) {
            stop = std::numeric_limits<double>::infinity();
            for (const EventRecord& e : log.events) {
                if (e.transmitted && e.t >= h.end()) {
                    stop = e.t;
                    break;
                }
            }
        }
        regions.emplace_back(h.start, std::min(stop, t));
    }

    double cursor = 0.0;
    for (const auto& [lo, hi] : regions) {
        const double from = std::max(lo, cursor);
        if (hi > from) {
            out.measured += hi - from;
            cursor = hi;
        }
    }
    return out;
}

BoundReport check_lambda_measure(const SimLog& log, const DosSchedule& schedule, double delta_bar,
                                 const DosCharacterization& params)
{
    BoundReport report;
    report.bound_id = BoundId::LambdaMeasure;
    std::vector<double> probes;
    for (const DosInterval& h : schedule.intervals()) {
        if (h.end() <= log_end(log)) {
            probes.push_back(h.end());
        }
    }
    probes.push_back(log_end(log));
    report.intervals_checked = schedule.size();
    for (double t : probes) {
        const LambdaMeasure m = lambda_measure(log, schedule, delta_bar, params.eta, params.tau_d(),
                                               params.theta(), params.kappa, t);
        compare(report, t, m.measured, m.bound, bound_tolerance(m.bound));
    }
    return report;
}

std::optional<double> settling_time(const SimLog& log, double epsilon)
{
    if (log.status != RunStatus::Completed || log.rows() == 0) {
        return std::nullopt;
    }
    std::size_t i = log.rows();
    while (i > 0 && log.states[i - 1].norm() < epsilon) {
        --i;
    }
    if (i == log.rows()) {
        return std::nullopt;
    }
    return log.times[i];
}

}  // namespace ftsdos
