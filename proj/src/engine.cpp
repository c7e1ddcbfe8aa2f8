#include "ftsdos/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftsdos {

std::string to_string(TriggerKind kind)
{
    switch (kind) {
    case TriggerKind::ContinuousEtm: return "continuous-etm";
    case TriggerKind::HybridEtm: return "hybrid-etm";
    case TriggerKind::TimeTriggered: return "time-triggered";
    case TriggerKind::ContinuousReference: return "continuous-feedback-reference";
    }
    return "unknown";
}

std::optional<TriggerKind> parse_trigger_kind(const std::string& s)
{
    for (TriggerKind k : {TriggerKind::ContinuousEtm, TriggerKind::HybridEtm,
                          TriggerKind::TimeTriggered, TriggerKind::ContinuousReference}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

std::string to_string(RunStatus status)
{
    switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Zeno: return "zeno";
    }
    return "unknown";
}

void TriggerPolicy::validate() const
{
    const bool etm = kind == TriggerKind::ContinuousEtm || kind == TriggerKind::HybridEtm;
    if (etm && !(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("trigger policy: lambda must lie in (0, 1)");
    }
    if (kind == TriggerKind::HybridEtm) {
        if (!(delta_lower > 0.0)) {
            throw std::invalid_argument("trigger policy: delta_lower must be positive");
        }
        if (!(delta_bar > 0.0) || delta_lower > delta_bar) {
            throw std::invalid_argument("trigger policy: need 0 < delta_lower <= delta_bar");
        }
    }
    if (kind == TriggerKind::TimeTriggered && !(period > 0.0)) {
        throw std::invalid_argument("trigger policy: period must be positive");
    }
}

std::size_t SimLog::transmissions() const
{
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [](const EventRecord& e) { return e.transmitted; }));
}

Vector integrate_step(const PlantModel& model, const Vector& x, const Vector& u, double t, double h)
{
    if (!(h > 0.0)) {
        throw std::invalid_argument("integrate_step: step must be positive");
    }
    const Vector k1 = model.f(x, u, t);
    const Vector k2 = model.f(x + 0.5 * h * k1, u, t + 0.5 * h);
    const Vector k3 = model.f(x + 0.5 * h * k2, u, t + 0.5 * h);
    const Vector k4 = model.f(x + h * k3, u, t + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double locate_trigger(const std::function<double(double)>& condition, double t_lo, double t_hi,
                      double tolerance)
{
    if (!(t_hi >= t_lo)) {
        throw std::invalid_argument("locate_trigger: empty bracket");
    }
    if (condition(t_lo) > 0.0) {
        return t_lo;
    }
    if (!(condition(t_hi) > 0.0)) {
        throw std::invalid_argument("locate_trigger: condition does not change sign in bracket");
    }
    double lo = t_lo;
    double hi = t_hi;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (condition(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double trigger_condition(const LyapunovCertificate& cert, double lambda, const Vector& x,
                         const Vector& last_sample)
{
    const double gain = cert.gamma()(4.0 * (last_sample - x).norm());
    const double v = cert.V(x);
    return gain - cert.c() * (1.0 - lambda) * std::pow(std::max(v, 0.0), cert.a());
}

namespace {

// Cubic Hermite interpolant on a single step.
struct StepInterpolant {
    double t0, dt;
    Vector x0, x1, f0, f1;

    Vector operator()(double t) const
    {
        const double s = (t - t0) / dt;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * dt * f0 +
               (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * dt * f1;
    }
};

class ClosedLoop {
public:
    ClosedLoop(const PlantModel& model, const LyapunovCertificate* cert, const TriggerPolicy& policy,
               const DosSchedule& schedule, double horizon, double h, const SimOptions& options)
        : model_(model), cert_(cert), policy_(policy), schedule_(schedule), horizon_(horizon),
          h_(h), opt_(options)
    {
    }

    SimLog run(const Vector& x0);

private:
    bool etm() const
    {
        return policy_.kind == TriggerKind::ContinuousEtm || policy_.kind == TriggerKind::HybridEtm;
    }
    bool denied(double t) const { return schedule_.is_denied(std::min(t, horizon_)); }
    bool etm_armed() const { return etm() && !retrying_ && last_sample_.has_value(); }

    Vector advance(const Vector& x, double t, double dt) const;
    double condition(const Vector& x) const
    {
        return trigger_condition(*cert_, policy_.lambda, x, *last_sample_);
    }

    bool event(double t, std::size_t row);
    void record_row(double t);
    bool diverged(const Vector& x);
    void clamp_if_settled(double t, std::size_t row, bool at_sample);

    const PlantModel& model_;
    const LyapunovCertificate* cert_;
    const TriggerPolicy& policy_;
    const DosSchedule& schedule_;
    double horizon_;
    double h_;
    SimOptions opt_;

    SimLog log_;
    Vector x_;
    Vector u_;
    std::optional<Vector> last_sample_;
    bool retrying_ = false;  // last event was denied (hybrid retry mode)
    double next_scheduled_ = std::numeric_limits<double>::infinity();
    long sample_index_ = 0;
    bool stopped_ = false;
};

Vector ClosedLoop::advance(const Vector& x, double t, double dt) const
{
    if (dt <= 0.0) {
        return x;
    }
    if (policy_.kind == TriggerKind::ContinuousReference) {
        auto F = [&](const Vector& s, double tau) { return model_.f(s, model_.psi(s), tau); };
        const Vector k1 = F(x, t);
        const Vector k2 = F(x + 0.5 * dt * k1, t + 0.5 * dt);
        const Vector k3 = F(x + 0.5 * dt * k2, t + 0.5 * dt);
        const Vector k4 = F(x + dt * k3, t + dt);
        return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return integrate_step(model_, x, u_, t, dt);
}

bool ClosedLoop::event(double t, std::size_t row)
{
    if (!log_.events.empty()) {
        const double gap = t - log_.events.back().t;
        if (gap < opt_.zeno_gap) {
            log_.status = RunStatus::Zeno;
            log_.status_detail = "inter-event time " + std::to_string(gap) + " below Zeno guard";
            stopped_ = true;
            return false;
        }
        log_.min_inter_event = std::min(log_.min_inter_event, gap);
    }

    const bool is_denied = denied(t);
    EventRecord rec;
    rec.t = t;
    rec.during_dos = is_denied;
    rec.transmitted = !is_denied;
    rec.state = x_;
    rec.row = row;

    if (!is_denied) {
        last_sample_ = x_;
        u_ = model_.psi(x_);
        retrying_ = false;
    } else {
        u_ = held_input(model_, policy_.strategy, last_sample_);
    }

    if (policy_.kind == TriggerKind::HybridEtm) {
        next_scheduled_ = is_denied ? t + policy_.delta_bar : std::numeric_limits<double>::infinity();
        retrying_ = is_denied;
    } else if (policy_.kind == TriggerKind::TimeTriggered) {
        ++sample_index_;
        const double next = static_cast<double>(sample_index_) * policy_.period;
        next_scheduled_ = next < horizon_ - 1e-9 * policy_.period
                              ? next
                              : std::numeric_limits<double>::infinity();
    }
    log_.events.push_back(std::move(rec));
    return true;
}

void ClosedLoop::record_row(double t)
{
    if (policy_.kind == TriggerKind::ContinuousReference) {
        u_ = model_.psi(x_);
    }
    log_.times.push_back(t);
    log_.states.push_back(x_);
    log_.inputs.push_back(u_);
    log_.lyapunov.push_back(cert_ ? cert_->V(x_) : std::numeric_limits<double>::quiet_NaN());
    if (policy_.kind == TriggerKind::ContinuousReference) {
        log_.error_norm.push_back(0.0);
    } else {
        log_.error_norm.push_back(closed_loop_error(last_sample_, x_).norm());
    }
    log_.denied.push_back(denied(t) ? 1 : 0);
}

bool ClosedLoop::diverged(const Vector& x)
{
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm > opt_.divergence_norm) {
        log_.status = RunStatus::Diverged;
        log_.status_detail = std::isfinite(norm) ? "state norm exceeded divergence bound"
                                                 : "non-finite state";
        stopped_ = true;
        return true;
    }
    return false;
}

void ClosedLoop::clamp_if_settled(double t, std::size_t row, bool at_sample)
{
    if (log_.settled_at || x_.norm() >= opt_.settle_epsilon) {
        return;
    }
    switch (policy_.kind) {
    case TriggerKind::ContinuousReference:
        x_.setZero();
        u_ = model_.psi(x_);
        break;
    case TriggerKind::TimeTriggered:
        // Only at a sample instant that will be delivered; the caller samples right after.
        if (!at_sample || denied(t)) {
            return;
        }
        x_.setZero();
        break;
    case TriggerKind::ContinuousEtm:
    case TriggerKind::HybridEtm:
        if (retrying_ || denied(t)) {
            return;
        }
        x_.setZero();
        if (!log_.events.empty() && log_.events.back().t == t && log_.events.back().transmitted) {
            // Sample delivered at this very instant: deliver the clamped state instead.
            log_.events.back().state = x_;
            last_sample_ = x_;
            u_ = model_.psi(x_);
        } else if (last_sample_ && last_sample_->norm() > 0.0) {
            // With V = 0 the trigger fires at once unless the held sample is already zero.
            if (!event(t, row)) {
                return;
            }
        }
        break;
    }
    log_.settled_at = t;
}

SimLog ClosedLoop::run(const Vector& x0)
{
    const double steps_real = horizon_ / h_;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (steps == 0 || std::abs(static_cast<double>(steps) * h_ - horizon_) > 1e-9 * horizon_) {
        throw std::invalid_argument("simulate: horizon must be a whole number of steps");
    }

    log_.state_dim = model_.state_dim;
    log_.input_dim = model_.input_dim;
    log_.step = h_;
    log_.horizon = horizon_;
    log_.policy = policy_;
    log_.times.reserve(steps + 1);

    x_ = x0;
    u_ = Vector::Zero(model_.input_dim);

    if (policy_.kind == TriggerKind::ContinuousReference) {
        u_ = model_.psi(x_);
        log_.events.push_back({0.0, true, denied(0.0), x_, 0});
        last_sample_ = x_;
    } else {
        if (policy_.kind == TriggerKind::TimeTriggered) {
            clamp_if_settled(0.0, 0, true);
        }
        event(0.0, 0);
    }
    if (policy_.kind != TriggerKind::TimeTriggered) {
        clamp_if_settled(0.0, 0, false);
    }
    record_row(0.0);

    for (std::size_t i = 0; i < steps && !stopped_; ++i) {
        const double t_end = i + 1 == steps ? horizon_ : static_cast<double>(i + 1) * h_;
        const std::size_t row = i + 1;
        double t = log_.times.back();

        while (!stopped_) {
            double target = t_end;
            bool scheduled = false;
            if (next_scheduled_ <= t_end + 1e-9 * h_) {
                target = std::min(next_scheduled_, t_end);
                if (t_end - target <= 1e-9 * h_) {
                    target = t_end;
                }
                scheduled = true;
            }

            const double dt = target - t;
            Vector x_next = advance(x_, t, dt);
            if (diverged(x_next)) {
                break;
            }

            if (etm_armed() && dt > 0.0 && condition(x_next) > 0.0) {
                StepInterpolant interp{t, dt, x_, x_next, model_.f(x_, u_, t),
                                       model_.f(x_next, u_, target)};
                const double t_event = locate_trigger(
                    [&](double tau) { return condition(interp(tau)); }, t, target,
                    opt_.trigger_tolerance);
                x_ = advance(x_, t, t_event - t);
                t = t_event;
                if (diverged(x_) || !event(t, row)) {
                    break;
                }
                continue;
            }

            x_ = std::move(x_next);
            t = target;
            if (scheduled) {
                if (policy_.kind == TriggerKind::TimeTriggered) {
                    clamp_if_settled(t, row, true);
                }
                if (!event(t, row)) {
                    break;
                }
            }
            if (target >= t_end) {
                break;
            }
        }
        if (stopped_) {
            break;
        }

        if (policy_.kind != TriggerKind::TimeTriggered) {
            clamp_if_settled(t_end, row, false);
            if (stopped_) {
                break;
            }
        }
        record_row(t_end);
    }
    return std::move(log_);
}

}  // namespace

SimLog simulate(const PlantModel& model, const LyapunovCertificate& cert,
                const TriggerPolicy& policy, const DosSchedule& schedule, const Vector& x0,
                double horizon, double h, const SimOptions& options)
{
    policy.validate();
    if (!(h > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("simulate: step and horizon must be positive");
    }
    if (x0.size() != model.state_dim) {
        throw std::invalid_argument("simulate: initial state has the wrong dimension");
    }
    if (x0.norm() > cert.domain_radius()) {
        throw std::invalid_argument("simulate: initial state outside the certificate domain");
    }
    if (policy.kind == TriggerKind::ContinuousEtm && !schedule.empty()) {
        throw std::invalid_argument(
            "simulate: continuous-etm has no rule for denied samples; use hybrid-etm under DoS");
    }
    if (policy.kind == TriggerKind::HybridEtm && h > policy.delta_lower / 10.0) {
        throw std::invalid_argument("simulate: step must not exceed delta_lower / 10");
    }
    if (schedule.horizon() < horizon) {
        throw std::invalid_argument("simulate: DoS schedule shorter than the simulation horizon");
    }
    ClosedLoop loop(model, &cert, policy, schedule, horizon, h, options);
    return loop.run(x0);
}

SimLog simulate_time_triggered(const PlantModel& model, const Vector& x0, double period,
                               double horizon, double h, const LyapunovCertificate* cert,
                               const SimOptions& options)
{
    TriggerPolicy policy;
    policy.kind = TriggerKind::TimeTriggered;
    policy.period = period;
    policy.validate();
    if (!(h > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("simulate: step and horizon must be positive");
    }
    const DosSchedule none;
    ClosedLoop loop(model, cert, policy, none, horizon, h, options);
    return loop.run(x0);
}

SimLog simulate_reference(const PlantModel& model, const Vector& x0, double horizon, double h,
                          const LyapunovCertificate* cert, const SimOptions& options)
{
    TriggerPolicy policy;
    policy.kind = TriggerKind::ContinuousReference;
    if (!(h > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("simulate: step and horizon must be positive");
    }
    const DosSchedule none;
    ClosedLoop loop(model, cert, policy, none, horizon, h, options);
    return loop.run(x0);
}

}  // namespace ftsdos
