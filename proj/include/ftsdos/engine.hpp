#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ftsdos/certificate.hpp"
#include "ftsdos/dos.hpp"
#include "ftsdos/plant.hpp"

namespace ftsdos {

enum class TriggerKind {
    ContinuousEtm,        // Lyapunov-rate trigger, no rule for denied samples
    HybridEtm,            // trigger outside DoS, fixed retry period inside
    TimeTriggered,        // periodic sampling
    ContinuousReference,  // u = psi(x(t)) without sampling
};

std::string to_string(TriggerKind kind);
std::optional<TriggerKind> parse_trigger_kind(const std::string& s);

struct TriggerPolicy {
    TriggerKind kind = TriggerKind::HybridEtm;
    double lambda = 0.5;
    double delta_bar = 0.1;    // retry period while denied
    double delta_lower = 0.01; // floor on retry periods
    double period = 0.02;      // time-triggered sampling period
    InputStrategy strategy = InputStrategy::HoldLast;

    /// Throws std::invalid_argument on inconsistent fields.
    void validate() const;
};

struct SimOptions {
    double settle_epsilon = 1e-7;
    double divergence_norm = 1e6;
    double zeno_gap = 1e-6;
    double trigger_tolerance = 1e-8;
};

enum class RunStatus { Completed, Diverged, Zeno };

std::string to_string(RunStatus status);

struct EventRecord {
    double t = 0.0;
    bool transmitted = false;
    bool during_dos = false;
    Vector state;           // x(t_k)
    std::size_t row = 0;    // grid row whose interval (t_{row-1}, t_row] contains t_k
};

/**
 * @brief Dense trajectory of one closed-loop run.
 *
 * Row i holds the state at t_i = i * step together with the input applied
 * from t_i on (after any event at t_i). Runs that stop early (divergence,
 * Zeno guard) keep every row completed before the stop.
 */
struct SimLog {
    int state_dim = 1;
    int input_dim = 1;
    double step = 0.0;
    double horizon = 0.0;
    TriggerPolicy policy;

    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> inputs;
    std::vector<double> lyapunov;
    std::vector<double> error_norm;
    std::vector<std::uint8_t> denied;

    std::vector<EventRecord> events;
    std::optional<double> settled_at;
    double min_inter_event = std::numeric_limits<double>::infinity();
    RunStatus status = RunStatus::Completed;
    std::string status_detail;

    std::size_t transmissions() const;
    std::size_t rows() const { return times.size(); }
};

/// One classical RK4 step with u held constant.
Vector integrate_step(const PlantModel& model, const Vector& x, const Vector& u, double t, double h);

/**
 * Earliest t in (t_lo, t_hi] with condition(t) > 0, by bisection to @p tolerance.
 * Returns t_lo when the condition is already positive there. Throws
 * std::invalid_argument when condition(t_hi) <= 0.
 */
double locate_trigger(const std::function<double(double)>& condition, double t_lo, double t_hi,
                      double tolerance = 1e-8);

/// gamma(4|e|) - c(1 - lambda) V(x)^a; an event fires when this becomes positive.
double trigger_condition(const LyapunovCertificate& cert, double lambda, const Vector& x,
                         const Vector& last_sample);

/**
 * Runs the sampled closed loop on [0, horizon] with step @p h.
 *
 * Successful samples update u = psi(x(t_k)); denied samples leave the
 * actuator on held_input(strategy). The event at t = 0 is always attempted.
 * Once |x| < settle_epsilon while the channel can deliver a sample, the
 * state is set to exactly zero and settled_at is recorded.
 */
SimLog simulate(const PlantModel& model, const LyapunovCertificate& cert,
                const TriggerPolicy& policy, const DosSchedule& schedule, const Vector& x0,
                double horizon, double h, const SimOptions& options = {});

/// Periodic sampling without attack; V is logged when @p cert is given.
SimLog simulate_time_triggered(const PlantModel& model, const Vector& x0, double period,
                               double horizon, double h,
                               const LyapunovCertificate* cert = nullptr,
                               const SimOptions& options = {});

/// Continuous feedback u = psi(x(t)), the unsampled reference loop.
SimLog simulate_reference(const PlantModel& model, const Vector& x0, double horizon, double h,
                          const LyapunovCertificate* cert = nullptr,
                          const SimOptions& options = {});

}  // namespace ftsdos
