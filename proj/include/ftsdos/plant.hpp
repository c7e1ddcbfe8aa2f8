#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ftsdos/certificate.hpp"
#include "ftsdos/types.hpp"

namespace ftsdos {

/// Plant x' = f(x, u, t) with state feedback u = psi(x).
struct PlantModel {
    using Dynamics = std::function<Vector(const Vector& x, const Vector& u, double t)>;
    using Feedback = std::function<Vector(const Vector& x)>;

    std::string name;
    int state_dim = 1;
    int input_dim = 1;
    Dynamics dynamics;
    Feedback feedback;

    Vector f(const Vector& x, const Vector& u, double t) const { return dynamics(x, u, t); }
    Vector psi(const Vector& x) const { return feedback(x); }
};

/// Input applied by the actuator while it has no fresh sample.
enum class InputStrategy { HoldLast, ZeroInput };

std::string to_string(InputStrategy s);
std::optional<InputStrategy> parse_input_strategy(const std::string& s);

/// e(t) = x(t_k(t)) - x(t) relative to the last successfully transmitted sample.
/// Before any successful transmission the reference sample is taken as the origin.
Vector closed_loop_error(const std::optional<Vector>& last_sample, const Vector& x);

/**
 * Input produced by @p strategy. hold-last applies psi(last sample), zero-input
 * applies zero; with no sample ever transmitted both return zero.
 */
Vector held_input(const PlantModel& model, InputStrategy strategy,
                  const std::optional<Vector>& last_successful_sample);

/// sgn with sgn(0) = 0.
inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

struct PlantWithCertificate {
    PlantModel plant;
    LyapunovCertificate certificate;
};

/**
 * Scalar finite-time plant x' = -sgn(x)|x|^(1/2) + x + u under u = -2x,
 * certified with V = x^2, a = 3/4, c = 2, gamma(r) = 2r^2, alpha1(r) = r^2,
 * alpha2(r) = 3r^2, lambda = 0.5, mu = 55.43 on |x| < 3.
 */
PlantWithCertificate builtin_example();

/// x' = -x + u with psi = 0. Used as an integrator reference.
PlantModel linear_decay_plant();

/// Names accepted by builtin_plant().
std::vector<std::string> builtin_plant_names();

/// Looks up a registered built-in plant together with its certificate.
std::optional<PlantWithCertificate> builtin_plant(const std::string& name);

}  // namespace ftsdos
