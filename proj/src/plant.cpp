#include "ftsdos/plant.hpp"

#include <cmath>

namespace ftsdos {

std::string to_string(InputStrategy s)
{
    return s == InputStrategy::HoldLast ? "hold-last" : "zero-input";
}

std::optional<InputStrategy> parse_input_strategy(const std::string& s)
{
    if (s == "hold-last") {
        return InputStrategy::HoldLast;
    }
    if (s == "zero-input") {
        return InputStrategy::ZeroInput;
    }
    return std::nullopt;
}

Vector closed_loop_error(const std::optional<Vector>& last_sample, const Vector& x)
{
    if (!last_sample) {
        return -x;
    }
    return *last_sample - x;
}

Vector held_input(const PlantModel& model, InputStrategy strategy,
                  const std::optional<Vector>& last_successful_sample)
{
    if (strategy == InputStrategy::ZeroInput || !last_successful_sample) {
        return Vector::Zero(model.input_dim);
    }
    return model.psi(*last_successful_sample);
}

PlantWithCertificate builtin_example()
{
    PlantModel plant;
    plant.name = "fts_scalar";
    plant.state_dim = 1;
    plant.input_dim = 1;
    plant.dynamics = [](const Vector& x, const Vector& u, double) {
        Vector dx(1);
        dx[0] = -sgn(x[0]) * std::sqrt(std::abs(x[0])) + x[0] + u[0];
        return dx;
    };
    plant.feedback = [](const Vector& x) {
        Vector u(1);
        u[0] = -2.0 * x[0];
        return u;
    };

    LyapunovCertificate::Params p;
    p.state_dim = 1;
    p.V = [](const Vector& x) { return x.squaredNorm(); };
    p.grad_V = [](const Vector& x) { return Vector(2.0 * x); };
    p.a = 0.75;
    p.c = 2.0;
    p.gamma = ClassKFn::power_law(2.0, 2.0);
    p.alpha1 = ClassKFn::power_law(1.0, 2.0);
    // alpha2(r) = r^2 would already suffice for V = x^2; 3r^2 is kept for reproduction.
    p.alpha2 = ClassKFn::power_law(3.0, 2.0);
    p.mu = 55.43;
    p.lambda = 0.5;
    p.domain_radius = 3.0;

    return {std::move(plant), LyapunovCertificate(std::move(p))};
}

PlantModel linear_decay_plant()
{
    PlantModel plant;
    plant.name = "linear_decay";
    plant.state_dim = 1;
    plant.input_dim = 1;
    plant.dynamics = [](const Vector& x, const Vector& u, double) { return Vector(-x + u); };
    plant.feedback = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
    return plant;
}

std::vector<std::string> builtin_plant_names()
{
    return {"fts_scalar"};
}

std::optional<PlantWithCertificate> builtin_plant(const std::string& name)
{
    if (name == "fts_scalar") {
        return builtin_example();
    }
    return std::nullopt;
}

}  // namespace ftsdos
