#pragma once

#include <vector>

namespace ftsdos {

/**
 * @brief Scalar class-K function r -> f(r) on [0, inf).
 *
 * Two families are supported: the power law k * r^p (k > 0, p > 0) and a
 * tabulated strictly increasing curve through (0, 0), interpolated linearly
 * and extrapolated with the last slope. Both families are unbounded, so
 * every instance is also class-K-infinity.
 */
class ClassKFn {
public:
    enum class Form { PowerLaw, Tabulated };

    static ClassKFn power_law(double gain, double exponent);
    static ClassKFn tabulated(std::vector<double> radii, std::vector<double> values);

    /// Throws std::invalid_argument for r < 0 or non-finite r.
    double operator()(double r) const;

    /// Inverse on [0, inf). Closed form for power laws, bisection to 1e-12 otherwise.
    double inverse(double value) const;

    bool is_k_infinity() const { return true; }

    Form form() const { return form_; }
    double gain() const { return gain_; }
    double exponent() const { return exponent_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& values() const { return values_; }

private:
    ClassKFn() = default;

    Form form_ = Form::PowerLaw;
    double gain_ = 1.0;
    double exponent_ = 1.0;
    std::vector<double> radii_;
    std::vector<double> values_;
};

}  // namespace ftsdos
