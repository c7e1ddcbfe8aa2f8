#include "ftsdos/classk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftsdos {

ClassKFn ClassKFn::power_law(double gain, double exponent)
{
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw std::invalid_argument("class-K power law: gain must be positive and finite");
    }
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw std::invalid_argument("class-K power law: exponent must be positive and finite");
    }
    ClassKFn f;
    f.form_ = Form::PowerLaw;
    f.gain_ = gain;
    f.exponent_ = exponent;
    return f;
}

ClassKFn ClassKFn::tabulated(std::vector<double> radii, std::vector<double> values)
{
    if (radii.size() != values.size() || radii.size() < 2) {
        throw std::invalid_argument("class-K table: need at least two (r, value) pairs of equal length");
    }
    if (radii.front() != 0.0 || values.front() != 0.0) {
        throw std::invalid_argument("class-K table: first sample must be (0, 0)");
    }
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1]) || !(values[i] > values[i - 1]) ||
            !std::isfinite(radii[i]) || !std::isfinite(values[i])) {
            throw std::invalid_argument("class-K table: samples must be finite and strictly increasing");
        }
    }
    ClassKFn f;
    f.form_ = Form::Tabulated;
    f.radii_ = std::move(radii);
    f.values_ = std::move(values);
    return f;
}

double ClassKFn::operator()(double r) const
{
    if (!(r >= 0.0)) {
        throw std::invalid_argument("class-K function evaluated at a negative or NaN argument");
    }
    if (form_ == Form::PowerLaw) {
        if (r == 0.0) {
            return 0.0;
        }
        return gain_ * std::pow(r, exponent_);
    }

    const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
    std::size_t hi = static_cast<std::size_t>(it - radii_.begin());
    if (hi >= radii_.size()) {
        hi = radii_.size() - 1;  // extrapolate beyond the table with the last slope
    }
    const std::size_t lo = hi - 1;
    const double slope = (values_[hi] - values_[lo]) / (radii_[hi] - radii_[lo]);
    return values_[lo] + slope * (r - radii_[lo]);
}

double ClassKFn::inverse(double value) const
{
    if (!(value >= 0.0)) {
        throw std::invalid_argument("class-K inverse of a negative or NaN value");
    }
    if (value == 0.0) {
        return 0.0;
    }
    if (form_ == Form::PowerLaw) {
        return std::pow(value / gain_, 1.0 / exponent_);
    }

    double lo = 0.0;
    double hi = radii_.back();
    while ((*this)(hi) < value) {
        hi *= 2.0;
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(mid) < value) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace ftsdos
