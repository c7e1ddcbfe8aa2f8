#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ftsdos/classk.hpp"
#include "ftsdos/types.hpp"

namespace ftsdos {

/// Condition that a sampled point of the certificate domain failed.
enum class CertificateCondition {
    PositiveDefinite,  // V(0) = 0 and V(x) > 0 away from the origin
    LowerSandwich,     // alpha1(|x|) <= V(x)
    UpperSandwich,     // V(x) <= alpha2(|x|)
    GainDomination,    // gamma(4|x|) <= mu * alpha1(|x|)^a
    NonFinite,
};

std::string to_string(CertificateCondition condition);

/**
 * @brief FTISS Lyapunov certificate for a closed loop x' = F(x, e).
 *
 * Bundles V with the constants of the decay-plus-gain inequality
 * V' <= -c V^a + gamma(|e|), the sandwich alpha1(|x|) <= V(x) <= alpha2(|x|)
 * and the gain domination constant mu with gamma(4|x|) <= mu alpha1(|x|)^a.
 * Construction validates the scalar constants; the functional conditions are
 * checked numerically by check_certificate().
 */
class LyapunovCertificate {
public:
    using ScalarField = std::function<double(const Vector&)>;
    using Gradient = std::function<Vector(const Vector&)>;

    struct Params {
        int state_dim = 1;
        ScalarField V;
        Gradient grad_V;  // optional
        double a = 0.5;
        double c = 1.0;
        ClassKFn gamma = ClassKFn::power_law(1.0, 1.0);
        ClassKFn alpha1 = ClassKFn::power_law(1.0, 1.0);
        ClassKFn alpha2 = ClassKFn::power_law(1.0, 1.0);
        double mu = 1.0;
        double lambda = 0.5;
        double domain_radius = 1.0;
    };

    explicit LyapunovCertificate(Params params);

    int state_dim() const { return p_.state_dim; }
    double V(const Vector& x) const { return p_.V(x); }
    bool has_gradient() const { return static_cast<bool>(p_.grad_V); }
    Vector grad_V(const Vector& x) const;
    double a() const { return p_.a; }
    double c() const { return p_.c; }
    const ClassKFn& gamma() const { return p_.gamma; }
    const ClassKFn& alpha1() const { return p_.alpha1; }
    const ClassKFn& alpha2() const { return p_.alpha2; }
    double mu() const { return p_.mu; }
    double lambda() const { return p_.lambda; }
    double domain_radius() const { return p_.domain_radius; }

    /// Copy with a different mu / lambda / radius (validated like the original).
    LyapunovCertificate with_mu(double mu) const;
    LyapunovCertificate with_lambda(double lambda) const;
    LyapunovCertificate with_domain_radius(double radius) const;

private:
    Params p_;
};

struct CertificateViolation {
    CertificateCondition condition;
    Vector point;
    double residual = 0.0;  // lhs - rhs of the failed inequality, NaN for non-finite values
};

struct CertificateReport {
    std::vector<CertificateViolation> violations;
    std::size_t points_checked = 0;
    std::uint64_t direction_seed = 0;

    bool accepted() const { return violations.empty(); }
};

inline constexpr double kCertificateTolerance = 1e-9;
inline constexpr int kDefaultRadialSamples = 10000;
inline constexpr int kDefaultDirections = 1000;
inline constexpr std::uint64_t kDefaultDirectionSeed = 0x5eed'f75d'05ULL;

/**
 * Samples the domain ball on a radial grid of @p grid_density points per
 * direction (both signs for scalar states, @p directions seeded random unit
 * vectors otherwise) and collects every violated condition.
 */
CertificateReport check_certificate(const LyapunovCertificate& cert,
                                    int grid_density = kDefaultRadialSamples,
                                    int directions = kDefaultDirections,
                                    std::uint64_t direction_seed = kDefaultDirectionSeed);

/**
 * Smallest mu with gamma(4r) <= mu * alpha1(r)^a on (0, radius]: grid supremum
 * of the ratio, refined by golden-section search around the best grid point.
 */
double min_mu(const ClassKFn& gamma, const ClassKFn& alpha1, double a, double radius,
              int grid_density = kDefaultRadialSamples);

}  // namespace ftsdos
