#include "ftsdos/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ftsdos/rng.hpp"

namespace ftsdos {

std::string to_string(CertificateCondition condition)
{
    switch (condition) {
    case CertificateCondition::PositiveDefinite: return "positive-definite";
    case CertificateCondition::LowerSandwich: return "lower-sandwich";
    case CertificateCondition::UpperSandwich: return "upper-sandwich";
    case CertificateCondition::GainDomination: return "gain-domination";
    case CertificateCondition::NonFinite: return "non-finite";
    }
    return "unknown";
}

namespace {

void validate(const LyapunovCertificate::Params& p)
{
    if (p.state_dim < 1) {
        throw std::invalid_argument("certificate: state dimension must be positive");
    }
    if (!p.V) {
        throw std::invalid_argument("certificate: V evaluator is required");
    }
    if (!(p.a > 0.0 && p.a < 1.0)) {
        throw std::invalid_argument("certificate: exponent a must lie in (0, 1)");
    }
    if (!(p.c > 0.0) || !std::isfinite(p.c)) {
        throw std::invalid_argument("certificate: decay constant c must be positive");
    }
    if (!(p.mu > 0.0) || !std::isfinite(p.mu)) {
        throw std::invalid_argument("certificate: mu must be positive");
    }
    if (!(p.lambda > 0.0 && p.lambda < 1.0)) {
        throw std::invalid_argument("certificate: lambda must lie in (0, 1)");
    }
    if (!(p.domain_radius > 0.0) || !std::isfinite(p.domain_radius)) {
        throw std::invalid_argument("certificate: domain radius must be positive");
    }
}

}  // namespace

LyapunovCertificate::LyapunovCertificate(Params params) : p_(std::move(params))
{
    validate(p_);
}

Vector LyapunovCertificate::grad_V(const Vector& x) const
{
    if (!p_.grad_V) {
        throw std::logic_error("certificate has no gradient evaluator");
    }
    return p_.grad_V(x);
}

LyapunovCertificate LyapunovCertificate::with_mu(double mu) const
{
    Params p = p_;
    p.mu = mu;
    return LyapunovCertificate(std::move(p));
}

LyapunovCertificate LyapunovCertificate::with_lambda(double lambda) const
{
    Params p = p_;
    p.lambda = lambda;
    return LyapunovCertificate(std::move(p));
}

LyapunovCertificate LyapunovCertificate::with_domain_radius(double radius) const
{
    Params p = p_;
    p.domain_radius = radius;
    return LyapunovCertificate(std::move(p));
}

CertificateReport check_certificate(const LyapunovCertificate& cert, int grid_density,
                                    int directions, std::uint64_t direction_seed)
{
    if (grid_density < 2) {
        throw std::invalid_argument("check_certificate: grid density must be at least 2");
    }
    CertificateReport report;
    report.direction_seed = direction_seed;

    const int n = cert.state_dim();
    const double radius = cert.domain_radius();
    const double tol = kCertificateTolerance;

    std::vector<Vector> dirs;
    if (n == 1) {
        dirs.push_back(Vector::Constant(1, 1.0));
        dirs.push_back(Vector::Constant(1, -1.0));
    } else {
        Rng rng(direction_seed);
        dirs.reserve(static_cast<std::size_t>(directions));
        while (static_cast<int>(dirs.size()) < directions) {
            Vector d(n);
            for (int j = 0; j < n; ++j) {
                d[j] = rng.normal();
            }
            const double norm = d.norm();
            if (norm > 1e-12) {
                dirs.push_back(d / norm);
            }
        }
    }

    auto flag = [&](CertificateCondition cond, const Vector& x, double residual) {
        report.violations.push_back({cond, x, residual});
    };

    const Vector origin = Vector::Zero(n);
    const double v0 = cert.V(origin);
    ++report.points_checked;
    if (!std::isfinite(v0)) {
        flag(CertificateCondition::NonFinite, origin, std::numeric_limits<double>::quiet_NaN());
    } else if (std::abs(v0) > tol) {
        flag(CertificateCondition::PositiveDefinite, origin, std::abs(v0));
    }

    // Gain domination depends on |x| only.
    for (int i = 1; i <= grid_density; ++i) {
        const double r = radius * static_cast<double>(i) / grid_density;
        const double lhs = cert.gamma()(4.0 * r);
        const double rhs = cert.mu() * std::pow(cert.alpha1()(r), cert.a());
        if (lhs > rhs + tol) {
            Vector x = dirs.front() * r;
            flag(CertificateCondition::GainDomination, x, lhs - rhs);
        }
    }

    for (const Vector& d : dirs) {
        for (int i = 1; i <= grid_density; ++i) {
            const double r = radius * static_cast<double>(i) / grid_density;
            const Vector x = d * r;
            const double v = cert.V(x);
            ++report.points_checked;
            if (!std::isfinite(v)) {
                flag(CertificateCondition::NonFinite, x, std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            if (!(v > 0.0)) {
                flag(CertificateCondition::PositiveDefinite, x, -v);
            }
            const double lo = cert.alpha1()(r);
            const double hi = cert.alpha2()(r);
            if (lo > v + tol) {
                flag(CertificateCondition::LowerSandwich, x, lo - v);
            }
            if (v > hi + tol) {
                flag(CertificateCondition::UpperSandwich, x, v - hi);
            }
        }
    }
    return report;
}

double min_mu(const ClassKFn& gamma, const ClassKFn& alpha1, double a, double radius,
              int grid_density)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("min_mu: radius must be positive");
    }
    if (grid_density < 2) {
        throw std::invalid_argument("min_mu: grid density must be at least 2");
    }
    auto ratio = [&](double r) {
        const double base = alpha1(r);
        if (!(base > 0.0)) {
            throw std::invalid_argument("min_mu: alpha1 vanishes at a positive radius");
        }
        return gamma(4.0 * r) / std::pow(base, a);
    };

    double best = -1.0;
    int best_i = 1;
    for (int i = 1; i <= grid_density; ++i) {
        const double value = ratio(radius * static_cast<double>(i) / grid_density);
        if (value > best) {
            best = value;
            best_i = i;
        }
    }

    // Golden-section refinement on the cells adjacent to the grid argmax.
    const double step = radius / grid_density;
    double lo = std::max(step * (best_i - 1), step * 1e-6);
    double hi = std::min(step * (best_i + 1), radius);
    best = std::max({best, ratio(lo), ratio(hi)});
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = ratio(x1);
    double f2 = ratio(x2);
    while (hi - lo > 1e-6 * hi) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = ratio(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = ratio(x1);
        }
    }
    return std::max({best, f1, f2});
}

}  // namespace ftsdos
