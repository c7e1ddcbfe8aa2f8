#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ftsdos/analysis.hpp"

using namespace ftsdos;

namespace {

Vector scalar(double v)
{
    Vector x(1);
    x << v;
    return x;
}

const PlantWithCertificate& example()
{
    static const PlantWithCertificate ex = builtin_example();
    return ex;
}

SimLog run(double x0, const DosSchedule& s = {}, InputStrategy strategy = InputStrategy::HoldLast,
           double horizon = 5.0, const LyapunovCertificate* cert = nullptr)
{
    TriggerPolicy p;
    p.strategy = strategy;
    return simulate(example().plant, cert ? *cert : example().certificate, p, s, scalar(x0), horizon, 1e-4);
}

DosCharacterization light_attack()
{
    const double thr = stability_margin(example().certificate, 0.1, INFINITY, INFINITY, 0, 0).threshold;
    DosCharacterization c;
    c.eta = 1.0;
    c.kappa = 0.1;
    c.inv_theta = 0.3 * thr;
    c.inv_tau_d = 0.3 * thr / 0.1;
    return c;
}

}  // namespace

TEST_CASE("bound names")
{
    CHECK(to_string(BoundId::Theorem1Decay) == "theorem1-decay");
    CHECK(to_string(BoundId::Lemma5Growth) == "lemma5-growth");
    CHECK(to_string(BoundId::Theorem2Envelope) == "theorem2-envelope");
    CHECK(to_string(BoundId::LambdaMeasure) == "lambda-measure");
}

TEST_CASE("decay bound on the no-DoS run")
{
    const SimLog log = run(3.0);
    const BoundReport r = check_theorem1(log, example().certificate);
    CHECK(r.passed());
    CHECK(r.intervals_checked == log.events.size());
    // Rows that coincide with an event instant open the next sub-interval.
    CHECK(r.points_checked + log.events.size() >= log.rows() - 1);
    CHECK(r.max_residual <= 1e-6);
}

TEST_CASE("decay check flags a corrupted point")
{
    SimLog log = run(3.0);
    const std::size_t row = log.events[3].row + 5;
    log.lyapunov[row] *= 1.5;
    const BoundReport r = check_theorem1(log, example().certificate);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].t == log.times[row]);
    CHECK(r.violations[0].residual > 0.0);
}

TEST_CASE("decay check on the origin run is vacuous")
{
    const SimLog log = run(0.0);
    const BoundReport r = check_theorem1(log, example().certificate);
    CHECK(r.passed());
    CHECK(r.max_residual <= 0.0);
}

TEST_CASE("decay check skips sub-intervals touched by denial")
{
    const DosSchedule s({{0.2, 0.3}, {1.0, 0.4}}, 5.0);
    const SimLog log = run(3.0, s);
    const BoundReport r = check_theorem1(log, example().certificate);
    CHECK(r.passed());
    CHECK(r.intervals_checked < log.transmissions());
}

TEST_CASE("growth bound under denial")
{
    const DosSchedule s = generate_random({7.0, 0.0, 0.1, 0.8, 0.0}, 5.0, 19);
    const SimLog log = run(3.0, s);
    const BoundReport r = check_lemma5(log, example().certificate, s);
    CHECK(r.passed());
    CHECK(r.intervals_checked > 0);
    CHECK(r.max_residual <= 0.0);

    const BoundReport none = check_lemma5(run(3.0), example().certificate, {});
    CHECK(none.passed());
    CHECK(none.intervals_checked == 0);

    const SimLog zero = run(3.0, s, InputStrategy::ZeroInput);
    const BoundReport na = check_lemma5(zero, example().certificate, s);
    CHECK(na.intervals_checked == 0);
    CHECK_FALSE(na.note.empty());
}

TEST_CASE("growth check with mu below its minimum is diagnostic")
{
    const DosSchedule s = generate_random({7.0, 0.0, 0.1, 0.8, 0.0}, 5.0, 19);
    const LyapunovCertificate weak = example().certificate.with_mu(55.43 / 8);
    const SimLog log = run(3.0, s, InputStrategy::HoldLast, 5.0, &weak);
    const BoundReport r = check_lemma5(log, weak, s);
    CHECK(r.intervals_checked > 0);
    CHECK(r.points_checked > 0);
    CHECK(std::isfinite(r.max_residual));
}

TEST_CASE("envelope and settling bound under a light attack")
{
    const DosCharacterization c = light_attack();
    const LyapunovCertificate& cert = example().certificate;
    const StabilityMargin m = stability_margin(cert, 0.1, c.theta(), c.tau_d(), c.kappa, c.eta);
    REQUIRE(m.satisfied);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DosSchedule s = generate_random(c, 12.0, seed);
        const SimLog log = run(3.0, s, InputStrategy::HoldLast, 12.0);
        const BoundReport r = check_theorem2_envelope(log, cert, m);
        CHECK(r.passed());
        CHECK(r.note.empty());
        const auto ts = settling_time(log, 1e-3);
        REQUIRE(ts.has_value());
        CHECK(*ts <= settling_bound(cert, cert.V(scalar(3.0)), m) + 1e-4);
    }
}

TEST_CASE("envelope at t = 0 dominates the initial state")
{
    const LyapunovCertificate& c = example().certificate;
    const StabilityMargin m = stability_margin(c, 0.1, INFINITY, INFINITY, 0, 0);
    for (double x0 : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        CHECK(x0 <= state_envelope(c, x0, m, 0.0));
    }
}

TEST_CASE("envelope fails for a zero-input divergent run")
{
    const DosSchedule s({{0.05, 29.0}}, 30.0);
    const SimLog log = run(3.0, s, InputStrategy::ZeroInput, 30.0);
    REQUIRE(log.status == RunStatus::Diverged);
    const DosCharacterization c = characterize(s, 1.0, 0.1);
    const StabilityMargin m =
        stability_margin(example().certificate, 0.1, c.theta(), c.tau_d(), c.kappa, c.eta);
    const BoundReport r = check_theorem2_envelope(log, example().certificate, m);
    CHECK_FALSE(r.passed());
    CHECK(r.note.find("strategy") != std::string::npos);
    CHECK(r.note.find("attack-load") != std::string::npos);
    CHECK_FALSE(settling_time(log, 1e-3).has_value());
}

TEST_CASE("growth-region measure")
{
    const SimLog empty_run = run(3.0);
    const LambdaMeasure e = lambda_measure(empty_run, {}, 0.1, 1.0, INFINITY, INFINITY, 0.1, 5.0);
    CHECK(e.measured == 0.0);
    CHECK(e.bound == doctest::Approx(0.1 + 0.1 * 1.0));

    // Hand-built log: interval [1, 2), retries at 1.05 + 0.1k, success at 2.05.
    SimLog log;
    log.times = {0.0, 5.0};
    log.events.push_back({0.0, true, false, scalar(0.0), 0});
    for (int k = 0; k < 10; ++k) {
        log.events.push_back({1.05 + 0.1 * k, false, true, scalar(0.0), 0});
    }
    log.events.push_back({2.05, true, false, scalar(0.0), 0});
    const DosSchedule s({{1.0, 1.0}}, 5.0);
    const LambdaMeasure m = lambda_measure(log, s, 0.1, 1.0, INFINITY, 2.0, 0.1, 5.0);
    CHECK(m.measured == doctest::Approx(1.05).epsilon(1e-12));
    CHECK(m.bound == doctest::Approx(0.1 + 2.5 + 0.1));

    // Cut at t = 1.5 counts only the part before t.
    CHECK(lambda_measure(log, s, 0.1, 1.0, INFINITY, 2.0, 0.1, 1.5).measured == doctest::Approx(0.5));
}

TEST_CASE("growth-region measure within its bound on generated schedules")
{
    const DosCharacterization c{7.0, 0.0, 0.1, 0.8, 0.0};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DosSchedule s = generate_random(c, 5.0, seed);
        REQUIRE(check_assumptions(s, c).passed());
        const SimLog log = run(3.0, s);
        const BoundReport r = check_lambda_measure(log, s, 0.1, c);
        CHECK(r.passed());
        CHECK(r.points_checked == s.size() + 1 - (s.intervals().back().end() > 5.0 ? 1 : 0));
    }
}

TEST_CASE("settling time extraction")
{
    const SimLog log = run(3.0);
    const auto t3 = settling_time(log, 1e-3);
    REQUIRE(t3.has_value());
    CHECK(*t3 <= *log.settled_at);
    CHECK(*t3 > 1.7);
    const StabilityMargin m = stability_margin(example().certificate, 0.1, INFINITY, INFINITY, 0, 0);
    CHECK(*t3 <= settling_bound(example().certificate, 9.0, m));

    const SimLog ref = simulate_reference(example().plant, scalar(3.0), 5.0, 1e-4);
    const auto tr = settling_time(ref, 1e-7);
    REQUIRE(tr.has_value());
    CHECK(std::abs(*tr - 2.0 * std::log(1.0 + std::sqrt(3.0))) <= 1e-3);

    CHECK(settling_time(run(0.0), 1e-3) == 0.0);
}
