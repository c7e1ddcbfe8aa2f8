// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ftsdos/analysis.hpp"
#include "ftsdos/runner.hpp"

using namespace ftsdos;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = FTSDOS_CONFIG_DIR;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

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

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("ftsdos_acc_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

std::pair<int, std::string> run_cli(const std::string& args, const fs::path& scratch)
{
    const fs::path out = scratch / "stdout.txt";
    const std::string cmd =
        std::string("\"") + FTSDOS_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string quoted(const fs::path& p)
{
    return "\"" + p.string() + "\"";
}

struct Loaded {
    ScenarioConfig config;
    Scenario scenario;
};

Loaded load(const std::string& file)
{
    ScenarioConfig cfg = load_scenario(kConfigs / file);
    Scenario s = build_scenario(cfg);
    return {std::move(cfg), std::move(s)};
}

SimLog simulate_config(const Loaded& l)
{
    const ScenarioConfig& c = l.config;
    Vector x0(static_cast<Eigen::Index>(c.x0.size()));
    for (std::size_t i = 0; i < c.x0.size(); ++i) {
        x0(static_cast<Eigen::Index>(i)) = c.x0[i];
    }
    if (c.policy.kind == TriggerKind::TimeTriggered) {
        return simulate_time_triggered(l.scenario.plant, x0, c.policy.period, c.horizon, c.step,
                                       &l.scenario.certificate, c.options);
    }
    return simulate(l.scenario.plant, l.scenario.certificate, c.policy, l.scenario.schedule, x0, c.horizon,
                    c.step, c.options);
}

// Minimum inter-event gaps of every non-diverged run, for the Zeno criterion.
struct GapLedger {
    std::size_t runs = 0;
    double worst = INFINITY;
    void add(const SimLog& log)
    {
        if (log.status == RunStatus::Diverged || log.events.size() < 2) {
            return;
        }
        ++runs;
        worst = std::min(worst, log.min_inter_event);
    }
} gaps;

double exact_solution(double x0, double t)
{
    const double w = (1.0 + std::sqrt(std::abs(x0))) * std::exp(-t / 2.0) - 1.0;
    return w > 0.0 ? sgn(x0) * w * w : 0.0;
}

const double kTStar = 2.0 * std::log(1.0 + std::sqrt(3.0));

// --- criteria ---------------------------------------------------------------

Verdict analytic_threshold()
{
    Verdict v;
    TempDir dir;
    const auto [code, out] = run_cli("margin " + quoted(kConfigs / "example_no_dos.json"), dir.path);
    v.require(code == 0, "margin exit code " + std::to_string(code));
    std::istringstream lines(out);
    std::string key, value;
    std::optional<double> thr;
    while (lines >> key >> value) {
        if (key == "threshold") {
            thr = std::stod(value);
        }
        std::getline(lines, value);
    }
    v.require(thr.has_value(), "threshold line present");
    if (thr) {
        const double want = 1.0 / 112.86;
        const double rel = std::abs(*thr - want) / want;
        v.note("threshold=" + num(*thr, 10) + " 1/threshold=" + num(1.0 / *thr, 8) + " rel_err=" + num(rel, 3));
        v.require(rel <= 1e-5, "relative error <= 1e-5");
    }
    return v;
}

Verdict mu_computation()
{
    Verdict v;
    const LyapunovCertificate& c = example().certificate;
    const auto t0 = std::chrono::steady_clock::now();
    const double mu = min_mu(c.gamma(), c.alpha1(), c.a(), 3.0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double want = 32.0 * std::sqrt(3.0);
    v.note("min_mu=" + num(mu, 10) + " target=" + num(want, 10) + " time=" + num(secs, 3) + "s");
    v.require(std::abs(mu - want) <= 1e-3, "|min_mu - 32 sqrt 3| <= 1e-3");
    v.require(mu <= 55.43, "min_mu <= 55.43");
    v.require(secs < 1.0, "runtime < 1 s");
    return v;
}

Verdict integrator_oracle()
{
    Verdict v;
    const SimLog log = simulate_reference(example().plant, scalar(3.0), 5.0, 1e-4, &example().certificate);
    double err = 0.0;
    for (std::size_t i = 0; i < log.rows(); ++i) {
        err = std::max(err, std::abs(log.states[i](0) - exact_solution(3.0, log.times[i])));
    }
    v.note("sup_error=" + num(err, 3));
    v.require(err <= 1e-6, "sup error <= 1e-6");
    v.require(log.settled_at.has_value(), "settles");
    if (log.settled_at) {
        v.note("settled_at=" + num(*log.settled_at, 8) + " exact=" + num(kTStar, 8));
        v.require(std::abs(*log.settled_at - kTStar) <= 1e-3, "settling within 1e-3 of exact");
    }
    return v;
}

Verdict no_dos_reproduction()
{
    Verdict v;
    const SimLog log = simulate_config(load("example_no_dos.json"));
    gaps.add(log);
    v.require(log.status == RunStatus::Completed, "run completed");
    v.require(log.settled_at.has_value(), "settles");
    const double ts = log.settled_at.value_or(INFINITY);
    std::size_t after = 0;
    for (const EventRecord& e : log.events) {
        after += e.t > ts ? 1 : 0;
    }
    const double last = log.events.empty() ? 0.0 : log.events.back().t;
    v.note("settled_at=" + num(ts, 8) + " last_event=" + num(last, 8) + " events=" +
           std::to_string(log.events.size()) + " after_settling=" + std::to_string(after));
    v.require(ts >= 1.9 && ts <= 2.2, "settling time in [1.9, 2.2]");
    v.require(log.events.size() >= 30 && log.events.size() <= 50, "events in 40 +/- 10");
    v.require(after == 0, "no events after settling");
    return v;
}

Verdict time_triggered_baseline()
{
    Verdict v;
    const SimLog log = simulate_config(load("example_time_triggered.json"));
    gaps.add(log);
    v.note("transmissions=" + std::to_string(log.transmissions()));
    v.require(log.transmissions() == 250, "exactly 250 transmissions");
    return v;
}

std::size_t no_dos_events()
{
    return simulate_config(load("example_no_dos.json")).events.size();
}

Verdict dos_reproduction()
{
    Verdict v;
    const Loaded l = load("example_dos_hold.json");
    const DosSchedule& s = l.scenario.schedule;
    const double xi = s.total_denied(5.0);
    v.note("n(5)=" + std::to_string(s.count_transitions(5.0)) + " Xi(5)=" + num(xi, 5) +
           " duty=" + num(s.duty_cycle(), 4));
    v.require(s.count_transitions(5.0) == 7, "n(5) = 7");
    v.require(std::abs(xi - 4.0) <= 0.25, "|Xi(5) - 4| <= 0.25");
    v.require(std::abs(s.duty_cycle() - 0.8) <= 0.05, "duty within 0.05 of 80%");
    v.require(l.config.policy.kind == TriggerKind::HybridEtm && l.config.policy.delta_bar == 0.1 &&
                  l.config.policy.strategy == InputStrategy::HoldLast,
              "hybrid, delta_bar 0.1, hold-last");

    const SimLog log = simulate_config(l);
    gaps.add(log);
    const auto ts = settling_time(log, 1e-3);
    const std::size_t base = no_dos_events();
    v.note("settle(1e-3)=" + (ts ? num(*ts, 6) : std::string("none")) + " events=" +
           std::to_string(log.events.size()) + " no_dos_events=" + std::to_string(base));
    v.require(log.status == RunStatus::Completed, "run completed");
    v.require(ts.has_value() && *ts <= 5.0, "settles to |x| <= 1e-3 within 5");
    v.require(log.events.size() > base, "event count exceeds no-DoS count");
    return v;
}

Verdict strategy_comparison()
{
    Verdict v;
    const Loaded hold = load("example_dos_hold.json");
    const Loaded zero = load("example_dos_zero.json");
    v.require(hold.scenario.schedule.intervals() == zero.scenario.schedule.intervals(), "same schedule");
    v.require(zero.config.policy.strategy == InputStrategy::ZeroInput, "zero-input config");
    const SimLog h = simulate_config(hold);
    const SimLog z = simulate_config(zero);
    gaps.add(h);
    gaps.add(z);
    const double x0 = std::abs(zero.config.x0.at(0));
    const double zf = z.states.back().norm();
    const bool zero_failed = z.status != RunStatus::Completed || (!z.settled_at && zf > x0);
    v.note("zero-input status=" + to_string(z.status) + " |x(T)|=" + num(zf, 5) +
           " hold-last settled_at=" + (h.settled_at ? num(*h.settled_at, 6) : std::string("none")));
    v.require(zero_failed, "zero-input fails to settle");
    v.require(h.settled_at.has_value(), "hold-last settles");
    return v;
}

Verdict theorem1_property()
{
    Verdict v;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    const int n = 120;
    int failed = 0;
    double worst = -INFINITY;
    std::size_t points = 0;
    for (int i = 0; i < n; ++i) {
        const double x0 = dist(gen);
        const SimLog log = simulate(example().plant, example().certificate, {}, {}, scalar(x0), 5.0, 1e-4);
        gaps.add(log);
        const BoundReport r = check_theorem1(log, example().certificate);
        failed += r.passed() ? 0 : 1;
        worst = std::max(worst, r.max_residual);
        points += r.points_checked;
    }
    v.note(std::to_string(n) + " runs, " + std::to_string(points) + " points, max_residual=" + num(worst, 3) +
           ", failed=" + std::to_string(failed));
    v.require(failed == 0, "decay bound holds at every grid point");
    return v;
}

Verdict lemma5_property()
{
    Verdict v;
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> eta(1.0, 8.0), itd(0.0, 3.0), kap(0.0, 0.5), ith(0.0, 0.9),
        x0d(-3.0, 3.0);
    const int n = 120;
    int lemma_failed = 0, lambda_failed = 0, rejected = 0, episodes = 0;
    double worst_lambda = -INFINITY;
    for (int i = 0; i < n; ++i) {
        const DosCharacterization c{eta(gen), itd(gen), kap(gen), ith(gen), 0.0};
        const DosSchedule s = generate_random(c, 5.0, static_cast<std::uint64_t>(1000 + i));
        if (!check_assumptions(s, c).passed()) {
            ++rejected;
            continue;
        }
        TriggerPolicy p;
        const SimLog log = simulate(example().plant, example().certificate, p, s, scalar(x0d(gen)), 5.0, 1e-4);
        gaps.add(log);
        const BoundReport g = check_lemma5(log, example().certificate, s);
        const BoundReport m = check_lambda_measure(log, s, p.delta_bar, c);
        lemma_failed += g.passed() ? 0 : 1;
        lambda_failed += m.passed() ? 0 : 1;
        episodes += static_cast<int>(g.intervals_checked);
        worst_lambda = std::max(worst_lambda, m.max_residual);
    }
    v.note(std::to_string(n - rejected) + " schedules, " + std::to_string(episodes) +
           " growth episodes, growth failures=" + std::to_string(lemma_failed) +
           ", measure failures=" + std::to_string(lambda_failed) + ", max measure residual=" + num(worst_lambda, 3));
    v.require(n - rejected >= 100, "at least 100 admissible schedules");
    v.require(lemma_failed == 0, "growth bound holds");
    v.require(lambda_failed == 0, "measured <= bound");
    return v;
}

Verdict theorem2_property()
{
    Verdict v;
    const LyapunovCertificate& cert = example().certificate;
    const double delta_bar = 0.1;
    const double thr = stability_margin(cert, delta_bar, INFINITY, INFINITY, 0.0, 0.0).threshold;
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> frac(0.05, 0.9), split(0.0, 1.0), kap(0.0, 0.2), x0d(-3.0, 3.0);
    const double horizon = 12.0;
    const int n = 100;
    int scenarios = 0, envelope_failed = 0, late = 0;
    double max_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
        const double load = frac(gen) * thr;
        const double w = split(gen);
        DosCharacterization c;
        c.eta = 1.0;
        c.kappa = kap(gen);
        c.inv_theta = w * load;
        c.inv_tau_d = (1.0 - w) * load / delta_bar;
        const StabilityMargin m = stability_margin(cert, delta_bar, c.theta(), c.tau_d(), c.kappa, c.eta);
        const DosSchedule s = generate_random(c, horizon, static_cast<std::uint64_t>(500 + i));
        const double x0 = x0d(gen);
        if (!m.satisfied || !check_assumptions(s, c).passed()) {
            continue;
        }
        ++scenarios;
        const SimLog log = simulate(example().plant, cert, {}, s, scalar(x0), horizon, 1e-4);
        gaps.add(log);
        envelope_failed += check_theorem2_envelope(log, cert, m).passed() ? 0 : 1;
        const double bound = settling_bound(cert, cert.V(scalar(x0)), m);
        // A run still moving at the horizon only fails if the bound has already passed.
        const auto ts = settling_time(log, 1e-3);
        if (ts ? *ts > bound : bound <= horizon) {
            ++late;
        }
        if (ts && x0 != 0.0) {
            max_ratio = std::max(max_ratio, *ts / bound);
        }
    }
    v.note(std::to_string(scenarios) + " scenarios with xi > 0, envelope failures=" +
           std::to_string(envelope_failed) + ", settled after bound=" + std::to_string(late) +
           ", max settle/bound=" + num(max_ratio, 3));
    v.require(scenarios >= 100, "at least 100 scenarios");
    v.require(envelope_failed == 0, "trajectory inside the envelope");
    v.require(late == 0, "settles no later than the bound");

    // Conservatism: the bundled 80% schedule breaks the attack-load condition but still settles.
    const Loaded l = load("example_dos_hold.json");
    const auto km = scenario_margin(l.config, l.scenario);
    const SimLog heavy = simulate_config(l);
    const bool violates = !km || !km->satisfied;
    v.note("80% schedule attack_load=" + (km ? num(km->attack_load, 4) : std::string("n/a")) +
           " vs threshold=" + num(thr, 4) + ", settled_at=" +
           (heavy.settled_at ? num(*heavy.settled_at, 5) : std::string("none")));
    v.require(violates && heavy.settled_at.has_value(), "condition-violating schedule that settles");
    return v;
}

Verdict zeno_and_determinism()
{
    Verdict v;
    v.note(std::to_string(gaps.runs) + " suite runs, min inter-event=" + num(gaps.worst, 4));
    v.require(gaps.runs > 0 && gaps.worst > 1e-6, "min_inter_event > 1e-6");

    std::vector<fs::path> configs;
    for (const auto& e : fs::recursive_directory_iterator(kConfigs)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
            configs.push_back(e.path());
        }
    }
    std::sort(configs.begin(), configs.end());
    TempDir a, b;
    int mismatched = 0;
    for (const fs::path& cfg : configs) {
        run_cli("--output-root " + quoted(a.path) + " run " + quoted(cfg), a.path);
        run_cli("--output-root " + quoted(b.path) + " run " + quoted(cfg), b.path);
        const fs::path dir = output_dir(load_scenario(cfg), ".");
        for (const char* f : {"trajectory.csv", "events.csv"}) {
            const fs::path pa = a.path / dir.filename() / f, pb = b.path / dir.filename() / f;
            if (!fs::exists(pa) || slurp(pa) != slurp(pb)) {
                ++mismatched;
                v.note("differs: " + cfg.filename().string() + "/" + f);
            }
        }
    }
    v.note(std::to_string(configs.size()) + " bundled configs run twice, mismatches=" +
           std::to_string(mismatched));
    v.require(!configs.empty() && mismatched == 0, "byte-identical CSV");
    return v;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"analytic threshold", analytic_threshold},
        {"mu computation", mu_computation},
        {"integrator oracle", integrator_oracle},
        {"no-DoS reproduction", no_dos_reproduction},
        {"time-triggered baseline", time_triggered_baseline},
        {"DoS reproduction", dos_reproduction},
        {"strategy comparison", strategy_comparison},
        {"decay bound property", theorem1_property},
        {"growth bound and measure property", lemma5_property},
        {"envelope and settling bound property", theorem2_property},
        {"Zeno guard and determinism", zeno_and_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += v.pass ? 0 : 1;
        std::printf("%s %2zu %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
