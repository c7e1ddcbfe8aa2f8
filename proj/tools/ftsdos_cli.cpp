// ftsdos: run, batch, characterize and check event-triggered DoS scenarios.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ftsdos/output.hpp"
#include "ftsdos/runner.hpp"

using namespace ftsdos;
namespace fs = std::filesystem;

namespace {

void print(const char* key, const std::string& value)
{
    std::printf("%-20s %s\n", key, value.c_str());
}

void print(const char* key, double value)
{
    print(key, std::isinf(value) ? std::string(value > 0 ? "inf" : "-inf") : format_real(value));
}

void print_checks(const RunResult& r)
{
    for (const CheckOutcome& c : r.checks) {
        std::string line = c.report.passed() ? "passed" : "FAILED";
        line += " intervals=" + std::to_string(c.report.intervals_checked) +
                " points=" + std::to_string(c.report.points_checked) +
                " violations=" + std::to_string(c.report.violations.size());
        if (c.report.points_checked > 0) {
            line += " max_residual=" + format_real(c.report.max_residual);
        }
        if (!c.counted) {
            line += " (informational)";
        }
        if (!c.report.note.empty()) {
            line += " [" + c.report.note + "]";
        }
        print(("check " + to_string(c.report.bound_id)).c_str(), line);
    }
}

void print_run(const RunResult& r)
{
    print("scenario", r.name);
    print("output", r.output_dir.string());
    print("status", to_string(r.status));
    print("settled_at", r.settled_at ? format_real(*r.settled_at) : std::string("none"));
    print("final_norm", r.final_norm);
    print("events", std::to_string(r.events));
    print("transmissions", std::to_string(r.transmissions));
    print("min_inter_event", r.min_inter_event);
    print("duty_cycle", r.duty_cycle);
    print_checks(r);
}

int finish(const RunResult& r)
{
    if (r.exit_code == kExitConfig && r.output_dir.empty()) {
        std::cerr << "error: " << r.message << '\n';
        return r.exit_code;
    }
    print_run(r);
    if (r.exit_code != kExitOk) {
        std::cerr << "exit " << r.exit_code << ": " << r.message << '\n';
    }
    return r.exit_code;
}

struct Loaded {
    ScenarioConfig config;
    Scenario scenario;
};

Loaded load(const std::string& path)
{
    ScenarioConfig cfg = load_scenario(path);
    Scenario sc = build_scenario(cfg);
    return {std::move(cfg), std::move(sc)};
}

int characterize_cmd(const std::string& path, std::optional<double> eta, std::optional<double> kappa)
{
    const Loaded l = load(path);
    const DosSchedule& s = l.scenario.schedule;
    const double T = l.config.horizon;
    const DosCharacterization fit =
        characterize(s, eta.value_or(l.config.dos.anchor_eta),
                     kappa.value_or(l.config.dos.anchor_kappa.value_or(l.config.policy.delta_bar)));
    print("intervals", std::to_string(s.size()));
    print("horizon", T);
    print("transitions", std::to_string(s.count_transitions(T)));
    print("total_denied", s.total_denied(T));
    print("duty_cycle", s.duty_cycle());
    print("eta", fit.eta);
    print("inv_tau_d", fit.inv_tau_d);
    print("tau_d", fit.tau_d());
    print("kappa", fit.kappa);
    print("inv_theta", fit.inv_theta);
    print("theta", fit.theta());
    print("duration_feasible", fit.duration_feasible() ? "yes" : "no");

    const AssumptionReport own = check_assumptions(s, fit);
    print("fit_assumptions", own.passed() ? "passed" : "FAILED");
    if (l.config.dos.mode == DosSpec::Mode::Generated) {
        const AssumptionReport gen = check_assumptions(s, l.config.dos.constraints);
        print("generator_bounds", gen.passed() ? "passed" : "FAILED");
    }
    return kExitOk;
}

int margin_cmd(const std::string& path)
{
    const Loaded l = load(path);
    const DosCharacterization& p = l.scenario.dos_params;
    const LyapunovCertificate& cert = l.scenario.certificate;
    print("c", cert.c());
    print("lambda", cert.lambda());
    print("mu", cert.mu());
    print("delta_bar", l.config.policy.delta_bar);
    print("inv_theta", p.inv_theta);
    print("inv_tau_d", p.inv_tau_d);
    print("kappa", p.kappa);
    print("eta", p.eta);
    const auto m = scenario_margin(l.config, l.scenario);
    if (!m) {
        print("margin", "undefined (1/theta >= 1)");
        return kExitOk;
    }
    print("omega1", m->omega1);
    print("omega2", m->omega2);
    print("threshold", m->threshold);
    print("threshold_inverse", 1.0 / m->threshold);
    print("attack_load", m->attack_load);
    print("xi", m->xi);
    print("rho", m->rho);
    print("satisfied", m->satisfied ? "yes" : "no");
    Vector x0 = Eigen::Map<const Vector>(l.config.x0.data(), static_cast<long>(l.config.x0.size()));
    if (m->satisfied) {
        print("settling_bound", settling_bound(cert, cert.V(x0), *m));
    } else {
        print("settling_bound", "none (xi <= 0)");
    }
    print("envelope_zero_time", envelope_zero_time(cert, x0.norm(), *m));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-time event-triggered control under denial-of-service attacks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());
    std::string root_override;
    app.add_option("--output-root", root_override,
                   std::string("Output directory root (default: $") + kOutputRootEnv + " or ./runs)");

    std::string config;
    auto* run = app.add_subcommand("run", "Simulate a scenario, check its bounds and write artifacts");
    run->add_option("config", config, "Scenario file")->required();

    std::string dir;
    int jobs = 1;
    auto* batch = app.add_subcommand("batch", "Run every scenario in a directory");
    batch->add_option("dir", dir, "Directory of scenario files")->required();
    batch->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

    std::optional<double> eta, kappa;
    auto* charac = app.add_subcommand("characterize", "Frequency and duration statistics of a scenario's DoS schedule");
    charac->add_option("config", config, "Scenario file")->required();
    charac->add_option("--eta", eta, "Frequency anchor");
    charac->add_option("--kappa", kappa, "Duration anchor");

    auto* margin = app.add_subcommand("margin", "Stability margin of a scenario's certificate and DoS parameters");
    margin->add_option("config", config, "Scenario file")->required();

    auto* check = app.add_subcommand("check", "Re-run the bound checks on a scenario's stored logs");
    check->add_option("config", config, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }
    const fs::path root = output_root(root_override);

    try {
        if (*run) {
            return finish(run_scenario(config, root));
        }
        if (*check) {
            return finish(check_stored(config, root));
        }
        if (*batch) {
            const BatchResult b = run_batch(dir, jobs, root);
            if (b.runs.empty()) {
                std::cerr << "error: no scenario files in " << dir << '\n';
                return b.exit_code;
            }
            std::cout << b.summary_csv;
            for (const RunResult& r : b.runs) {
                if (r.exit_code != kExitOk) {
                    std::cerr << r.config_path.filename().string() << ": exit " << r.exit_code << ": "
                              << r.message << '\n';
                }
            }
            if (!b.summary_path.empty()) {
                std::cerr << "summary written to " << b.summary_path.string() << '\n';
            }
            return b.exit_code;
        }
        if (*charac) {
            return characterize_cmd(config, eta, kappa);
        }
        if (*margin) {
            return margin_cmd(config);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitUsage;
}
