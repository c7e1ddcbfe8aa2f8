#include "ftsdos/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ftsdos/output.hpp"
#include "ftsdos/rng.hpp"

#ifndef FTSDOS_VERSION
#define FTSDOS_VERSION "0.0.0"
#endif

namespace ftsdos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kReportedViolations = 50;

json real_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json to_json(const BoundReport& r, bool counted)
{
    json violations = json::array();
    for (std::size_t i = 0; i < std::min(r.violations.size(), kReportedViolations); ++i) {
        const BoundViolation& v = r.violations[i];
        violations.push_back({{"t", v.t}, {"lhs", real_or_null(v.lhs)}, {"rhs", real_or_null(v.rhs)},
                              {"residual", real_or_null(v.residual)}});
    }
    return {{"bound_id", to_string(r.bound_id)},
            {"passed", r.passed()},
            {"counted", counted},
            {"max_residual", real_or_null(r.max_residual)},
            {"intervals_checked", r.intervals_checked},
            {"points_checked", r.points_checked},
            {"violation_count", r.violations.size()},
            {"violations", violations},
            {"note", r.note}};
}

json to_json(const StabilityMargin& m)
{
    return {{"omega1", m.omega1},      {"omega2", m.omega2},     {"xi", m.xi},
            {"rho", m.rho},            {"threshold", m.threshold}, {"attack_load", m.attack_load},
            {"satisfied", m.satisfied}};
}

bool is_etm(TriggerKind k)
{
    return k == TriggerKind::HybridEtm || k == TriggerKind::ContinuousEtm;
}

std::string describe(int code)
{
    switch (code) {
    case kExitOk: return "ok";
    case kExitConfig: return "config error";
    case kExitDiverged: return "not settled";
    case kExitBounds: return "bound violated";
    default: return "error";
    }
}

void fill_summary(RunResult& r, const SimLog& log, const Scenario& scenario)
{
    r.status = log.status;
    r.settled_at = log.settled_at;
    r.events = log.events.size();
    r.transmissions = log.transmissions();
    r.min_inter_event = log.min_inter_event;
    r.duty_cycle = scenario.schedule.duty_cycle();
    r.final_norm = log.rows() ? log.states.back().norm() : 0.0;
    r.checks_passed = std::all_of(r.checks.begin(), r.checks.end(), [](const CheckOutcome& c) {
        return !c.counted || c.report.passed();
    });
}

json result_document(const ScenarioConfig& cfg, const Scenario& scenario, const SimLog& log,
                     const std::optional<StabilityMargin>& margin, const RunResult& r)
{
    json checks = json::array();
    for (const CheckOutcome& c : r.checks) {
        checks.push_back(to_json(c.report, c.counted));
    }
    json dos = {{"mode", cfg.dos.mode == DosSpec::Mode::None       ? "none"
                         : cfg.dos.mode == DosSpec::Mode::Explicit ? "explicit"
                                                                   : "generated"},
                {"intervals", scenario.schedule.size()},
                {"duty_cycle", scenario.schedule.duty_cycle()},
                {"transitions", scenario.schedule.count_transitions(cfg.horizon)},
                {"total_denied", scenario.schedule.total_denied(cfg.horizon)},
                {"eta", scenario.dos_params.eta},
                {"inv_tau_d", scenario.dos_params.inv_tau_d},
                {"kappa", scenario.dos_params.kappa},
                {"inv_theta", scenario.dos_params.inv_theta}};
    json settling = nullptr;
    if (margin && margin->satisfied && log.rows() > 0) {
        settling = settling_bound(scenario.certificate, scenario.certificate.V(log.states.front()), *margin);
    }
    return {{"schema_version", kSchemaVersion},
            {"scenario", cfg.name},
            {"config_hash", cfg.hash()},
            {"exit_code", r.exit_code},
            {"outcome", describe(r.exit_code)},
            {"status", to_string(log.status)},
            {"status_detail", log.status_detail},
            {"settled_at", log.settled_at ? json(*log.settled_at) : json(nullptr)},
            {"final_norm", real_or_null(r.final_norm)},
            {"events", r.events},
            {"transmissions", r.transmissions},
            {"min_inter_event", real_or_null(log.min_inter_event)},
            {"rows", log.rows()},
            {"dos", dos},
            {"margin", margin ? to_json(*margin) : json(nullptr)},
            {"settling_bound", settling},
            {"checks", checks},
            {"metadata",
             {{"version", version()},
              {"generator", Rng::kAlgorithm},
              {"seed", cfg.dos.mode == DosSpec::Mode::Generated ? json(cfg.dos.seed) : json(nullptr)},
              {"step", cfg.step},
              {"horizon", cfg.horizon},
              {"trigger", to_string(cfg.policy.kind)},
              {"strategy", to_string(cfg.policy.strategy)},
              {"settle_epsilon", cfg.options.settle_epsilon},
              {"integrator", "rk4-fixed-step"}}}};
}

void write_artifacts(const fs::path& dir, const ScenarioConfig& cfg, const Scenario& scenario,
                     const SimLog& log, const json& result)
{
    fs::create_directories(dir);
    write_atomic(dir / "config.json", json::parse(cfg.canonical).dump(2) + "\n");
    if (cfg.outputs.csv) {
        write_atomic(dir / "trajectory.csv", trajectory_csv(log));
        write_atomic(dir / "events.csv", events_csv(log));
    }
    if (cfg.outputs.svg) {
        write_atomic(dir / "trajectory.svg", trajectory_svg(log, scenario.schedule, cfg.name));
    }
    if (cfg.outputs.report) {
        write_atomic(dir / "result.json", result.dump(2) + "\n");
    }
}

}  // namespace

const char* version()
{
    return FTSDOS_VERSION;
}

fs::path output_root(const fs::path& override)
{
    if (!override.empty()) {
        return override;
    }
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) {
        return env;
    }
    return "runs";
}

fs::path output_dir(const ScenarioConfig& config, const fs::path& root)
{
    return root / (config.name + "-" + config.hash());
}

std::optional<StabilityMargin> scenario_margin(const ScenarioConfig& cfg, const Scenario& scenario)
{
    const DosCharacterization& p = scenario.dos_params;
    try {
        return stability_margin(scenario.certificate, cfg.policy.delta_bar, p.theta(), p.tau_d(), p.kappa,
                                p.eta);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::vector<CheckOutcome> run_checks(const ScenarioConfig& cfg, const Scenario& scenario,
                                     const SimLog& log, const std::optional<StabilityMargin>& margin)
{
    const bool etm = is_etm(cfg.policy.kind);
    const bool attacked = !scenario.schedule.empty();
    const bool hold = cfg.policy.strategy == InputStrategy::HoldLast;
    const bool margin_ok = margin && margin->satisfied;

    std::vector<CheckId> ids;
    if (cfg.checks) {
        ids = *cfg.checks;
    } else {
        if (etm) {
            ids.push_back(CheckId::Theorem1);
        }
        if (etm && attacked) {
            ids.push_back(CheckId::Lemma5);
            ids.push_back(CheckId::Lambda);
        }
        if (etm) {
            ids.push_back(CheckId::Theorem2);
        }
    }

    std::vector<CheckOutcome> out;
    for (CheckId id : ids) {
        CheckOutcome c;
        switch (id) {
        case CheckId::Theorem1:
            c.report = check_theorem1(log, scenario.certificate);
            break;
        case CheckId::Lemma5:
            c.report = check_lemma5(log, scenario.certificate, scenario.schedule);
            c.counted = hold;
            break;
        case CheckId::Lambda:
            c.report = check_lambda_measure(log, scenario.schedule, cfg.policy.delta_bar, scenario.dos_params);
            c.counted = cfg.policy.kind == TriggerKind::HybridEtm;
            break;
        case CheckId::Theorem2: {
            const StabilityMargin m = margin.value_or(StabilityMargin{});
            c.report = check_theorem2_envelope(log, scenario.certificate, m);
            // The envelope is only a claim when its preconditions hold.
            c.counted = margin_ok && hold && etm;
            if (!margin) {
                c.report.note = "no stability margin: duration slope 1/theta >= 1";
            }
            break;
        }
        }
        out.push_back(std::move(c));
    }
    return out;
}

int classify(const SimLog& log, const std::vector<CheckOutcome>& checks)
{
    if (log.status != RunStatus::Completed) {
        return kExitDiverged;
    }
    if (!log.settled_at && log.rows() > 0 && log.states.back().norm() > log.states.front().norm()) {
        return kExitDiverged;
    }
    for (const CheckOutcome& c : checks) {
        if (c.counted && !c.report.passed()) {
            return kExitBounds;
        }
    }
    return kExitOk;
}

RunResult run_scenario(const fs::path& config_path, const fs::path& root)
{
    RunResult r;
    r.config_path = config_path;
    try {
        const ScenarioConfig cfg = load_scenario(config_path);
        r.name = cfg.name;
        const Scenario scenario = build_scenario(cfg);
        r.output_dir = output_dir(cfg, root);

        SimLog log;
        try {
            log = simulate(scenario.plant, scenario.certificate, cfg.policy, scenario.schedule,
                           Eigen::Map<const Vector>(cfg.x0.data(), static_cast<long>(cfg.x0.size())),
                           cfg.horizon, cfg.step, cfg.options);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(cfg.origin, 0, e.what());
        }

        const auto margin = scenario_margin(cfg, scenario);
        r.checks = run_checks(cfg, scenario, log, margin);
        fill_summary(r, log, scenario);
        r.exit_code = classify(log, r.checks);
        r.message = describe(r.exit_code);
        if (!log.status_detail.empty()) {
            r.message += ": " + log.status_detail;
        }
        try {
            write_artifacts(r.output_dir, cfg, scenario, log, result_document(cfg, scenario, log, margin, r));
        } catch (const std::exception& e) {
            r.exit_code = kExitConfig;
            r.message = std::string("output: ") + e.what();
        }
    } catch (const ConfigError& e) {
        r.exit_code = kExitConfig;
        r.message = e.what();
    } catch (const std::exception& e) {
        r.exit_code = kExitConfig;
        r.message = config_path.string() + ": " + e.what();
    }
    return r;
}

RunResult check_stored(const fs::path& config_path, const fs::path& root)
{
    RunResult r;
    r.config_path = config_path;
    try {
        const ScenarioConfig cfg = load_scenario(config_path);
        r.name = cfg.name;
        const Scenario scenario = build_scenario(cfg);
        r.output_dir = output_dir(cfg, root);

        SimLog log = read_logs(r.output_dir / "trajectory.csv", r.output_dir / "events.csv");
        log.policy = cfg.policy;
        log.step = cfg.step;
        log.horizon = cfg.horizon;
        const auto expected_rows = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.step)) + 1;
        log.status = log.rows() == expected_rows ? RunStatus::Completed : RunStatus::Diverged;
        if (std::ifstream in(r.output_dir / "result.json"); in) {
            const json stored = json::parse(in, nullptr, false);
            if (stored.is_object() && stored.contains("status") && stored["status"].is_string()) {
                const std::string s = stored["status"];
                log.status = s == "completed" ? RunStatus::Completed
                             : s == "zeno"    ? RunStatus::Zeno
                                              : RunStatus::Diverged;
            }
        }
        if (log.status == RunStatus::Completed) {
            log.settled_at = settling_time(log, cfg.options.settle_epsilon);
        }

        const auto margin = scenario_margin(cfg, scenario);
        r.checks = run_checks(cfg, scenario, log, margin);
        fill_summary(r, log, scenario);
        r.exit_code = classify(log, r.checks);
        r.message = describe(r.exit_code);
    } catch (const ConfigError& e) {
        r.exit_code = kExitConfig;
        r.message = e.what();
    } catch (const std::exception& e) {
        r.exit_code = kExitConfig;
        r.message = e.what();
    }
    return r;
}

BatchResult run_batch(const fs::path& dir, int jobs, const fs::path& root)
{
    BatchResult batch;
    std::vector<fs::path> configs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            configs.push_back(entry.path());
        }
    }
    if (ec || configs.empty()) {
        batch.exit_code = kExitConfig;
        return batch;
    }
    std::sort(configs.begin(), configs.end());
    batch.runs.resize(configs.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            batch.runs[i] = run_scenario(configs[i], root);
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(configs.size()));
    std::vector<std::jthread> pool;
    for (int i = 1; i < n; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();

    std::string csv = "scenario,config,exit_code,status,settled_at,events,transmissions,duty_cycle,final_norm,checks_passed\n";
    for (const RunResult& r : batch.runs) {
        batch.exit_code = std::max(batch.exit_code, r.exit_code);
        csv += r.name + ',' + r.config_path.filename().string() + ',' + std::to_string(r.exit_code) + ',' +
               to_string(r.status) + ',' + (r.settled_at ? format_real(*r.settled_at) : std::string()) + ',' +
               std::to_string(r.events) + ',' + std::to_string(r.transmissions) + ',' +
               format_real(r.duty_cycle) + ',' + format_real(r.final_norm) + ',' +
               (r.checks_passed ? "1" : "0") + '\n';
    }
    batch.summary_csv = csv;
    try {
        fs::create_directories(root);
        batch.summary_path = root / (fs::weakly_canonical(dir).filename().string() + "-summary.csv");
        write_atomic(batch.summary_path, csv);
    } catch (const std::exception&) {
        batch.summary_path.clear();
        batch.exit_code = std::max<int>(batch.exit_code, kExitConfig);
    }
    return batch;
}

}  // namespace ftsdos
