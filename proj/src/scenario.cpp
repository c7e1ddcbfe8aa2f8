#include "ftsdos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ftsdos {

using nlohmann::json;

ConfigError::ConfigError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message),
      line_(line)
{
}

std::string to_string(CheckId id)
{
    switch (id) {
    case CheckId::Theorem1: return "theorem1-decay";
    case CheckId::Lemma5: return "lemma5-growth";
    case CheckId::Theorem2: return "theorem2-envelope";
    case CheckId::Lambda: return "lambda-measure";
    }
    return "unknown";
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ScenarioConfig::hash() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

namespace {

using Path = std::vector<std::string>;

std::string dotted(const Path& path)
{
    std::string out;
    for (const std::string& p : path) {
        out += (out.empty() ? "" : ".") + p;
    }
    return out.empty() ? "<root>" : out;
}

// Maps key paths back to source lines by scanning for quoted keys in order.
class Document {
public:
    Document(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    int line_at_offset(std::size_t offset) const
    {
        offset = std::min(offset, text_.size());
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(offset), '\n'));
    }

    int line_of(const Path& path) const
    {
        std::size_t pos = 0;
        int line = 1;
        for (const std::string& key : path) {
            const std::size_t found = text_.find('"' + key + '"', pos);
            if (found == std::string::npos) {
                break;
            }
            pos = found + key.size() + 2;
            line = line_at_offset(found);
        }
        return line;
    }

    [[noreturn]] void fail(const Path& path, const std::string& message) const
    {
        throw ConfigError(origin_, line_of(path), dotted(path) + ": " + message);
    }

    const std::string& origin() const { return origin_; }

private:
    const std::string& text_;
    std::string origin_;
};

Path child(Path path, const std::string& key)
{
    path.push_back(key);
    return path;
}

void reject_unknown(const Document& doc, const json& obj, const Path& path,
                    std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) {
        doc.fail(path, "expected an object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.contains(key)) {
            doc.fail(child(path, key), "unknown key");
        }
    }
}

double number(const Document& doc, const json& obj, const Path& path, const std::string& key,
              double fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        doc.fail(child(path, key), "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        doc.fail(child(path, key), "must be finite");
    }
    return d;
}

std::optional<double> optional_number(const Document& doc, const json& obj, const Path& path,
                                      const std::string& key)
{
    if (!obj.contains(key)) {
        return std::nullopt;
    }
    return number(doc, obj, path, key, 0.0);
}

// Positive number where null or absence means +inf.
double number_or_inf(const Document& doc, const json& obj, const Path& path, const std::string& key)
{
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return std::numeric_limits<double>::infinity();
    }
    return number(doc, obj, path, key, 0.0);
}

bool boolean(const Document& doc, const json& obj, const Path& path, const std::string& key,
             bool fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_boolean()) {
        doc.fail(child(path, key), "expected true or false");
    }
    return obj.at(key).get<bool>();
}

std::string text(const Document& doc, const json& obj, const Path& path, const std::string& key,
                 const std::string& fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_string()) {
        doc.fail(child(path, key), "expected a string");
    }
    return obj.at(key).get<std::string>();
}

void require_positive(const Document& doc, const Path& path, double v)
{
    if (!(v > 0.0)) {
        doc.fail(path, "must be positive");
    }
}

void parse_policy(const Document& doc, const json& obj, ScenarioConfig& cfg)
{
    const Path path{"policy"};
    reject_unknown(doc, obj, path, {"kind", "lambda", "delta_bar", "delta_lower", "period", "strategy"});
    TriggerPolicy& p = cfg.policy;

    const std::string kind = text(doc, obj, path, "kind", to_string(p.kind));
    const auto parsed_kind = parse_trigger_kind(kind);
    if (!parsed_kind) {
        doc.fail(child(path, "kind"), "unknown trigger kind '" + kind + "'");
    }
    p.kind = *parsed_kind;

    const std::string strategy = text(doc, obj, path, "strategy", to_string(p.strategy));
    const auto parsed_strategy = parse_input_strategy(strategy);
    if (!parsed_strategy) {
        doc.fail(child(path, "strategy"), "unknown strategy '" + strategy + "'");
    }
    p.strategy = *parsed_strategy;

    if (obj.contains("lambda")) {
        p.lambda = number(doc, obj, path, "lambda", p.lambda);
        if (!(p.lambda > 0.0 && p.lambda < 1.0)) {
            doc.fail(child(path, "lambda"), "must lie in (0, 1)");
        }
    }
    p.delta_bar = number(doc, obj, path, "delta_bar", p.delta_bar);
    require_positive(doc, child(path, "delta_bar"), p.delta_bar);
    p.delta_lower = number(doc, obj, path, "delta_lower", p.delta_lower);
    require_positive(doc, child(path, "delta_lower"), p.delta_lower);
    if (p.kind == TriggerKind::HybridEtm && p.delta_lower > p.delta_bar) {
        doc.fail(child(path, "delta_lower"), "must not exceed delta_bar");
    }
    p.period = number(doc, obj, path, "period", p.period);
    require_positive(doc, child(path, "period"), p.period);
}

void parse_dos(const Document& doc, const json& obj, ScenarioConfig& cfg)
{
    const Path path{"dos"};
    reject_unknown(doc, obj, path, {"intervals", "generate", "seed", "anchors"});
    DosSpec& d = cfg.dos;
    const bool explicit_form = obj.contains("intervals");
    const bool generated_form = obj.contains("generate");
    if (explicit_form == generated_form) {
        doc.fail(path, "exactly one of 'intervals' or 'generate' is required");
    }

    if (explicit_form) {
        d.mode = DosSpec::Mode::Explicit;
        if (obj.contains("seed")) {
            doc.fail(child(path, "seed"), "only meaningful with 'generate'");
        }
        const json& list = obj.at("intervals");
        if (!list.is_array()) {
            doc.fail(child(path, "intervals"), "expected an array of [start, duration] pairs");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            const json& pair = list[i];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                doc.fail(child(path, "intervals"),
                         "entry " + std::to_string(i) + " is not a [start, duration] pair");
            }
            d.intervals.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
    } else {
        d.mode = DosSpec::Mode::Generated;
        const Path gen = child(path, "generate");
        const json& g = obj.at("generate");
        reject_unknown(doc, g, gen, {"eta", "tau_d", "kappa", "theta"});
        d.constraints.eta = number(doc, g, gen, "eta", 1.0);
        d.constraints.kappa = number(doc, g, gen, "kappa", 0.0);
        if (d.constraints.eta < 0.0) {
            doc.fail(child(gen, "eta"), "must be non-negative");
        }
        if (d.constraints.kappa < 0.0) {
            doc.fail(child(gen, "kappa"), "must be non-negative");
        }
        const double tau_d = number_or_inf(doc, g, gen, "tau_d");
        require_positive(doc, child(gen, "tau_d"), tau_d);
        const double theta = number_or_inf(doc, g, gen, "theta");
        if (!(theta > 1.0)) {
            doc.fail(child(gen, "theta"), "must exceed 1");
        }
        d.constraints.inv_tau_d = std::isinf(tau_d) ? 0.0 : 1.0 / tau_d;
        d.constraints.inv_theta = std::isinf(theta) ? 0.0 : 1.0 / theta;

        if (!obj.contains("seed")) {
            doc.fail(child(path, "seed"), "required with 'generate'");
        }
        const json& seed = obj.at("seed");
        if (!seed.is_number_unsigned()) {
            doc.fail(child(path, "seed"), "expected a non-negative integer");
        }
        d.seed = seed.get<std::uint64_t>();
    }

    if (obj.contains("anchors")) {
        const Path anc = child(path, "anchors");
        const json& a = obj.at("anchors");
        reject_unknown(doc, a, anc, {"eta", "kappa"});
        d.anchor_eta = number(doc, a, anc, "eta", d.anchor_eta);
        d.anchor_kappa = optional_number(doc, a, anc, "kappa");
        if (d.anchor_eta < 0.0 || d.anchor_kappa.value_or(0.0) < 0.0) {
            doc.fail(anc, "anchors must be non-negative");
        }
    }
}

void parse_checks(const Document& doc, const json& list, ScenarioConfig& cfg)
{
    const Path path{"checks"};
    if (!list.is_array()) {
        doc.fail(path, "expected an array of check names");
    }
    std::vector<CheckId> ids;
    for (const json& item : list) {
        const std::string name = item.is_string() ? item.get<std::string>() : std::string();
        bool found = false;
        for (CheckId id : {CheckId::Theorem1, CheckId::Lemma5, CheckId::Theorem2, CheckId::Lambda}) {
            if (name == to_string(id)) {
                ids.push_back(id);
                found = true;
            }
        }
        if (!found) {
            doc.fail(path, "unknown check '" + name + "'");
        }
    }
    cfg.checks = ids;
}

bool valid_name(const std::string& s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) {
        return std::isalnum(ch) || ch == '_' || ch == '-' || ch == '.';
    });
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& source, const std::string& origin)
{
    const Document doc(source, origin);
    json root;
    try {
        root = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin, doc.line_at_offset(e.byte == 0 ? 0 : e.byte - 1),
                          std::string("not valid JSON: ") + e.what());
    }

    const Path none;
    reject_unknown(doc, root, none,
                   {"schema_version", "name", "description", "plant", "certificate", "policy", "dos",
                    "x0", "horizon", "step", "outputs", "checks", "options"});

    ScenarioConfig cfg;
    cfg.origin = origin;
    cfg.canonical = root.dump();

    if (!root.contains("schema_version") || !root.at("schema_version").is_number_integer()) {
        doc.fail({"schema_version"}, "required integer");
    }
    cfg.schema_version = root.at("schema_version").get<int>();
    if (cfg.schema_version != kSchemaVersion) {
        doc.fail({"schema_version"}, "unsupported version " + std::to_string(cfg.schema_version) +
                                         " (expected " + std::to_string(kSchemaVersion) + ")");
    }

    cfg.name = text(doc, root, none, "name", "scenario");
    if (!valid_name(cfg.name)) {
        doc.fail({"name"}, "must be non-empty and use only letters, digits, '_', '-', '.'");
    }
    text(doc, root, none, "description", "");
    cfg.plant = text(doc, root, none, "plant", cfg.plant);
    const auto names = builtin_plant_names();
    if (std::find(names.begin(), names.end(), cfg.plant) == names.end()) {
        doc.fail({"plant"}, "unknown plant '" + cfg.plant + "'");
    }

    if (root.contains("certificate")) {
        const Path path{"certificate"};
        const json& c = root.at("certificate");
        reject_unknown(doc, c, path, {"lambda", "mu", "radius"});
        cfg.cert_lambda = optional_number(doc, c, path, "lambda");
        cfg.cert_mu = optional_number(doc, c, path, "mu");
        cfg.cert_radius = optional_number(doc, c, path, "radius");
        if (cfg.cert_lambda && !(*cfg.cert_lambda > 0.0 && *cfg.cert_lambda < 1.0)) {
            doc.fail(child(path, "lambda"), "must lie in (0, 1)");
        }
        if (cfg.cert_mu) {
            require_positive(doc, child(path, "mu"), *cfg.cert_mu);
        }
        if (cfg.cert_radius) {
            require_positive(doc, child(path, "radius"), *cfg.cert_radius);
        }
    }

    if (root.contains("policy")) {
        parse_policy(doc, root.at("policy"), cfg);
        const json& p = root.at("policy");
        if (cfg.cert_lambda && p.is_object() && p.contains("lambda") && *cfg.cert_lambda != cfg.policy.lambda) {
            doc.fail({"policy", "lambda"}, "conflicts with certificate.lambda");
        }
        if (cfg.cert_lambda && !p.contains("lambda")) {
            cfg.policy.lambda = *cfg.cert_lambda;
        }
    } else if (cfg.cert_lambda) {
        cfg.policy.lambda = *cfg.cert_lambda;
    }

    if (root.contains("dos") && !root.at("dos").is_null()) {
        parse_dos(doc, root.at("dos"), cfg);
    }

    if (!root.contains("x0")) {
        doc.fail({"x0"}, "required");
    }
    const json& x0 = root.at("x0");
    if (x0.is_number()) {
        cfg.x0 = {x0.get<double>()};
    } else if (x0.is_array() && !x0.empty() &&
               std::all_of(x0.begin(), x0.end(), [](const json& v) { return v.is_number(); })) {
        for (const json& v : x0) {
            cfg.x0.push_back(v.get<double>());
        }
    } else {
        doc.fail({"x0"}, "expected a number or a non-empty array of numbers");
    }

    cfg.horizon = number(doc, root, none, "horizon", cfg.horizon);
    require_positive(doc, {"horizon"}, cfg.horizon);
    cfg.step = number(doc, root, none, "step", cfg.step);
    require_positive(doc, {"step"}, cfg.step);
    const double steps = cfg.horizon / cfg.step;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
        doc.fail({"step"}, "horizon must be a whole number of steps");
    }

    if (root.contains("outputs")) {
        const Path path{"outputs"};
        const json& o = root.at("outputs");
        reject_unknown(doc, o, path, {"csv", "svg", "report"});
        cfg.outputs.csv = boolean(doc, o, path, "csv", true);
        cfg.outputs.svg = boolean(doc, o, path, "svg", true);
        cfg.outputs.report = boolean(doc, o, path, "report", true);
    }

    if (root.contains("checks")) {
        parse_checks(doc, root.at("checks"), cfg);
    }

    if (root.contains("options")) {
        const Path path{"options"};
        const json& o = root.at("options");
        reject_unknown(doc, o, path, {"settle_epsilon", "divergence_norm", "zeno_gap", "trigger_tolerance"});
        SimOptions& s = cfg.options;
        s.settle_epsilon = number(doc, o, path, "settle_epsilon", s.settle_epsilon);
        s.divergence_norm = number(doc, o, path, "divergence_norm", s.divergence_norm);
        s.zeno_gap = number(doc, o, path, "zeno_gap", s.zeno_gap);
        s.trigger_tolerance = number(doc, o, path, "trigger_tolerance", s.trigger_tolerance);
        require_positive(doc, child(path, "settle_epsilon"), s.settle_epsilon);
        require_positive(doc, child(path, "divergence_norm"), s.divergence_norm);
        require_positive(doc, child(path, "zeno_gap"), s.zeno_gap);
        require_positive(doc, child(path, "trigger_tolerance"), s.trigger_tolerance);
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), 0, "cannot read file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ScenarioConfig cfg = parse_scenario(buf.str(), path.string());
    return cfg;
}

Scenario build_scenario(const ScenarioConfig& cfg)
{
    const auto found = builtin_plant(cfg.plant);
    if (!found) {
        throw ConfigError(cfg.origin, 0, "unknown plant '" + cfg.plant + "'");
    }
    const auto fail = [&](const std::string& message) -> ConfigError {
        return ConfigError(cfg.origin, 0, message);
    };

    LyapunovCertificate cert = found->certificate;
    try {
        cert = cert.with_lambda(cfg.policy.lambda);
        if (cfg.cert_mu) {
            cert = cert.with_mu(*cfg.cert_mu);
        }
        if (cfg.cert_radius) {
            cert = cert.with_domain_radius(*cfg.cert_radius);
        }
    } catch (const std::invalid_argument& e) {
        throw fail(std::string("certificate: ") + e.what());
    }

    if (static_cast<int>(cfg.x0.size()) != found->plant.state_dim) {
        throw fail("x0: plant '" + cfg.plant + "' has state dimension " +
                   std::to_string(found->plant.state_dim));
    }

    DosSchedule schedule;
    DosCharacterization params;
    const double kappa_anchor = cfg.dos.anchor_kappa.value_or(cfg.policy.delta_bar);
    try {
        switch (cfg.dos.mode) {
        case DosSpec::Mode::None:
            schedule = DosSchedule({}, cfg.horizon);
            params.eta = 0.0;
            break;
        case DosSpec::Mode::Explicit:
            schedule = DosSchedule(cfg.dos.intervals, cfg.horizon);
            params = characterize(schedule, cfg.dos.anchor_eta, kappa_anchor);
            break;
        case DosSpec::Mode::Generated:
            schedule = generate_random(cfg.dos.constraints, cfg.horizon, cfg.dos.seed);
            params = cfg.dos.constraints;
            params.duty_cycle = schedule.duty_cycle();
            break;
        }
    } catch (const InfeasibleConstraints& e) {
        throw fail(std::string("dos.generate: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw fail(std::string("dos: ") + e.what());
    }
    return {found->plant, cert, schedule, params};
}

}  // namespace ftsdos
