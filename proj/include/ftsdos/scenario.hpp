#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftsdos/certificate.hpp"
#include "ftsdos/dos.hpp"
#include "ftsdos/engine.hpp"
#include "ftsdos/plant.hpp"

namespace ftsdos {

inline constexpr int kSchemaVersion = 1;

/// Malformed or out-of-range scenario document. line() is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& origin, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct DosSpec {
    enum class Mode { None, Explicit, Generated } mode = Mode::None;
    std::vector<DosInterval> intervals;
    DosCharacterization constraints;  // generator bounds (Generated only)
    std::uint64_t seed = 0;
    double anchor_eta = 1.0;
    std::optional<double> anchor_kappa;  // defaults to the policy delta_bar
};

struct OutputFlags {
    bool csv = true;
    bool svg = true;
    bool report = true;
};

enum class CheckId { Theorem1, Lemma5, Theorem2, Lambda };

std::string to_string(CheckId id);

struct ScenarioConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    std::string plant = "fts_scalar";
    std::optional<double> cert_lambda;
    std::optional<double> cert_mu;
    std::optional<double> cert_radius;
    TriggerPolicy policy;
    DosSpec dos;
    std::vector<double> x0;
    double horizon = 5.0;
    double step = 1e-4;
    OutputFlags outputs;
    std::optional<std::vector<CheckId>> checks;  // absent: every applicable check
    SimOptions options;

    std::string origin;     // file path or "<string>"
    std::string canonical;  // key-sorted compact dump of the parsed document

    /// 16 hex digits of FNV-1a over the canonical document.
    std::string hash() const;
};

/// Parses and validates a scenario document. Throws ConfigError.
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<string>");

/// Reads @p path and parses it. Throws ConfigError (also for unreadable files).
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// The objects a config resolves to.
struct Scenario {
    PlantModel plant;
    LyapunovCertificate certificate;
    DosSchedule schedule;
    DosCharacterization dos_params;  // generator constraints, or fitted from the anchors
};

/// Resolves names, applies overrides and draws the schedule. Throws ConfigError.
Scenario build_scenario(const ScenarioConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ftsdos
