#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ecd/classifier.hpp"

namespace ecd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimal INI reader: [section] headers, key = value pairs, # or ; comments.
/// Unknown keys are surfaced through the typed loaders below so that config
/// typos fail loudly instead of silently falling back to defaults.
class IniFile {
public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse(std::string_view text, const std::string& origin = "<inline>");

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    /// Accepts "x" or "x y" (also comma-separated); a single value v maps to
    /// the downward force (0, -v) when used for F.
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }
    const std::string& origin() const { return origin_; }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

/// Classifier knobs shared by the train/eval commands.
struct ClassifierConfig {
    double lambda = 1e-6;
    std::optional<double> epsilon;    ///< fixed band; otherwise chosen by sweep
    double target_abstention = 0.2;   ///< abstention rate the sweep targets
};

/// Effective run configuration: file values over defaults.
struct RunConfig {
    ArmParameters arm;
    SamplerConfig sampler;
    QuadratureConfig quadrature;
    ClassifierConfig classifier;
    std::uint64_t seed = 0;
    std::string config_hash;  ///< hash of the canonical rendering (seed excluded)
};

RunConfig default_run_config();

/// Loads and validates; an empty path yields the defaults. All parse and
/// validation problems surface as ConfigError naming the path and key.
RunConfig load_run_config(const std::string& path);

/// Deterministic rendering of the effective configuration; the basis of
/// config_hash, so any semantic change shows up in every output artifact.
std::string canonical_config_text(const RunConfig& config);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace ecd
