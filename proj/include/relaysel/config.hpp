#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "relaysel/analytic.hpp"
#include "relaysel/sim.hpp"

namespace relaysel {

// Raised for anything wrong with a configuration file. `key` is
// "section.name" when a single key is at fault; `line` is 0 when the key is
// missing or the problem spans several keys.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, std::string key = {}, int line = 0)
        : std::runtime_error(std::move(message)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

struct AppConfig {
    ExperimentConfig experiment;
    bool has_link = false;                   // false for overhead-only files
    std::optional<OverheadInputs> overhead;  // only configs with an [overhead] section
    double grid_step = 0.01;                 // contention-probability grid
    double switchpoint_step_db = 0.25;
};

// Line-oriented INI text: "[section]" headers, "key = value" lines, '#' or
// ';' comments. Numbers may be written as fractions ("1912/2044"); lists are
// comma separated. `source` only labels error messages.
AppConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
AppConfig parse_config(const std::filesystem::path& path);

// Closed-form inputs for the configured two-relay style scenario: mean
// received powers from the topology and SNR thresholds scaled by N0.
AnalyticScenario to_analytic_scenario(const AppConfig& config);

}  // namespace relaysel
