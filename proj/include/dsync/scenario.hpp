// Scenario configuration, JSON scenario files and built-in presets.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dsync/clocksim.hpp"
#include "dsync/evidence.hpp"

namespace dsync {

enum class Method { DS0, DS1, DS2, FTA, Single };

std::string_view to_string(Method m);
/// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);
bool is_evidence_method(Method m);
Variant variant_of(Method m);

/// Invalid scenario; what() lists every offending field, one per line.
class ScenarioError : public std::invalid_argument {
public:
    explicit ScenarioError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct Scenario {
    std::string name = "custom";
    std::size_t n_paths = 5;
    std::int64_t n_epochs = 2000;
    NoiseConfig noise = NoiseConfig::nominal(5);
    ClockState initial;
    ScheduleRules events;
    Method method = Method::DS2;
    CalibrationOptions calibration;
    /// Frequency-estimation window; also the warm-up excluded from TDEV.
    std::size_t window = 30;
    /// Epochs a flagged path stays out of the correction after its flag.
    std::size_t quarantine = 0;
    std::uint64_t seed = 1;

    /// Throws ScenarioError listing every invalid field.
    void validate() const;
};

/// fig3, fig4, fig5a, fig5b, fig5c, fig5d, exp3. Throws std::invalid_argument
/// for anything else.
Scenario preset(std::string_view name);
const std::vector<std::string>& preset_names();

nlohmann::json to_json(const Scenario& s);
/// Missing keys take the nominal noise and preset defaults. Throws ScenarioError on
/// malformed or out-of-range fields.
Scenario scenario_from_json(const nlohmann::json& j);

/// Throws IoError when the file cannot be read, ScenarioError when invalid.
Scenario load_scenario(const std::filesystem::path& file);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dsync
