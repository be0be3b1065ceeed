#include "dsync/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dsync {

using nlohmann::json;

std::string_view to_string(Method m) {
    switch (m) {
        case Method::DS0: return "DS0";
        case Method::DS1: return "DS1";
        case Method::DS2: return "DS2";
        case Method::FTA: return "FTA";
        case Method::Single: return "Single";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (auto m : {Method::DS0, Method::DS1, Method::DS2, Method::FTA, Method::Single})
        if (name == to_string(m)) return m;
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (DS0, DS1, DS2, FTA, Single)");
}

bool is_evidence_method(Method m) { return m == Method::DS0 || m == Method::DS1 || m == Method::DS2; }

Variant variant_of(Method m) {
    switch (m) {
        case Method::DS0: return Variant::DS0;
        case Method::DS1: return Variant::DS1;
        case Method::DS2: return Variant::DS2;
        default: throw std::invalid_argument("method " + std::string(to_string(m)) + " has no evidence variant");
    }
}

namespace {

std::string join_lines(const std::vector<std::string>& items) {
    std::string out = "invalid scenario:";
    for (const auto& s : items) out += "\n  " + s;
    return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::invalid_argument(join_lines(problems)), problems_(std::move(problems)) {}

void Scenario::validate() const {
    std::vector<std::string> problems;
    auto check = [&](bool ok, std::string msg) {
        if (!ok) problems.push_back(std::move(msg));
    };
    const std::size_t min_paths = method == Method::FTA ? 3 : method == Method::Single ? 1 : 2;
    check(n_paths >= min_paths, "n_paths: " + std::string(to_string(method)) + " needs at least " +
                                    std::to_string(min_paths) + " paths");
    check(n_epochs >= 0, "n_epochs: must be >= 0");
    check(noise.sigma_d.size() == n_paths, "noise.sigma_d_ps: expected " + std::to_string(n_paths) + " entries");
    check(noise.sigma_m.size() == n_paths, "noise.sigma_m_ps: expected " + std::to_string(n_paths) + " entries");
    try {
        noise.validate(1);
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("noise: ") + e.what());
    }
    check(std::isfinite(initial.theta) && std::isfinite(initial.gamma), "initial: values must be finite");
    check(window >= 2, "window: must be >= 2");
    check(calibration.p_false_alarm > 0 && calibration.p_false_alarm < 0.5,
          "calibration.p_false_alarm: must lie in (0, 0.5)");
    check(calibration.p_miss > 0 && calibration.p_miss < 0.5, "calibration.p_miss: must lie in (0, 0.5)");
    check(calibration.k_min >= 0 && calibration.k_min < 0.5, "calibration.k_min: must lie in [0, 0.5)");
    check(calibration.k_max > 0.5 && calibration.k_max <= 1, "calibration.k_max: must lie in (0.5, 1]");
    check(calibration.steepness_log_odds > 0, "calibration.steepness_log_odds: must be > 0");
    if (problems.empty()) {
        try {
            (void)build_schedule(events, n_epochs, n_paths);
        } catch (const std::invalid_argument& e) {
            problems.push_back(std::string("events: ") + e.what());
        }
    }
    if (!problems.empty()) throw ScenarioError(std::move(problems));
}

namespace {

PeriodicRule attack_rule(std::int64_t phase, std::vector<std::size_t> paths, double magnitude) {
    PeriodicRule r;
    r.period = 50;
    r.phase = phase;
    r.paths = std::move(paths);
    r.magnitude = magnitude;
    return r;
}

PeriodicRule jump_rule() {
    PeriodicRule r;
    r.period = 30;
    r.phase = 30;
    r.magnitude = 1 * kNanosecond;
    return r;
}

Scenario base(std::string name, std::size_t n_paths, std::int64_t n_epochs) {
    Scenario s;
    s.name = std::move(name);
    s.n_paths = n_paths;
    s.n_epochs = n_epochs;
    s.noise = NoiseConfig::nominal(n_paths);
    return s;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "exp3"};
    return names;
}

Scenario preset(std::string_view name) {
    constexpr double kTda = 10 * kNanosecond;
    if (name == "fig3") {
        auto s = base("fig3", 5, 2000);
        for (std::size_t i = 0; i < 5; ++i)
            s.events.attacks.push_back(attack_rule(static_cast<std::int64_t>(10 * i), {i}, kTda));
        return s;
    }
    if (name == "fig4") {
        auto s = base("fig4", 5, 2000);
        s.events.attacks = {attack_rule(0, {0, 1}, kTda), attack_rule(20, {2, 3}, kTda), attack_rule(40, {4}, kTda)};
        return s;
    }
    if (name == "fig5a") return base("fig5a", 5, 3000);
    if (name == "fig5b") {
        auto s = base("fig5b", 5, 3000);
        s.events.attacks = {attack_rule(0, {0, 1}, kTda)};
        return s;
    }
    if (name == "fig5c") {
        auto s = base("fig5c", 5, 3000);
        s.events.jumps = {jump_rule()};
        return s;
    }
    if (name == "fig5d") {
        auto s = base("fig5d", 5, 3000);
        s.events.attacks = {attack_rule(0, {0, 1}, kTda)};
        s.events.jumps = {jump_rule()};
        return s;
    }
    if (name == "exp3") {
        auto s = base("exp3", 3, 3000);
        s.events.attacks = {attack_rule(0, {0}, 1.25 * kNanosecond)};
        s.events.jumps = {jump_rule()};
        return s;
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

// ---- JSON ---------------------------------------------------------------

namespace {

constexpr double kPs = kPicosecond;

json rule_to_json(const PeriodicRule& r, bool with_paths) {
    json j{{"period", r.period}, {"phase", r.phase}, {"magnitude_ps", r.magnitude / kPs}};
    if (r.start != 0) j["start"] = r.start;
    if (r.end >= 0) j["end"] = r.end;
    if (with_paths) {
        json paths = json::array();
        for (auto p : r.paths) paths.push_back(p + 1);
        j["paths"] = paths;
        j["duration"] = r.duration;
    }
    return j;
}

json ps_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x / kPs);
    return a;
}

/// Reads typed fields and records a message per bad field instead of
/// throwing on the first one.
class Reader {
public:
    std::vector<std::string> problems;

    template <typename T>
    void get(const json& obj, const char* key, const std::string& path, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            problems.push_back(path + key + ": wrong type (" + obj.at(key).dump() + ")");
        }
    }

    void get_ps(const json& obj, const char* key, const std::string& path, double& out) {
        double v = out / kPs;
        get(obj, key, path, v);
        out = v * kPs;
    }

    void get_ps_array(const json& obj, const char* key, const std::string& path, std::size_t n,
                      std::vector<double>& out) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (v.is_number()) {
            out.assign(n, v.get<double>() * kPs);
        } else if (v.is_array()) {
            out.clear();
            for (const auto& x : v) {
                if (!x.is_number()) {
                    problems.push_back(path + key + ": entries must be numbers");
                    return;
                }
                out.push_back(x.get<double>() * kPs);
            }
        } else {
            problems.push_back(path + key + ": expected a number or an array");
        }
    }

    PeriodicRule rule(const json& j, const std::string& path, bool with_paths) {
        PeriodicRule r;
        if (!j.is_object()) {
            problems.push_back(path + ": expected an object");
            return r;
        }
        get(j, "period", path, r.period);
        get(j, "phase", path, r.phase);
        get(j, "start", path, r.start);
        get(j, "end", path, r.end);
        get_ps(j, "magnitude_ps", path, r.magnitude);
        if (!j.contains("period")) problems.push_back(path + "period: required");
        if (with_paths) {
            get(j, "duration", path, r.duration);
            std::vector<std::int64_t> paths;
            get(j, "paths", path, paths);
            for (auto p : paths) {
                if (p < 1) {
                    problems.push_back(path + "paths: path numbers start at 1");
                    continue;
                }
                r.paths.push_back(static_cast<std::size_t>(p - 1));
            }
        }
        return r;
    }
};

}  // namespace

json to_json(const Scenario& s) {
    json events{{"attacks", json::array()}, {"jumps", json::array()},
                {"shift_colliding_jumps", s.events.shift_colliding_jumps}};
    for (const auto& r : s.events.attacks) events["attacks"].push_back(rule_to_json(r, true));
    for (const auto& r : s.events.jumps) events["jumps"].push_back(rule_to_json(r, false));
    if (!s.events.extra_attacks.empty()) {
        json a = json::array();
        for (const auto& e : s.events.extra_attacks)
            a.push_back({{"path", e.path + 1}, {"epoch", e.epoch}, {"magnitude_ps", e.magnitude / kPs},
                         {"duration", e.duration}});
        events["attack_events"] = a;
    }
    if (!s.events.extra_jumps.empty()) {
        json a = json::array();
        for (const auto& e : s.events.extra_jumps) a.push_back({{"epoch", e.epoch}, {"magnitude_ps", e.magnitude / kPs}});
        events["jump_events"] = a;
    }
    return json{
        {"name", s.name},
        {"n_paths", s.n_paths},
        {"n_epochs", s.n_epochs},
        {"tau_s", s.noise.tau},
        {"seed", s.seed},
        {"method", std::string(to_string(s.method))},
        {"window", s.window},
        {"quarantine", s.quarantine},
        {"initial", {{"theta_ps", s.initial.theta / kPs}, {"gamma_ps_per_s", s.initial.gamma / kPs}}},
        {"noise",
         {{"sigma_theta_ps", s.noise.sigma_theta / kPs},
          {"sigma_gamma_ps_per_s", s.noise.sigma_gamma / kPs},
          {"sigma_d_ps", ps_array(s.noise.sigma_d)},
          {"sigma_m_ps", ps_array(s.noise.sigma_m)}}},
        {"calibration",
         {{"p_false_alarm", s.calibration.p_false_alarm},
          {"p_miss", s.calibration.p_miss},
          {"k_max", s.calibration.k_max},
          {"k_min", s.calibration.k_min},
          {"steepness_log_odds", s.calibration.steepness_log_odds},
          {"two_sided", s.calibration.two_sided}}},
        {"events", events},
    };
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ScenarioError({"<root>: expected a JSON object"});
    Reader rd;
    Scenario s;
    if (j.contains("preset")) {
        std::string name;
        rd.get(j, "preset", "", name);
        try {
            s = preset(name);
        } catch (const std::invalid_argument& e) {
            rd.problems.push_back(std::string("preset: ") + e.what());
        }
    }
    rd.get(j, "name", "", s.name);
    auto get_count = [&](const char* key, std::size_t& out, std::int64_t lo, std::int64_t hi) {
        std::int64_t v = static_cast<std::int64_t>(out);
        rd.get(j, key, "", v);
        if (v < lo || v > hi)
            rd.problems.push_back(std::string(key) + ": must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
        else
            out = static_cast<std::size_t>(v);
    };
    get_count("n_paths", s.n_paths, 1, 1024);
    get_count("window", s.window, 2, 1'000'000);
    get_count("quarantine", s.quarantine, 0, 1'000'000);
    rd.get(j, "n_epochs", "", s.n_epochs);
    rd.get(j, "seed", "", s.seed);
    if (j.contains("method")) {
        std::string m;
        rd.get(j, "method", "", m);
        try {
            s.method = parse_method(m);
        } catch (const std::invalid_argument& e) {
            rd.problems.push_back(std::string("method: ") + e.what());
        }
    }
    // path arrays follow n_paths unless given explicitly
    if (s.noise.sigma_d.size() != s.n_paths) {
        const NoiseConfig t1 = NoiseConfig::nominal(s.n_paths);
        s.noise.sigma_d = t1.sigma_d;
        s.noise.sigma_m = t1.sigma_m;
    }
    rd.get(j, "tau_s", "", s.noise.tau);
    if (j.contains("initial")) {
        const auto& ini = j.at("initial");
        rd.get_ps(ini, "theta_ps", "initial.", s.initial.theta);
        rd.get_ps(ini, "gamma_ps_per_s", "initial.", s.initial.gamma);
    }
    if (j.contains("noise")) {
        const auto& nz = j.at("noise");
        rd.get_ps(nz, "sigma_theta_ps", "noise.", s.noise.sigma_theta);
        rd.get_ps(nz, "sigma_gamma_ps_per_s", "noise.", s.noise.sigma_gamma);
        rd.get_ps_array(nz, "sigma_d_ps", "noise.", s.n_paths, s.noise.sigma_d);
        rd.get_ps_array(nz, "sigma_m_ps", "noise.", s.n_paths, s.noise.sigma_m);
    }
    if (j.contains("calibration")) {
        const auto& c = j.at("calibration");
        rd.get(c, "p_false_alarm", "calibration.", s.calibration.p_false_alarm);
        rd.get(c, "p_miss", "calibration.", s.calibration.p_miss);
        rd.get(c, "k_max", "calibration.", s.calibration.k_max);
        rd.get(c, "k_min", "calibration.", s.calibration.k_min);
        rd.get(c, "steepness_log_odds", "calibration.", s.calibration.steepness_log_odds);
        rd.get(c, "two_sided", "calibration.", s.calibration.two_sided);
    }
    if (j.contains("events")) {
        const auto& ev = j.at("events");
        rd.get(ev, "shift_colliding_jumps", "events.", s.events.shift_colliding_jumps);
        if (ev.contains("attacks")) {
            s.events.attacks.clear();
            std::size_t k = 0;
            for (const auto& r : ev.at("attacks"))
                s.events.attacks.push_back(rd.rule(r, "events.attacks[" + std::to_string(k++) + "].", true));
        }
        if (ev.contains("jumps")) {
            s.events.jumps.clear();
            std::size_t k = 0;
            for (const auto& r : ev.at("jumps"))
                s.events.jumps.push_back(rd.rule(r, "events.jumps[" + std::to_string(k++) + "].", false));
        }
        if (ev.contains("attack_events")) {
            s.events.extra_attacks.clear();
            std::size_t k = 0;
            for (const auto& e : ev.at("attack_events")) {
                const std::string path = "events.attack_events[" + std::to_string(k++) + "].";
                std::int64_t p = 0;
                AttackEvent a;
                rd.get(e, "path", path, p);
                rd.get(e, "epoch", path, a.epoch);
                rd.get(e, "duration", path, a.duration);
                rd.get_ps(e, "magnitude_ps", path, a.magnitude);
                if (p < 1) {
                    rd.problems.push_back(path + "path: path numbers start at 1");
                    continue;
                }
                a.path = static_cast<std::size_t>(p - 1);
                s.events.extra_attacks.push_back(a);
            }
        }
        if (ev.contains("jump_events")) {
            s.events.extra_jumps.clear();
            std::size_t k = 0;
            for (const auto& e : ev.at("jump_events")) {
                const std::string path = "events.jump_events[" + std::to_string(k++) + "].";
                JumpEvent jmp;
                rd.get(e, "epoch", path, jmp.epoch);
                rd.get_ps(e, "magnitude_ps", path, jmp.magnitude);
                s.events.extra_jumps.push_back(jmp);
            }
        }
    }
    if (!rd.problems.empty()) throw ScenarioError(std::move(rd.problems));
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open scenario file '" + file.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError({file.string() + ": " + e.what()});
    }
    return scenario_from_json(j);
}

}  // namespace dsync
