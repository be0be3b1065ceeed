#include "dsync/clocksim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dsync {

namespace {

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

NoiseConfig NoiseConfig::nominal(std::size_t n_paths) {
    NoiseConfig cfg;
    cfg.sigma_theta = 10 * kPicosecond;
    cfg.sigma_gamma = 1 * kPicosecond;  // 1 ps/s
    cfg.sigma_d.assign(n_paths, 10 * kPicosecond);
    cfg.sigma_m.assign(n_paths, 25 * kPicosecond);
    cfg.tau = 1.0;
    return cfg;
}

void NoiseConfig::validate(std::size_t min_paths) const {
    if (!finite_nonnegative(sigma_theta)) throw std::invalid_argument("sigma_theta must be finite and >= 0");
    if (!finite_nonnegative(sigma_gamma)) throw std::invalid_argument("sigma_gamma must be finite and >= 0");
    if (!(std::isfinite(tau) && tau > 0.0)) throw std::invalid_argument("tau must be finite and > 0");
    if (sigma_d.size() != sigma_m.size())
        throw std::invalid_argument("sigma_d and sigma_m must have one entry per path");
    if (sigma_d.size() < min_paths)
        throw std::invalid_argument("need at least " + std::to_string(min_paths) + " paths, got " +
                                    std::to_string(sigma_d.size()));
    for (std::size_t i = 0; i < sigma_d.size(); ++i) {
        if (!finite_nonnegative(sigma_d[i]) || !finite_nonnegative(sigma_m[i]))
            throw std::invalid_argument("path " + std::to_string(i + 1) + ": sigmas must be finite and >= 0");
    }
}

EventSchedule::EventSchedule(std::vector<AttackEvent> attacks, std::vector<JumpEvent> jumps)
    : attacks_(std::move(attacks)), jumps_(std::move(jumps)) {
    for (const auto& a : attacks_) {
        if (a.epoch < 0) throw std::invalid_argument("attack epoch must be >= 0");
        if (a.duration < 1) throw std::invalid_argument("attack duration must be >= 1");
        if (!std::isfinite(a.magnitude)) throw std::invalid_argument("attack magnitude must be finite");
    }
    for (const auto& j : jumps_) {
        if (j.epoch < 0) throw std::invalid_argument("jump epoch must be >= 0");
        if (!std::isfinite(j.magnitude)) throw std::invalid_argument("jump magnitude must be finite");
    }
    std::sort(attacks_.begin(), attacks_.end(), [](const AttackEvent& x, const AttackEvent& y) {
        return x.path != y.path ? x.path < y.path : x.epoch < y.epoch;
    });
    std::sort(jumps_.begin(), jumps_.end(),
              [](const JumpEvent& x, const JumpEvent& y) { return x.epoch < y.epoch; });
    for (std::size_t k = 1; k < attacks_.size(); ++k) {
        const auto& prev = attacks_[k - 1];
        const auto& cur = attacks_[k];
        if (cur.path == prev.path && cur.epoch < prev.epoch + prev.duration)
            throw std::invalid_argument("overlapping attacks on path " + std::to_string(cur.path + 1) +
                                        " at epoch " + std::to_string(cur.epoch));
    }
}

double EventSchedule::attack_at(std::size_t path, std::int64_t epoch) const {
    // last event on `path` starting at or before `epoch`
    auto it = std::upper_bound(attacks_.begin(), attacks_.end(), std::pair{path, epoch},
                               [](const std::pair<std::size_t, std::int64_t>& key, const AttackEvent& a) {
                                   return key.first != a.path ? key.first < a.path : key.second < a.epoch;
                               });
    if (it == attacks_.begin()) return 0.0;
    --it;
    if (it->path != path) return 0.0;
    return epoch < it->epoch + it->duration ? it->magnitude : 0.0;
}

double EventSchedule::jump_at(std::int64_t epoch) const {
    auto [lo, hi] = std::equal_range(jumps_.begin(), jumps_.end(), JumpEvent{epoch, 0.0},
                                     [](const JumpEvent& x, const JumpEvent& y) { return x.epoch < y.epoch; });
    double total = 0.0;
    for (auto it = lo; it != hi; ++it) total += it->magnitude;
    return total;
}

std::size_t EventSchedule::attack_count(std::size_t path) const {
    return static_cast<std::size_t>(
        std::count_if(attacks_.begin(), attacks_.end(), [path](const AttackEvent& a) { return a.path == path; }));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

NoiseStream::NoiseStream(std::uint64_t seed, StreamKind kind, std::size_t path, std::int64_t epoch) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(kind));
    s = splitmix64(s ^ static_cast<std::uint64_t>(path));
    s = splitmix64(s ^ static_cast<std::uint64_t>(epoch));
    engine_.seed(s);
}

double NoiseStream::gaussian(double sigma) {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * kScale;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * kScale;          // [0, 1)
    if (sigma == 0.0) return 0.0;
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ClockState step_clock(const ClockState& state, double u_theta, const NoiseConfig& noise,
                      NoiseStream& rng, double jump) {
    if (!std::isfinite(state.theta) || !std::isfinite(state.gamma) || !std::isfinite(u_theta) ||
        !std::isfinite(jump))
        throw std::invalid_argument("step_clock: non-finite input");
    const double w_theta = rng.gaussian(noise.sigma_theta);
    const double w_gamma = rng.gaussian(noise.sigma_gamma);
    ClockState next;
    next.theta = state.theta + u_theta + state.gamma * noise.tau + w_theta + jump;
    next.gamma = state.gamma + w_gamma;
    return next;
}

PathObservation observe_path(double true_theta, std::size_t path_id, std::int64_t epoch,
                             const NoiseConfig& noise, const EventSchedule& schedule,
                             NoiseStream& rng) {
    if (path_id >= noise.n_paths())
        throw std::out_of_range("observe_path: path " + std::to_string(path_id) + " out of range (N=" +
                                std::to_string(noise.n_paths()) + ")");
    if (!std::isfinite(true_theta)) throw std::invalid_argument("observe_path: non-finite theta");
    const double w_d = rng.gaussian(noise.sigma_d[path_id]);
    const double w_m = rng.gaussian(noise.sigma_m[path_id]);
    PathObservation obs;
    obs.path_id = path_id;
    obs.epoch = epoch;
    obs.attack_truth = schedule.attack_at(path_id, epoch);
    obs.measured_offset = true_theta + w_d + w_m + obs.attack_truth;
    return obs;
}

namespace {

std::vector<std::int64_t> expand(const PeriodicRule& rule, std::int64_t n_epochs) {
    if (rule.period <= 0) throw std::invalid_argument("rule period must be > 0");
    if (rule.phase < 0 || rule.start < 0) throw std::invalid_argument("rule phase/start must be >= 0");
    const std::int64_t end = rule.end < 0 ? n_epochs : std::min(rule.end, n_epochs);
    std::vector<std::int64_t> epochs;
    std::int64_t first = rule.phase;
    if (first < rule.start) first += ((rule.start - first + rule.period - 1) / rule.period) * rule.period;
    for (std::int64_t e = first; e < end; e += rule.period) epochs.push_back(e);
    return epochs;
}

}  // namespace

EventSchedule build_schedule(const ScheduleRules& rules, std::int64_t n_epochs, std::size_t n_paths) {
    if (n_epochs < 0) throw std::invalid_argument("n_epochs must be >= 0");
    std::vector<AttackEvent> attacks = rules.extra_attacks;
    for (const auto& rule : rules.attacks) {
        if (rule.paths.empty()) throw std::invalid_argument("attack rule needs at least one path");
        for (auto p : rule.paths)
            if (p >= n_paths)
                throw std::invalid_argument("attack rule references path " + std::to_string(p + 1) +
                                            " but only " + std::to_string(n_paths) + " paths exist");
        for (auto e : expand(rule, n_epochs))
            for (auto p : rule.paths) attacks.push_back({p, e, rule.magnitude, rule.duration});
    }
    for (const auto& a : attacks)
        if (a.path >= n_paths)
            throw std::invalid_argument("attack on path " + std::to_string(a.path + 1) + " out of range");

    std::vector<JumpEvent> jumps = rules.extra_jumps;
    for (const auto& rule : rules.jumps)
        for (auto e : expand(rule, n_epochs)) jumps.push_back({e, rule.magnitude});

    // validates overlaps before collision handling needs attack_at()
    EventSchedule attacks_only(std::move(attacks), {});
    if (rules.shift_colliding_jumps) {
        auto collides = [&](std::int64_t e) {
            for (std::size_t p = 0; p < n_paths; ++p)
                if (attacks_only.attack_at(p, e) != 0.0) return true;
            return false;
        };
        std::vector<JumpEvent> shifted;
        for (auto j : jumps) {
            while (collides(j.epoch)) ++j.epoch;
            if (j.epoch < n_epochs) shifted.push_back(j);
        }
        jumps = std::move(shifted);
    }
    return EventSchedule(attacks_only.attacks(), std::move(jumps));
}

}  // namespace dsync
