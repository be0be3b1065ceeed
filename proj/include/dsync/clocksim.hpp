// Two-state slave clock, noisy measurement paths and attack/jump schedules.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dsync {

inline constexpr double kPicosecond = 1e-12;
inline constexpr double kNanosecond = 1e-9;

/// True offset (s) and frequency difference (s/s) of the slave clock.
struct ClockState {
    double theta = 0.0;
    double gamma = 0.0;
};

struct NoiseConfig {
    double sigma_theta = 0.0;          // s per step, phase random walk
    double sigma_gamma = 0.0;          // s/s per step, frequency random walk
    std::vector<double> sigma_d;       // s, transmission noise per path
    std::vector<double> sigma_m;       // s, measurement noise per path
    double tau = 1.0;                  // s, epoch interval

    std::size_t n_paths() const { return sigma_d.size(); }

    /// Nominal noise: sigma_theta 10 ps, sigma_gamma 1 ps/s, sigma_d 10 ps and
    /// sigma_m 25 ps on each of `n_paths` paths, tau 1 s.
    static NoiseConfig nominal(std::size_t n_paths);

    /// Throws std::invalid_argument if any sigma is negative/non-finite,
    /// tau <= 0, the path arrays differ in length, or there are fewer than
    /// `min_paths` paths.
    void validate(std::size_t min_paths = 2) const;
};

struct AttackEvent {
    std::size_t path = 0;
    std::int64_t epoch = 0;
    double magnitude = 0.0;   // s
    std::int64_t duration = 1;  // epochs
};

struct JumpEvent {
    std::int64_t epoch = 0;
    double magnitude = 0.0;   // s
};

/// Explicit event lists. Attacks are kept sorted by (path, epoch).
class EventSchedule {
public:
    EventSchedule() = default;

    /// Throws std::invalid_argument on negative epochs, durations < 1 or
    /// overlapping attacks on one path.
    EventSchedule(std::vector<AttackEvent> attacks, std::vector<JumpEvent> jumps);

    const std::vector<AttackEvent>& attacks() const { return attacks_; }
    const std::vector<JumpEvent>& jumps() const { return jumps_; }

    /// Magnitude of the attack active on (path, epoch), 0 if none.
    double attack_at(std::size_t path, std::int64_t epoch) const;
    /// Sum of jump magnitudes scheduled at `epoch`.
    double jump_at(std::int64_t epoch) const;

    std::size_t attack_count(std::size_t path) const;
    bool empty() const { return attacks_.empty() && jumps_.empty(); }

private:
    std::vector<AttackEvent> attacks_;
    std::vector<JumpEvent> jumps_;
};

struct PathObservation {
    std::size_t path_id = 0;
    std::int64_t epoch = 0;
    double measured_offset = 0.0;  // s
    double attack_truth = 0.0;     // s, scoring only
};

enum class StreamKind : std::uint64_t { clock = 1, path = 2 };

/// Gaussian noise source for one (kind, path, epoch) cell.
///
/// Each cell owns an independent std::mt19937_64 whose 64-bit seed is
/// derived from (run seed, kind, path, epoch) through the SplitMix64
/// finalizer. Normal deviates come from Box-Muller over the raw 53-bit
/// uniforms, so draws do not depend on the standard library's
/// distribution implementations and every method sees the same noise for
/// the same seed.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, StreamKind kind, std::size_t path, std::int64_t epoch);

    double gaussian(double sigma);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// One step of the two-state clock model. `jump` is added to theta after
/// the noise draw.
ClockState step_clock(const ClockState& state, double u_theta, const NoiseConfig& noise,
                      NoiseStream& rng, double jump = 0.0);

PathObservation observe_path(double true_theta, std::size_t path_id, std::int64_t epoch,
                             const NoiseConfig& noise, const EventSchedule& schedule,
                             NoiseStream& rng);

/// Periodic event rule: fires at every epoch e in [start, end) with
/// e >= phase and (e - phase) % period == 0. An `end` of -1 means the
/// horizon passed to build_schedule.
struct PeriodicRule {
    std::int64_t period = 0;
    std::int64_t phase = 0;
    std::int64_t start = 0;
    std::int64_t end = -1;
    std::vector<std::size_t> paths;  // attack rules only
    double magnitude = 0.0;          // s
    std::int64_t duration = 1;       // attack rules only
};

struct ScheduleRules {
    std::vector<PeriodicRule> attacks;
    std::vector<PeriodicRule> jumps;
    std::vector<AttackEvent> extra_attacks;
    std::vector<JumpEvent> extra_jumps;
    /// Move a jump forward one epoch while it lands on any attack epoch.
    bool shift_colliding_jumps = true;
};

/// Expands the rules over epochs [0, n_epochs). Throws std::invalid_argument
/// for bad periods, paths >= n_paths or overlapping attacks.
EventSchedule build_schedule(const ScheduleRules& rules, std::int64_t n_epochs,
                             std::size_t n_paths);

}  // namespace dsync
