// Dempster-Shafer evidence over the frame {normal, attack}.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>

namespace dsync {

/// Basic probability assignment over {normal, attack}. Mass lives only on
/// the singletons, so m_normal = 1 - m_attack and m(empty) = 0.
struct MassPair {
    double m_attack = 0.5;
    double m_normal = 0.5;

    static MassPair from_attack(double m_attack) { return {m_attack, 1.0 - m_attack}; }
    static MassPair vacuous() { return {0.5, 0.5}; }

    bool valid(double tol = 1e-12) const {
        return m_attack >= 0.0 && m_normal >= 0.0 && std::abs(m_attack + m_normal - 1.0) <= tol;
    }
    friend bool operator==(const MassPair&, const MassPair&) = default;
};

/// DS0: raw sigmoid. DS1: capped at k_max. DS2: clamped to [k_min, k_max].
enum class Variant { DS0, DS1, DS2 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

/// Thrown by combine() when the two masses are in total conflict.
class TotalConflictError : public std::domain_error {
public:
    TotalConflictError() : std::domain_error("Dempster combination undefined: total conflict (1 - K <= eps)") {}
};

struct Calibration {
    double p_false_alarm = 1e-5;
    double p_miss = 1e-5;
    double sigma_residual = 0.0;  // s
    double threshold = 0.0;       // T, s
    double min_detectable = 0.0;  // L, s
    double steepness = 0.0;       // A, 1/s
    double midpoint = 0.0;        // B, s
    double k_max = 0.7;
    double k_min = 0.1;

    /// Throws std::invalid_argument naming the first violated bound.
    void validate() const;
};

// Per-residual rates. A path is judged on N correlated residuals every
// epoch, so the per-residual rate has to sit well below the tolerable
// per-path false flag rate.
struct CalibrationOptions {
    double p_false_alarm = 1e-5;
    double p_miss = 1e-5;
    double k_max = 0.7;
    double k_min = 0.1;
    /// A = steepness_log_odds / B, i.e. log(m_normal/m_attack) of the raw
    /// sigmoid at x = 0. The default ln(99) puts m_attack at 0.01 for x = 0
    /// and 0.99 for x = 2B.
    double steepness_log_odds = std::log(99.0);
    /// Split p_F over both tails of the signed residual.
    bool two_sided = false;
};

/// Mass for an absolute residual x >= 0. Throws std::invalid_argument on
/// negative or NaN x.
MassPair bpa_from_residual(double x, const Calibration& calib, Variant variant);

/// Dempster's rule on the two-element frame.
MassPair combine(const MassPair& a, const MassPair& b);

/// Left fold of combine(). Throws std::invalid_argument on an empty list.
MassPair combine_all(std::span<const MassPair> masses);

/// Standard normal quantile.
double normal_quantile(double p);

/// T with p_F = 1 - Phi(T / sigma). Valid for p_F in (0, 1).
double false_alarm_threshold(double sigma, double p_false_alarm);

/// T, L, B and A for a zero-mean Gaussian null residual with std `sigma`.
/// L solves p_M = Phi((T - L) / sigma); B = L / 2 is where the null and the
/// mean-L densities cross.
Calibration calibrate(double sigma, const CalibrationOptions& options = {});

}  // namespace dsync
