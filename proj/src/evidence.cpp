#include "dsync/evidence.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace dsync {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::DS0: return "DS0";
        case Variant::DS1: return "DS1";
        case Variant::DS2: return "DS2";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    if (name == "DS0") return Variant::DS0;
    if (name == "DS1") return Variant::DS1;
    if (name == "DS2") return Variant::DS2;
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void Calibration::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("calibration: ") + what); };
    if (!(p_false_alarm > 0.0 && p_false_alarm < 0.5)) fail("p_F must lie in (0, 0.5)");
    if (!(p_miss > 0.0 && p_miss < 0.5)) fail("p_M must lie in (0, 0.5)");
    if (!(threshold > 0.0)) fail("T must be > 0");
    if (!(min_detectable > threshold)) fail("L must exceed T");
    if (!(midpoint > 0.0)) fail("B must be > 0");
    if (!(steepness > 0.0)) fail("A must be > 0");
    if (!(k_min >= 0.0 && k_min < 0.5)) fail("k_min must lie in [0, 0.5)");
    if (!(k_max > 0.5 && k_max <= 1.0)) fail("k_max must lie in (0.5, 1]");
}

MassPair bpa_from_residual(double x, const Calibration& calib, Variant variant) {
    if (!(x >= 0.0)) throw std::invalid_argument("bpa_from_residual: residual must be >= 0 (pass |r|)");
    double m = 1.0 / (1.0 + std::exp(-calib.steepness * (x - calib.midpoint)));
    switch (variant) {
        case Variant::DS0: break;
        case Variant::DS1: m = std::min(m, calib.k_max); break;
        case Variant::DS2: m = std::clamp(m, calib.k_min, calib.k_max); break;
    }
    return MassPair::from_attack(m);
}

MassPair combine(const MassPair& a, const MassPair& b) {
    const double agree_attack = a.m_attack * b.m_attack;
    const double agree_normal = a.m_normal * b.m_normal;
    // equals 1 - K for normalized inputs, without the cancellation
    const double norm = agree_attack + agree_normal;
    if (!(norm > std::numeric_limits<double>::min())) throw TotalConflictError();
    return {agree_attack / norm, agree_normal / norm};
}

MassPair combine_all(std::span<const MassPair> masses) {
    if (masses.empty()) throw std::invalid_argument("combine_all: empty evidence list");
    MassPair acc = masses.front();
    for (const auto& m : masses.subspan(1)) acc = combine(acc, m);
    return acc;
}

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double false_alarm_threshold(double sigma, double p_false_alarm) {
    if (!(p_false_alarm > 0.0 && p_false_alarm < 1.0))
        throw std::invalid_argument("false_alarm_threshold: p_F must lie in (0, 1)");
    if (!(std::isfinite(sigma) && sigma > 0.0))
        throw std::invalid_argument("false_alarm_threshold: sigma must be finite and > 0");
    const boost::math::normal_distribution<double> unit;
    return sigma * boost::math::quantile(boost::math::complement(unit, p_false_alarm));
}

Calibration calibrate(double sigma, const CalibrationOptions& options) {
    if (!(options.p_false_alarm > 0.0 && options.p_false_alarm < 0.5))
        throw std::invalid_argument("calibrate: p_F must lie in (0, 0.5)");
    if (!(options.p_miss > 0.0 && options.p_miss < 0.5))
        throw std::invalid_argument("calibrate: p_M must lie in (0, 0.5)");
    if (!(options.steepness_log_odds > 0.0))
        throw std::invalid_argument("calibrate: steepness log-odds must be > 0");

    Calibration c;
    c.p_false_alarm = options.p_false_alarm;
    c.p_miss = options.p_miss;
    c.sigma_residual = sigma;
    c.k_max = options.k_max;
    c.k_min = options.k_min;

    const double tail = options.two_sided ? options.p_false_alarm / 2 : options.p_false_alarm;
    c.threshold = false_alarm_threshold(sigma, tail);
    // p_M = Phi((T - L) / sigma)  =>  L = T + sigma * z(1 - p_M)
    c.min_detectable = c.threshold + false_alarm_threshold(sigma, options.p_miss);
    c.midpoint = c.min_detectable / 2;
    c.steepness = options.steepness_log_odds / c.midpoint;
    c.validate();
    return c;
}

}  // namespace dsync
