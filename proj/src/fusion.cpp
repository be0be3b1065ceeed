#include "dsync/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dsync {

CalibrationSet::CalibrationSet(std::vector<Calibration> self, std::vector<Calibration> cross)
    : self_(std::move(self)), cross_(std::move(cross)) {
    if (cross_.size() != self_.size() * self_.size())
        throw std::invalid_argument("CalibrationSet: cross table must be N x N");
}

CalibrationSet CalibrationSet::from_noise(const NoiseConfig& noise, const CalibrationOptions& options,
                                          double sigma_floor) {
    const std::size_t n = noise.n_paths();
    if (n == 0) throw std::invalid_argument("CalibrationSet: no paths");
    std::vector<double> path_var(n);
    double mean_var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        path_var[i] = noise.sigma_d[i] * noise.sigma_d[i] + noise.sigma_m[i] * noise.sigma_m[i];
        mean_var += path_var[i];
    }
    // variance of the mean of N path noises
    mean_var /= static_cast<double>(n * n);
    const double clock_var = noise.sigma_theta * noise.sigma_theta;
    auto sigma_of = [&](double var) { return std::max(std::sqrt(var), sigma_floor); };

    std::vector<Calibration> self(n);
    std::vector<Calibration> cross(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        self[i] = calibrate(sigma_of(path_var[i] + clock_var + mean_var), options);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (j < i) {
                cross[i * n + j] = cross[j * n + i];
                continue;
            }
            cross[i * n + j] = calibrate(sigma_of(path_var[i] + path_var[j]), options);
        }
        cross[i * n + i] = self[i];
    }
    return CalibrationSet(std::move(self), std::move(cross));
}

CalibrationSet CalibrationSet::with_clamps(double k_min, double k_max) const {
    CalibrationSet out = *this;
    for (auto& c : out.self_) c.k_min = k_min, c.k_max = k_max;
    for (auto& c : out.cross_) c.k_min = k_min, c.k_max = k_max;
    return out;
}

std::vector<double> residuals_for_path(std::size_t i, std::span<const double> offsets, double gamma_hat,
                                       double tau) {
    if (offsets.size() < 2) throw std::invalid_argument("residuals_for_path: need N >= 2 offsets");
    if (i >= offsets.size())
        throw std::out_of_range("residuals_for_path: path " + std::to_string(i) + " out of range");
    std::vector<double> r;
    r.reserve(offsets.size());
    r.push_back(std::abs(offsets[i] - gamma_hat * tau));
    for (std::size_t j = 0; j < offsets.size(); ++j)
        if (j != i) r.push_back(std::abs(offsets[i] - offsets[j]));
    return r;
}

std::vector<MassPair> evidence_for_path(std::size_t i, std::span<const double> offsets,
                                        const CalibrationSet& calibs, double gamma_hat, double tau,
                                        Variant variant) {
    if (calibs.n_paths() != offsets.size())
        throw std::invalid_argument("evidence_for_path: calibration set has " + std::to_string(calibs.n_paths()) +
                                    " paths, offsets have " + std::to_string(offsets.size()));
    const auto residuals = residuals_for_path(i, offsets, gamma_hat, tau);
    std::vector<MassPair> masses;
    masses.reserve(residuals.size());
    masses.push_back(bpa_from_residual(residuals[0], calibs.self(i), variant));
    std::size_t k = 1;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        if (j == i) continue;
        masses.push_back(bpa_from_residual(residuals[k++], calibs.cross(i, j), variant));
    }
    return masses;
}

std::vector<Verdict> classify_paths(std::span<const double> offsets, const CalibrationSet& calibs,
                                    double gamma_hat, double tau, Variant variant, std::int64_t epoch) {
    std::vector<Verdict> verdicts;
    verdicts.reserve(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const auto masses = evidence_for_path(i, offsets, calibs, gamma_hat, tau, variant);
        Verdict v;
        v.path_id = i;
        v.epoch = epoch;
        v.fused = combine_all(masses);
        v.flagged = v.fused.m_attack > 0.5;
        verdicts.push_back(v);
    }
    return verdicts;
}

double compute_update(std::span<const double> offsets, std::span<const Verdict> verdicts, double gamma_hat,
                      double tau) {
    if (offsets.size() != verdicts.size())
        throw std::invalid_argument("compute_update: offsets and verdicts differ in length");
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (verdicts[i].flagged) continue;
        sum += offsets[i];
        ++used;
    }
    if (used == 0) return -gamma_hat * tau;
    return -(sum / static_cast<double>(used));
}

FrequencyEstimate estimate_frequency(std::span<const double> history, double tau) {
    FrequencyEstimate est;
    est.window = history.size();
    if (history.size() < 2) return est;
    const double n = static_cast<double>(history.size());
    const double t_mean = (n - 1) / 2;
    double y_mean = 0.0;
    for (double y : history) y_mean += y;
    y_mean /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < history.size(); ++k) {
        const double dt = static_cast<double>(k) - t_mean;
        sxy += dt * (history[k] - y_mean);
        sxx += dt * dt;
    }
    est.gamma_hat = sxy / sxx / tau;
    return est;
}

FrequencyTracker::FrequencyTracker(std::size_t window, double tau) : window_(window), tau_(tau) {
    if (window < 2) throw std::invalid_argument("FrequencyTracker: window must be >= 2");
    if (!(tau > 0.0)) throw std::invalid_argument("FrequencyTracker: tau must be > 0");
}

FrequencyEstimate FrequencyTracker::estimate() const { return current_; }

void FrequencyTracker::push(double combined_offset, bool trusted, double u_theta) {
    double phase;
    if (trusted) {
        phase = combined_offset - applied_;
    } else {
        phase = phase_.empty() ? 0.0 : phase_.back() + current_.gamma_hat * tau_;
    }
    phase_.push_back(phase);
    if (phase_.size() > window_) phase_.pop_front();
    applied_ += u_theta;

    scratch_.assign(phase_.begin(), phase_.end());
    current_ = estimate_frequency(scratch_, tau_);
}

}  // namespace dsync
