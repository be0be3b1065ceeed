// Per-epoch secure combination of N measured offsets.
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "dsync/clocksim.hpp"
#include "dsync/evidence.hpp"

namespace dsync {

struct Verdict {
    std::size_t path_id = 0;
    std::int64_t epoch = 0;
    MassPair fused;
    bool flagged = false;  // fused.m_attack > 0.5
};

struct FrequencyEstimate {
    double gamma_hat = 0.0;  // s/s
    std::size_t window = 0;
};

/// Null-residual calibrations: one per path for the frequency-detrended self
/// residual, one per ordered path pair for the virtual residuals.
class CalibrationSet {
public:
    CalibrationSet(std::vector<Calibration> self, std::vector<Calibration> cross);

    /// Calibrates each residual type from the noise model.
    ///
    /// Self residual of path i: its own path noise, one step of clock phase
    /// noise, and the noise of the previous epoch's correction (mean over N
    /// paths). Cross residual of (i, j): sigma_i^2 + sigma_j^2 of the two
    /// paths; clock terms cancel. Zero sigmas are floored at `sigma_floor`.
    static CalibrationSet from_noise(const NoiseConfig& noise, const CalibrationOptions& options,
                                     double sigma_floor = 1e-15);

    std::size_t n_paths() const { return self_.size(); }
    const Calibration& self(std::size_t i) const { return self_.at(i); }
    const Calibration& cross(std::size_t i, std::size_t j) const { return cross_.at(i * n_paths() + j); }

    /// Copy with k_min/k_max replaced everywhere.
    CalibrationSet with_clamps(double k_min, double k_max) const;

private:
    std::vector<Calibration> self_;
    std::vector<Calibration> cross_;  // row-major N x N, diagonal unused
};

/// Self residual |offsets[i] - gamma_hat * tau| followed by the N-1 virtual
/// residuals |offsets[i] - offsets[j]|, j != i in increasing order.
std::vector<double> residuals_for_path(std::size_t i, std::span<const double> offsets, double gamma_hat,
                                       double tau);

/// Evidence masses for path i in residuals_for_path() order.
std::vector<MassPair> evidence_for_path(std::size_t i, std::span<const double> offsets,
                                        const CalibrationSet& calibs, double gamma_hat, double tau,
                                        Variant variant);

std::vector<Verdict> classify_paths(std::span<const double> offsets, const CalibrationSet& calibs,
                                    double gamma_hat, double tau, Variant variant, std::int64_t epoch = 0);

/// -mean of unflagged offsets; holdover -gamma_hat * tau if every path is
/// flagged.
double compute_update(std::span<const double> offsets, std::span<const Verdict> verdicts, double gamma_hat,
                      double tau);

/// Least-squares slope of `history` (one sample per epoch, oldest first)
/// against time. Zero with fewer than two samples.
FrequencyEstimate estimate_frequency(std::span<const double> history, double tau);

/// Sliding-window frequency tracker over the reconstructed free-running
/// phase: the combined offset plus every correction applied so far.
class FrequencyTracker {
public:
    explicit FrequencyTracker(std::size_t window = 30, double tau = 1.0);

    FrequencyEstimate estimate() const;

    /// Record epoch n. `combined_offset` is the mean of the trusted offsets;
    /// pass `trusted = false` when none were trusted and the phase is
    /// extrapolated from the current estimate. `u_theta` is the correction
    /// computed at this epoch.
    void push(double combined_offset, bool trusted, double u_theta);

    std::size_t window() const { return window_; }

private:
    std::size_t window_;
    double tau_;
    double applied_ = 0.0;  // sum of corrections before the current epoch
    std::deque<double> phase_;
    std::vector<double> scratch_;
    FrequencyEstimate current_;
};

}  // namespace dsync
