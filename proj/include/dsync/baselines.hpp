// Comparison methods: fault tolerant averaging and a single-path detector.
#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <utility>

namespace dsync {

/// Negated mean after dropping one maximum and one minimum. Throws
/// std::invalid_argument for fewer than three offsets.
double fta_update(std::span<const double> offsets);

/// Indices FTA drops: {index of the minimum, index of the maximum}. Ties go
/// to the lowest index; the two indices always differ.
std::pair<std::size_t, std::size_t> fta_excluded(std::span<const double> offsets);

/// State of the single-path clock-model detector.
///
/// This is a minimal stand-in for a Kalman innovation test: the residual
/// is the measured offset minus the predicted frequency step, tested
/// against a calibrated threshold. Accepted measurements feed the
/// reconstructed phase window used for the frequency estimate; rejected
/// ones do not.
struct SingleDetectorState {
    double gamma_hat = 0.0;
    double threshold = 0.0;          // s
    std::size_t window_length = 30;
    double applied = 0.0;            // sum of corrections so far, s
    std::deque<double> phase_window;  // reconstructed phase of accepted epochs
};

struct SingleUpdate {
    double u_theta = 0.0;
    bool flagged = false;
    SingleDetectorState state;
};

SingleUpdate single_update(double offset, const SingleDetectorState& state, double tau);

}  // namespace dsync
