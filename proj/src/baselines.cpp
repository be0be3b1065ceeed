#include "dsync/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dsync/fusion.hpp"

namespace dsync {

std::pair<std::size_t, std::size_t> fta_excluded(std::span<const double> offsets) {
    if (offsets.size() < 3) throw std::invalid_argument("fta: need at least 3 offsets");
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i < offsets.size(); ++i) {
        if (offsets[i] < offsets[lo]) lo = i;
        if (offsets[i] > offsets[hi]) hi = i;
    }
    // all equal: drop two distinct entries
    if (lo == hi) hi = lo == 0 ? 1 : 0;
    return {lo, hi};
}

double fta_update(std::span<const double> offsets) {
    const auto [lo, hi] = fta_excluded(offsets);
    double sum = 0.0;
    for (std::size_t i = 0; i < offsets.size(); ++i)
        if (i != lo && i != hi) sum += offsets[i];
    return -(sum / static_cast<double>(offsets.size() - 2));
}

SingleUpdate single_update(double offset, const SingleDetectorState& state, double tau) {
    if (!std::isfinite(offset)) throw std::invalid_argument("single_update: non-finite offset");
    SingleUpdate out{0.0, false, state};
    auto& next = out.state;
    const double predicted = state.gamma_hat * tau;
    if (std::abs(offset - predicted) > state.threshold) {
        out.flagged = true;
        out.u_theta = -predicted;
    } else {
        out.u_theta = -offset;
        next.phase_window.push_back(offset - state.applied);
        while (next.phase_window.size() > next.window_length) next.phase_window.pop_front();
        const std::vector<double> history(next.phase_window.begin(), next.phase_window.end());
        next.gamma_hat = estimate_frequency(history, tau).gamma_hat;
    }
    next.applied += out.u_theta;
    return out;
}

}  // namespace dsync
