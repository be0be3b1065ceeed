// Time deviation and per-path detection scoring.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsync/clocksim.hpp"

namespace dsync {

/// TDEV(n * tau0) of the time-error sequence x:
///
///   sqrt( 1 / (6 n^2 (N - 3n + 1)) * sum_{j=0}^{N-3n} [ sum_{i=j}^{j+n-1} (x[i+2n] - 2x[i+n] + x[i]) ]^2 )
///
/// The inner window sum is updated incrementally, so the cost is O(N) per n.
/// Throws std::invalid_argument if n == 0 or N < 3n + 1.
double tdev(std::span<const double> x, std::size_t n);

struct TdevPoint {
    double tau = 0.0;   // s
    double tdev = 0.0;  // s
};

struct TdevCurve {
    double tau0 = 1.0;
    std::vector<TdevPoint> points;

    /// TDEV at averaging factor n, or a negative value if not on the curve.
    double at_factor(std::size_t n) const;
};

/// 1, 2, 5, 10, 20, 50, ... up to floor((n_samples - 1) / 3).
std::vector<std::size_t> default_ladder(std::size_t n_samples);

TdevCurve tdev_curve(std::span<const double> x, double tau0, std::span<const std::size_t> factors);
TdevCurve tdev_curve(std::span<const double> x, double tau0);

struct DetectionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct PathScore {
    DetectionCounts counts;
    double precision = 1.0;
    double recall = 1.0;
};

/// One flag per (path, epoch). Rows are epochs, `flags[e][p]` is path p's
/// flag; `epochs[e]` is the epoch number of row e.
struct FlagMatrix {
    std::vector<std::int64_t> epochs;
    std::vector<std::vector<bool>> flags;
};

/// An epoch-flag is TP when an attack is active on (path, epoch), else FP.
/// Active attacks without a flag are FN. Precision is 1 when nothing was
/// flagged, recall is 1 when nothing was attacked.
std::vector<PathScore> precision_recall(const FlagMatrix& verdicts, const EventSchedule& schedule,
                                        std::size_t n_paths);

}  // namespace dsync
