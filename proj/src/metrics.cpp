#include "dsync/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsync {

double tdev(std::span<const double> x, std::size_t n) {
    if (n == 0) throw std::invalid_argument("tdev: averaging factor must be >= 1");
    const std::size_t len = x.size();
    if (len < 3 * n + 1)
        throw std::invalid_argument("tdev: need at least 3n+1 = " + std::to_string(3 * n + 1) +
                                    " samples, got " + std::to_string(len));
    std::vector<double> d(len - 2 * n);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i + 2 * n] - 2 * x[i + n] + x[i];

    const std::size_t windows = len - 3 * n + 1;
    constexpr std::size_t kResync = 256;  // bounds rounding drift of the rolling sum
    double window = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < windows; ++j) {
        if (j % kResync == 0) {
            window = 0.0;
            for (std::size_t i = j; i < j + n; ++i) window += d[i];
        } else {
            window += d[j + n - 1] - d[j - 1];
        }
        total += window * window;
    }
    const double nn = static_cast<double>(n);
    return std::sqrt(total / (6.0 * nn * nn * static_cast<double>(windows)));
}

double TdevCurve::at_factor(std::size_t n) const {
    const double target = static_cast<double>(n) * tau0;
    for (const auto& p : points)
        if (std::abs(p.tau - target) <= 1e-9 * target) return p.tdev;
    return -1.0;
}

std::vector<std::size_t> default_ladder(std::size_t n_samples) {
    std::vector<std::size_t> out;
    if (n_samples < 4) return out;
    const std::size_t max_n = (n_samples - 1) / 3;
    for (std::size_t decade = 1;; decade *= 10) {
        for (std::size_t m : {1u, 2u, 5u}) {
            const std::size_t n = m * decade;
            if (n > max_n) return out;
            out.push_back(n);
        }
    }
}

TdevCurve tdev_curve(std::span<const double> x, double tau0, std::span<const std::size_t> factors) {
    TdevCurve curve;
    curve.tau0 = tau0;
    for (auto n : factors) curve.points.push_back({static_cast<double>(n) * tau0, tdev(x, n)});
    return curve;
}

TdevCurve tdev_curve(std::span<const double> x, double tau0) {
    const auto ladder = default_ladder(x.size());
    return tdev_curve(x, tau0, ladder);
}

std::vector<PathScore> precision_recall(const FlagMatrix& verdicts, const EventSchedule& schedule,
                                        std::size_t n_paths) {
    if (verdicts.epochs.size() != verdicts.flags.size())
        throw std::invalid_argument("precision_recall: epochs and flag rows differ in length");
    std::vector<PathScore> scores(n_paths);
    for (std::size_t row = 0; row < verdicts.epochs.size(); ++row) {
        const auto& flags = verdicts.flags[row];
        if (flags.size() != n_paths)
            throw std::invalid_argument("precision_recall: flag row has wrong path count");
        for (std::size_t p = 0; p < n_paths; ++p) {
            const bool attacked = schedule.attack_at(p, verdicts.epochs[row]) != 0.0;
            auto& c = scores[p].counts;
            if (flags[p]) {
                ++(attacked ? c.tp : c.fp);
            } else if (attacked) {
                ++c.fn;
            }
        }
    }
    for (auto& s : scores) {
        const auto& c = s.counts;
        s.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
        s.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    return scores;
}

}  // namespace dsync
