// End-to-end epoch loop and multi-run sweeps.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsync/clocksim.hpp"
#include "dsync/fusion.hpp"
#include "dsync/metrics.hpp"
#include "dsync/scenario.hpp"

namespace dsync {

struct EpochRecord {
    std::int64_t epoch = 0;
    double true_theta = 0.0;  // s, before this epoch's correction
    std::vector<PathObservation> observations;
    std::vector<Verdict> verdicts;
    double u_theta = 0.0;     // s, correction computed at this epoch
    Method method = Method::DS2;
};

struct RunSummary {
    std::size_t warmup = 0;
    std::size_t monitored_paths = 0;
    std::size_t flagged_epochs = 0;       // epochs with at least one flag
    std::size_t jump_epochs_flagged = 0;  // jump epochs with at least one flag
    std::size_t holdover_epochs = 0;      // epochs with every path flagged
    double elapsed_seconds = 0.0;
};

struct RunResult {
    Scenario scenario;
    EventSchedule schedule;
    std::vector<EpochRecord> records;
    TdevCurve tdev;
    std::vector<PathScore> scores;
    RunSummary summary;
};

/// Time error left on the slave clock after each epoch's correction,
/// theta + u_theta, skipping the first `warmup` records.
std::vector<double> residual_time_error(std::span<const EpochRecord> records, std::size_t warmup);

FlagMatrix flag_matrix(std::span<const EpochRecord> records);

/// Runs one scenario. Single monitors path 1 only, so its records carry a
/// single observation. Throws ScenarioError for invalid scenarios.
RunResult run_scenario(const Scenario& scenario);

struct SweepCell {
    std::string preset;
    Method method = Method::DS2;
    std::uint64_t seed = 0;
    RunResult result;
};

struct SweepRow {
    std::string preset;
    Method method = Method::DS2;
    std::size_t runs = 0;
    double median_tdev_1 = 0.0;   // s
    double median_tdev_10 = 0.0;
    double median_tdev_100 = 0.0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
};

/// Runs every preset x method x seed (seeds 1..n_seeds) on up to `threads`
/// workers (0 = hardware concurrency). Results come back in input order.
std::vector<SweepCell> run_sweep(const std::vector<std::string>& presets, const std::vector<Method>& methods,
                                 std::size_t n_seeds, std::size_t threads = 0, bool keep_records = false);

/// Median TDEV and mean precision/recall per (preset, method).
std::vector<SweepRow> summarize(const std::vector<SweepCell>& cells);

double median(std::vector<double> values);

}  // namespace dsync
