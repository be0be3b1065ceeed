// CSV, summary and plot-data output, plus CSV read-back for `report`.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsync/runner.hpp"

namespace dsync {

enum class EmitFormat { csv, summary, plotdata };

EmitFormat parse_emit_format(std::string_view name);

/// Columns: epoch, true_theta_ps, theta_m_1_ps..theta_m_N_ps, flag_1..flag_N,
/// u_theta_ps, attack_1_ps..attack_N_ps. Picoseconds with three decimals.
/// The trailing attack columns carry the injected attack truth so metrics
/// can be rebuilt from the file alone.
void write_csv(std::ostream& out, std::span<const EpochRecord> records, std::size_t n_paths);
void write_csv(std::ostream& out, const RunResult& run);

struct RunMetrics {
    TdevCurve tdev;
    std::vector<PathScore> scores;
};

/// TDEV of theta + u after `warmup` epochs and per-path precision/recall.
RunMetrics compute_metrics(std::span<const EpochRecord> records, const EventSchedule& schedule,
                           std::size_t n_paths, double tau, std::size_t warmup);

struct CsvRun {
    std::size_t n_paths = 0;
    std::vector<EpochRecord> records;
    EventSchedule schedule;  // rebuilt from the attack columns, one event per (path, epoch)
};

/// Throws std::runtime_error naming the line on malformed input.
CsvRun parse_csv(std::istream& in);

std::string format_summary(std::string_view title, std::span<const PathScore> scores, const TdevCurve& tdev,
                           std::size_t warmup);
std::string format_summary(const RunResult& run);

struct LabeledCurve {
    std::string label;
    TdevCurve curve;
};

/// `label,tau_s,tdev_ps` rows.
void write_plotdata(std::ostream& out, std::span<const LabeledCurve> curves);

/// Writes `<dir>/<stem>.csv`, `.summary.txt` or `.plotdata.csv`. Throws
/// IoError with the path on failure. Returns the written path.
std::filesystem::path emit(const RunResult& run, EmitFormat format, const std::filesystem::path& dir,
                           const std::string& stem);

std::string format_sweep_table(std::span<const SweepRow> rows);

}  // namespace dsync
