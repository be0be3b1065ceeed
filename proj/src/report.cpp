#include "dsync/report.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dsync {

EmitFormat parse_emit_format(std::string_view name) {
    if (name == "csv") return EmitFormat::csv;
    if (name == "summary") return EmitFormat::summary;
    if (name == "plotdata") return EmitFormat::plotdata;
    throw std::invalid_argument("unknown output format '" + std::string(name) + "'");
}

namespace {

void put_ps(std::string& line, double seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.3f", seconds / kPicosecond);
    line += buf;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const EpochRecord> records, std::size_t n_paths) {
    std::string line = "epoch,true_theta_ps";
    for (std::size_t p = 1; p <= n_paths; ++p) line += ",theta_m_" + std::to_string(p) + "_ps";
    for (std::size_t p = 1; p <= n_paths; ++p) line += ",flag_" + std::to_string(p);
    line += ",u_theta_ps";
    for (std::size_t p = 1; p <= n_paths; ++p) line += ",attack_" + std::to_string(p) + "_ps";
    out << line << '\n';
    for (const auto& r : records) {
        if (r.observations.size() != n_paths || r.verdicts.size() != n_paths)
            throw std::invalid_argument("write_csv: record at epoch " + std::to_string(r.epoch) +
                                        " has the wrong number of paths");
        line = std::to_string(r.epoch);
        put_ps(line, r.true_theta);
        for (const auto& o : r.observations) put_ps(line, o.measured_offset);
        for (const auto& v : r.verdicts) line += v.flagged ? ",1" : ",0";
        put_ps(line, r.u_theta);
        for (const auto& o : r.observations) put_ps(line, o.attack_truth);
        out << line << '\n';
    }
}

void write_csv(std::ostream& out, const RunResult& run) {
    write_csv(out, run.records, run.summary.monitored_paths);
}

RunMetrics compute_metrics(std::span<const EpochRecord> records, const EventSchedule& schedule,
                           std::size_t n_paths, double tau, std::size_t warmup) {
    RunMetrics m;
    const auto x = residual_time_error(records, warmup);
    m.tdev = tdev_curve(x, tau);
    m.scores = precision_recall(flag_matrix(records), schedule, n_paths);
    return m;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

}  // namespace

CsvRun parse_csv(std::istream& in) {
    CsvRun run;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("line 1: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "epoch" || header[1] != "true_theta_ps")
        throw std::runtime_error("line 1: not a run CSV header");
    for (std::size_t k = 2; k < header.size() && header[k].rfind("theta_m_", 0) == 0; ++k) ++run.n_paths;
    const std::size_t n = run.n_paths;
    const bool has_attacks = header.size() == 3 + 3 * n;
    if (n == 0 || (header.size() != 3 + 2 * n && !has_attacks))
        throw std::runtime_error("line 1: unexpected column count " + std::to_string(header.size()));

    std::vector<AttackEvent> attacks;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
        EpochRecord r;
        r.epoch = static_cast<std::int64_t>(parse_double(cells[0], line_no));
        r.true_theta = parse_double(cells[1], line_no) * kPicosecond;
        for (std::size_t p = 0; p < n; ++p) {
            PathObservation o;
            o.path_id = p;
            o.epoch = r.epoch;
            o.measured_offset = parse_double(cells[2 + p], line_no) * kPicosecond;
            if (has_attacks) o.attack_truth = parse_double(cells[3 + 2 * n + p], line_no) * kPicosecond;
            if (o.attack_truth != 0.0) attacks.push_back({p, r.epoch, o.attack_truth, 1});
            r.observations.push_back(o);
            const auto& f = cells[2 + n + p];
            if (f != "0" && f != "1")
                throw std::runtime_error("line " + std::to_string(line_no) + ": flag must be 0 or 1");
            Verdict v;
            v.path_id = p;
            v.epoch = r.epoch;
            v.flagged = f == "1";
            v.fused = v.flagged ? MassPair{1.0, 0.0} : MassPair{0.0, 1.0};
            r.verdicts.push_back(v);
        }
        r.u_theta = parse_double(cells[2 + 2 * n], line_no) * kPicosecond;
        run.records.push_back(std::move(r));
    }
    run.schedule = EventSchedule(std::move(attacks), {});
    return run;
}

std::string format_summary(std::string_view title, std::span<const PathScore> scores, const TdevCurve& tdev,
                           std::size_t warmup) {
    std::ostringstream out;
    char buf[160];
    out << title << '\n';
    out << "path      TP      FP      FN  precision   recall\n";
    for (std::size_t p = 0; p < scores.size(); ++p) {
        const auto& s = scores[p];
        std::snprintf(buf, sizeof buf, "%4zu  %6zu  %6zu  %6zu  %8.1f%%  %6.1f%%\n", p + 1, s.counts.tp,
                      s.counts.fp, s.counts.fn, 100 * s.precision, 100 * s.recall);
        out << buf;
    }
    out << "TDEV of theta + u (first " << warmup << " epochs excluded)\n";
    out << "   tau_s     tdev_ps\n";
    for (std::size_t n : {1u, 10u, 100u}) {
        const double v = tdev.at_factor(n);
        if (v < 0) {
            std::snprintf(buf, sizeof buf, "%8g  %10s\n", static_cast<double>(n) * tdev.tau0, "n/a");
        } else {
            std::snprintf(buf, sizeof buf, "%8g  %10.3f\n", static_cast<double>(n) * tdev.tau0, v / kPicosecond);
        }
        out << buf;
    }
    return out.str();
}

std::string format_summary(const RunResult& run) {
    const auto& sc = run.scenario;
    std::ostringstream title;
    title << "scenario " << sc.name << "  method " << to_string(sc.method) << "  seed " << sc.seed << "  paths "
          << run.summary.monitored_paths << "  epochs " << run.records.size();
    std::string out = format_summary(title.str(), run.scores, run.tdev, run.summary.warmup);
    out += "flagged epochs " + std::to_string(run.summary.flagged_epochs) + ", holdover epochs " +
           std::to_string(run.summary.holdover_epochs) + ", jump epochs flagged " +
           std::to_string(run.summary.jump_epochs_flagged) + "\n";
    return out;
}

void write_plotdata(std::ostream& out, std::span<const LabeledCurve> curves) {
    out << "label,tau_s,tdev_ps\n";
    char buf[128];
    for (const auto& c : curves) {
        for (const auto& p : c.curve.points) {
            std::snprintf(buf, sizeof buf, ",%.9g,%.6f\n", p.tau, p.tdev / kPicosecond);
            out << c.label << buf;
        }
    }
}

std::filesystem::path emit(const RunResult& run, EmitFormat format, const std::filesystem::path& dir,
                           const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    std::filesystem::path file = dir / stem;
    switch (format) {
        case EmitFormat::csv: file += ".csv"; break;
        case EmitFormat::summary: file += ".summary.txt"; break;
        case EmitFormat::plotdata: file += ".plotdata.csv"; break;
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
    switch (format) {
        case EmitFormat::csv: write_csv(out, run); break;
        case EmitFormat::summary: out << format_summary(run); break;
        case EmitFormat::plotdata: {
            const LabeledCurve c{std::string(to_string(run.scenario.method)), run.tdev};
            write_plotdata(out, std::span(&c, 1));
            break;
        }
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + file.string() + "'");
    return file;
}

std::string format_sweep_table(std::span<const SweepRow> rows) {
    std::ostringstream out;
    char buf[200];
    out << "preset  method  runs  tdev@1s_ps  tdev@10s_ps  tdev@100s_ps  precision   recall\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-6s  %-6s  %4zu  %10.3f  %11.3f  %12.3f  %8.1f%%  %6.1f%%\n",
                      r.preset.c_str(), std::string(to_string(r.method)).c_str(), r.runs,
                      r.median_tdev_1 / kPicosecond, r.median_tdev_10 / kPicosecond,
                      r.median_tdev_100 / kPicosecond, 100 * r.mean_precision, 100 * r.mean_recall);
        out << buf;
    }
    return out.str();
}

}  // namespace dsync
