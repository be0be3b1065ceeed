// dsync: run, inspect and compare secure multi-path clock combination runs.
//
// Exit codes: 0 success, 1 usage error, 2 invalid scenario, 3 I/O error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsync/evidence.hpp"
#include "dsync/report.hpp"
#include "dsync/runner.hpp"
#include "dsync/scenario.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kInvalidScenario = 2;
constexpr int kIo = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

int cmd_run(const std::string& file, const std::optional<std::uint64_t>& seed, const std::string& method,
            const std::string& out_dir, const std::vector<std::string>& formats) {
    auto sc = dsync::load_scenario(file);
    if (seed) sc.seed = *seed;
    if (!method.empty()) {
        try {
            sc.method = dsync::parse_method(method);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    const auto run = dsync::run_scenario(sc);
    const std::string stem = sc.name + "_" + std::string(dsync::to_string(sc.method)) + "_s" + std::to_string(sc.seed);
    for (const auto& f : split_list(formats)) {
        dsync::EmitFormat fmt;
        try {
            fmt = dsync::parse_emit_format(f);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const auto path = dsync::emit(run, fmt, out_dir, stem);
        std::cerr << "wrote " << path.string() << '\n';
    }
    std::cout << dsync::format_summary(run);
    return 0;
}

int cmd_preset(const std::string& name) {
    dsync::Scenario sc;
    try {
        sc = dsync::preset(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::cout << dsync::to_json(sc).dump(2) << '\n';
    return 0;
}

int cmd_calibrate(double sigma_ps, double pf, double pm, double k_max, double k_min, double log_odds,
                  bool two_sided) {
    dsync::CalibrationOptions opt;
    opt.p_false_alarm = pf;
    opt.p_miss = pm;
    opt.k_max = k_max;
    opt.k_min = k_min;
    opt.steepness_log_odds = log_odds;
    opt.two_sided = two_sided;
    dsync::Calibration c;
    try {
        c = dsync::calibrate(sigma_ps * dsync::kPicosecond, opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::printf("sigma_ps = %.6f\n", sigma_ps);
    std::printf("T_ps     = %.6f\n", c.threshold / dsync::kPicosecond);
    std::printf("L_ps     = %.6f\n", c.min_detectable / dsync::kPicosecond);
    std::printf("B_ps     = %.6f\n", c.midpoint / dsync::kPicosecond);
    std::printf("A_per_ps = %.9g\n", c.steepness * dsync::kPicosecond);
    return 0;
}

int cmd_report(const std::vector<std::string>& files, double tau, std::size_t warmup, const std::string& plotdata) {
    std::vector<dsync::LabeledCurve> curves;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw dsync::IoError("cannot open '" + f + "'");
        dsync::CsvRun run;
        try {
            run = dsync::parse_csv(in);
        } catch (const std::runtime_error& e) {
            throw dsync::IoError(f + ": " + e.what());
        }
        const auto m = dsync::compute_metrics(run.records, run.schedule, run.n_paths, tau,
                                              std::min(warmup, run.records.size()));
        const std::string label = std::filesystem::path(f).stem().string();
        std::cout << dsync::format_summary(label + "  (" + std::to_string(run.records.size()) + " epochs)", m.scores,
                                           m.tdev, std::min(warmup, run.records.size()))
                  << '\n';
        curves.push_back({label, m.tdev});
    }
    if (plotdata.empty() || plotdata == "-") {
        dsync::write_plotdata(std::cout, curves);
    } else {
        std::ofstream out(plotdata, std::ios::binary);
        if (!out) throw dsync::IoError("cannot open '" + plotdata + "' for writing");
        dsync::write_plotdata(out, curves);
        if (!out) throw dsync::IoError("write failed for '" + plotdata + "'");
    }
    return 0;
}

int cmd_sweep(const std::vector<std::string>& presets_in, std::size_t seeds, const std::vector<std::string>& methods_in,
              std::size_t threads) {
    auto presets = split_list(presets_in);
    if (presets.size() == 1 && presets[0] == "all") presets = dsync::preset_names();
    std::vector<dsync::Method> methods;
    try {
        for (const auto& p : presets) (void)dsync::preset(p);
        for (const auto& m : split_list(methods_in)) methods.push_back(dsync::parse_method(m));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (seeds == 0 || methods.empty()) throw UsageError("sweep needs at least one seed and one method");
    const auto cells = dsync::run_sweep(presets, methods, seeds, threads);
    std::cout << dsync::format_sweep_table(dsync::summarize(cells));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure combination of untrusted multi-path time offsets (DS0/DS1/DS2, FTA, Single)"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario file");
    std::string run_file, run_method, run_out = ".";
    std::optional<std::uint64_t> run_seed;
    std::vector<std::string> run_formats{"csv", "summary", "plotdata"};
    run->add_option("scenario", run_file, "Scenario JSON file")->required();
    run->add_option("--seed", run_seed, "Override the scenario seed");
    run->add_option("--method", run_method, "Override the method (DS0, DS1, DS2, FTA, Single)");
    run->add_option("--out", run_out, "Output directory")->capture_default_str();
    run->add_option("--format", run_formats, "Outputs to write: csv, summary, plotdata")->delimiter(',');

    auto* pre = app.add_subcommand("preset", "Print a built-in scenario as JSON");
    std::string preset_name;
    pre->add_option("name", preset_name, "fig3, fig4, fig5a, fig5b, fig5c, fig5d, exp3")->required();

    auto* cal = app.add_subcommand("calibrate", "Print T, L, B and A for a Gaussian null residual");
    double sigma_ps = 0, pf = dsync::CalibrationOptions{}.p_false_alarm, pm = dsync::CalibrationOptions{}.p_miss, k_max = dsync::CalibrationOptions{}.k_max,
           k_min = dsync::CalibrationOptions{}.k_min, log_odds = std::log(99.0);
    bool two_sided = false;
    cal->add_option("--sigma", sigma_ps, "Residual standard deviation (ps)")->required();
    cal->add_option("--pf", pf, "Allowed false alarm rate")->capture_default_str();
    cal->add_option("--pm", pm, "Allowed missed detection rate")->capture_default_str();
    cal->add_option("--kmax", k_max)->capture_default_str();
    cal->add_option("--kmin", k_min)->capture_default_str();
    cal->add_option("--steepness", log_odds, "Sigmoid log-odds at zero residual (A*B)")->capture_default_str();
    cal->add_flag("--two-sided", two_sided, "Split p_F over both tails");

    auto* rep = app.add_subcommand("report", "Summaries and TDEV plot data from run CSVs");
    std::vector<std::string> rep_files;
    double rep_tau = 1.0;
    std::size_t rep_warmup = 30;
    std::string rep_plot;
    rep->add_option("csv", rep_files, "Run CSV files")->required();
    rep->add_option("--tau", rep_tau, "Epoch interval (s)")->capture_default_str();
    rep->add_option("--warmup", rep_warmup, "Epochs excluded from TDEV")->capture_default_str();
    rep->add_option("--plotdata", rep_plot, "Plot data file (default stdout)");

    auto* sw = app.add_subcommand("sweep", "Compare methods over several seeds");
    std::vector<std::string> sw_presets;
    std::vector<std::string> sw_methods{"DS2", "FTA", "Single"};
    std::size_t sw_seeds = 5, sw_threads = 0;
    sw->add_option("--preset", sw_presets, "Preset name(s) or 'all'")->required()->delimiter(',');
    sw->add_option("--seeds", sw_seeds, "Seeds 1..K")->capture_default_str();
    sw->add_option("--methods", sw_methods, "Methods to compare")->delimiter(',');
    sw->add_option("--threads", sw_threads, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) return cmd_run(run_file, run_seed, run_method, run_out, run_formats);
        if (*pre) return cmd_preset(preset_name);
        if (*cal) return cmd_calibrate(sigma_ps, pf, pm, k_max, k_min, log_odds, two_sided);
        if (*rep) return cmd_report(rep_files, rep_tau, rep_warmup, rep_plot);
        if (*sw) return cmd_sweep(sw_presets, sw_seeds, sw_methods, sw_threads);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const dsync::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidScenario;
    } catch (const dsync::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidScenario;
    }
    return kUsage;
}
