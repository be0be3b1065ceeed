#include "dsync/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "dsync/baselines.hpp"

namespace dsync {

std::vector<double> residual_time_error(std::span<const EpochRecord> records, std::size_t warmup) {
    std::vector<double> x;
    if (records.size() <= warmup) return x;
    x.reserve(records.size() - warmup);
    for (const auto& r : records.subspan(warmup)) x.push_back(r.true_theta + r.u_theta);
    return x;
}

FlagMatrix flag_matrix(std::span<const EpochRecord> records) {
    FlagMatrix m;
    m.epochs.reserve(records.size());
    m.flags.reserve(records.size());
    for (const auto& r : records) {
        m.epochs.push_back(r.epoch);
        std::vector<bool> row;
        row.reserve(r.verdicts.size());
        for (const auto& v : r.verdicts) row.push_back(v.flagged);
        m.flags.push_back(std::move(row));
    }
    return m;
}

namespace {

Verdict hard_verdict(std::size_t path, std::int64_t epoch, bool flagged) {
    return {path, epoch, flagged ? MassPair{1.0, 0.0} : MassPair{0.0, 1.0}, flagged};
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
    sc.validate();
    const auto started = std::chrono::steady_clock::now();

    RunResult res;
    res.scenario = sc;
    res.schedule = build_schedule(sc.events, sc.n_epochs, sc.n_paths);

    const bool single = sc.method == Method::Single;
    const std::size_t monitored = single ? 1 : sc.n_paths;
    NoiseConfig noise = sc.noise;
    noise.sigma_d.resize(monitored);
    noise.sigma_m.resize(monitored);
    const double tau = noise.tau;

    std::optional<CalibrationSet> calibs;
    if (is_evidence_method(sc.method)) calibs = CalibrationSet::from_noise(noise, sc.calibration);

    SingleDetectorState single_state;
    if (single) {
        single_state.threshold = CalibrationSet::from_noise(noise, sc.calibration).self(0).threshold;
        single_state.window_length = sc.window;
    }

    FrequencyTracker tracker(sc.window, tau);
    std::vector<std::size_t> quarantine_left(monitored, 0);
    std::vector<double> offsets(monitored);

    ClockState clock = sc.initial;
    double u_prev = 0.0;
    res.records.reserve(static_cast<std::size_t>(sc.n_epochs));

    for (std::int64_t n = 0; n < sc.n_epochs; ++n) {
        const double jump = res.schedule.jump_at(n);
        if (n == 0) {
            clock.theta += jump;
        } else {
            NoiseStream rng(sc.seed, StreamKind::clock, 0, n);
            clock = step_clock(clock, u_prev, noise, rng, jump);
        }

        EpochRecord rec;
        rec.epoch = n;
        rec.true_theta = clock.theta;
        rec.method = sc.method;
        rec.observations.reserve(monitored);
        for (std::size_t p = 0; p < monitored; ++p) {
            NoiseStream rng(sc.seed, StreamKind::path, p, n);
            rec.observations.push_back(observe_path(clock.theta, p, n, noise, res.schedule, rng));
            offsets[p] = rec.observations.back().measured_offset;
        }

        switch (sc.method) {
            case Method::DS0:
            case Method::DS1:
            case Method::DS2: {
                const double gamma_hat = tracker.estimate().gamma_hat;
                rec.verdicts = classify_paths(offsets, *calibs, gamma_hat, tau, variant_of(sc.method), n);
                auto excluded = rec.verdicts;
                for (std::size_t p = 0; p < monitored; ++p) {
                    if (quarantine_left[p] > 0) excluded[p].flagged = true;
                    if (rec.verdicts[p].flagged)
                        quarantine_left[p] = sc.quarantine;
                    else if (quarantine_left[p] > 0)
                        --quarantine_left[p];
                }
                rec.u_theta = compute_update(offsets, excluded, gamma_hat, tau);
                double sum = 0.0;
                std::size_t used = 0;
                for (std::size_t p = 0; p < monitored; ++p) {
                    if (excluded[p].flagged) continue;
                    sum += offsets[p];
                    ++used;
                }
                tracker.push(used ? sum / static_cast<double>(used) : 0.0, used > 0, rec.u_theta);
                break;
            }
            case Method::FTA: {
                rec.u_theta = fta_update(offsets);
                const auto [lo, hi] = fta_excluded(offsets);
                for (std::size_t p = 0; p < monitored; ++p)
                    rec.verdicts.push_back(hard_verdict(p, n, p == lo || p == hi));
                break;
            }
            case Method::Single: {
                auto upd = single_update(offsets[0], single_state, tau);
                single_state = std::move(upd.state);
                rec.u_theta = upd.u_theta;
                rec.verdicts.push_back(hard_verdict(0, n, upd.flagged));
                break;
            }
        }

        const bool any_flag = std::any_of(rec.verdicts.begin(), rec.verdicts.end(),
                                          [](const Verdict& v) { return v.flagged; });
        const bool all_flag = std::all_of(rec.verdicts.begin(), rec.verdicts.end(),
                                          [](const Verdict& v) { return v.flagged; });
        if (any_flag) ++res.summary.flagged_epochs;
        if (all_flag) ++res.summary.holdover_epochs;
        if (any_flag && jump != 0.0) ++res.summary.jump_epochs_flagged;

        u_prev = rec.u_theta;
        res.records.push_back(std::move(rec));
    }

    res.summary.warmup = std::min<std::size_t>(sc.window, res.records.size());
    res.summary.monitored_paths = monitored;
    const auto x = residual_time_error(res.records, res.summary.warmup);
    res.tdev = tdev_curve(x, tau);
    res.scores = precision_recall(flag_matrix(res.records), res.schedule, monitored);
    res.summary.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

std::vector<SweepCell> run_sweep(const std::vector<std::string>& presets, const std::vector<Method>& methods,
                                 std::size_t n_seeds, std::size_t threads, bool keep_records) {
    std::vector<SweepCell> cells;
    for (const auto& p : presets)
        for (auto m : methods)
            for (std::uint64_t s = 1; s <= n_seeds; ++s) cells.push_back({p, m, s, {}});

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(cells.size(), 1));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            try {
                Scenario sc = preset(cells[k].preset);
                sc.method = cells[k].method;
                sc.seed = cells[k].seed;
                cells[k].result = run_scenario(sc);
                if (!keep_records) cells[k].result.records.clear();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return cells;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::nan("");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
}

std::vector<SweepRow> summarize(const std::vector<SweepCell>& cells) {
    std::vector<SweepRow> rows;
    std::map<std::pair<std::string, Method>, std::size_t> index;
    std::vector<std::array<std::vector<double>, 3>> tdevs;
    for (const auto& c : cells) {
        auto key = std::pair{c.preset, c.method};
        auto [it, inserted] = index.try_emplace(key, rows.size());
        if (inserted) {
            rows.push_back({c.preset, c.method});
            tdevs.emplace_back();
        }
        auto& row = rows[it->second];
        auto& t = tdevs[it->second];
        t[0].push_back(c.result.tdev.at_factor(1));
        t[1].push_back(c.result.tdev.at_factor(10));
        t[2].push_back(c.result.tdev.at_factor(100));
        double p = 0.0, r = 0.0;
        for (const auto& s : c.result.scores) p += s.precision, r += s.recall;
        const double n = std::max<double>(1.0, static_cast<double>(c.result.scores.size()));
        row.mean_precision += p / n;
        row.mean_recall += r / n;
        ++row.runs;
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto& row = rows[k];
        row.median_tdev_1 = median(tdevs[k][0]);
        row.median_tdev_10 = median(tdevs[k][1]);
        row.median_tdev_100 = median(tdevs[k][2]);
        row.mean_precision /= static_cast<double>(row.runs);
        row.mean_recall /= static_cast<double>(row.runs);
    }
    return rows;
}

}  // namespace dsync
