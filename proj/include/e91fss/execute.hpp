#pragma once

/// Drives a configured run end to end: protocol execution or sweep, result
/// serialization, plot emission, and the stdout summary.
///
/// Exit codes: 0 success, 1 usage error, 2 runtime/statistics error,
/// 3 I/O error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "e91fss/analysis.hpp"
#include "e91fss/errors.hpp"
#include "e91fss/plot.hpp"
#include "e91fss/protocol.hpp"
#include "e91fss/results_io.hpp"
#include "e91fss/run_config.hpp"

namespace e91fss {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitIo = 3;

namespace exec_detail {

inline std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline RunMetadata metadata_for(const RunConfig& cfg) {
    RunMetadata meta;
    meta.mode = to_string(cfg.mode);
    meta.master_seed = cfg.seed;
    meta.n_events = cfg.n_events;
    meta.alpha_spec = cfg.alpha.spec;
    meta.beta_spec = cfg.beta.spec;
    meta.theta_spec = cfg.theta.spec;
    meta.allow_degenerate = cfg.allow_degenerate;
    return meta;
}

inline GridRecord record_for_single(const RunConfig& cfg, const RunStats& stats) {
    const ProtocolAngles angles(cfg.alpha.scalar(), cfg.beta.scalar());
    const Phase theta(cfg.theta.scalar());
    GridRecord rec;
    rec.alpha = cfg.alpha.scalar();
    rec.beta = cfg.beta.scalar();
    rec.theta = cfg.theta.scalar();
    rec.n_events = stats.n_events;
    rec.n_coincident = stats.n_coincident;
    rec.skr_sim = stats.skr;
    rec.skr_analytic = p_corr(angles, theta);
    rec.qber_sim = stats.qber;
    rec.cr_estimate = stats.cr_estimate;
    rec.cr_analytic = chsh_cr(angles, theta);
    rec.seed = cfg.seed;
    return rec;
}

inline int run(const RunConfig& cfg, std::ostream& out) {
    std::vector<GridRecord> records;
    std::optional<double> r2_skr, r2_cr;

    if (cfg.mode == Mode::single) {
        const ProtocolRun run = run_protocol(ProtocolAngles(cfg.alpha.scalar(), cfg.beta.scalar()),
                                             Phase(cfg.theta.scalar()), cfg.n_events, cfg.seed,
                                             cfg.allow_degenerate);
        records.push_back(record_for_single(cfg, run.stats));
        const GridRecord& rec = records.front();
        out << "SKR=" << fixed6(rec.skr_sim) << "\n";
        out << "QBER=" << fixed6(rec.qber_sim) << "\n";
        if (rec.cr_estimate)
            out << "CR=" << fixed6(*rec.cr_estimate) << "\n";
        else
            out << "CR=nan\n";
        out << "SECURITY_IDENTITY=" << (security_identity_check(run.stats) ? "pass" : "fail")
            << "\n";
    } else {
        const SweepResult sweep =
            run_sweep(cfg.alpha.values, cfg.beta.values, cfg.theta.values, cfg.n_events, cfg.seed,
                      cfg.allow_degenerate);
        records = sweep.grid;
        r2_skr = sweep.r_squared_skr;
        r2_cr = sweep.r_squared_cr;
        std::size_t flagged = 0;
        for (const auto& rec : records)
            if (rec.below_shannon()) ++flagged;
        out << "POINTS=" << records.size() << "\n";
        out << "R2_SKR=" << (r2_skr ? fixed6(*r2_skr) : "nan") << "\n";
        out << "R2_CR=" << (r2_cr ? fixed6(*r2_cr) : "nan") << "\n";
        out << "SHANNON_OK=" << flagged << "/" << records.size() << "\n";
    }

    write_results(records, r2_skr, r2_cr, cfg.format, cfg.output_path, metadata_for(cfg));
    if (cfg.emit_plot && cfg.mode != Mode::single) {
        const PlotKind kind = cfg.mode == Mode::sweep_chsh ? PlotKind::chsh : PlotKind::skr;
        write_plots(records, kind, cfg.output_path);
    }
    out << "WROTE=" << cfg.output_path << "\n";
    return kExitOk;
}

}  // namespace exec_detail

/// Execute a validated configuration; maps failures to exit codes and prints
/// diagnostics to stderr.
inline int execute(const RunConfig& cfg, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    try {
        return exec_detail::run(cfg, out);
    } catch (const IoError& e) {
        err << "e91fss: i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const UsageError& e) {
        err << "e91fss: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "e91fss: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace e91fss
