#pragma once

/// Statistical comparison of Monte-Carlo results against the closed forms:
/// coefficient of determination, binomial tolerance bands, and deterministic
/// sweep grids over (alpha, beta, theta).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "e91fss/analytic.hpp"
#include "e91fss/protocol.hpp"
#include "e91fss/rng.hpp"

namespace e91fss {

/// QBER above this value is outside the acceptable regime for key distillation.
inline constexpr double kShannonQberLimit = 0.11;

/// Coefficient of determination 1 - SS_res/SS_tot, with SS_tot taken about
/// the mean of the observed sequence. At most 1; unbounded below.
inline double r_squared(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size())
        throw std::invalid_argument("r_squared: sequence lengths differ");
    if (observed.size() < 2)
        throw std::invalid_argument("r_squared: need at least 2 points");

    double mean = 0.0;
    for (double v : observed) mean += v;
    mean /= static_cast<double>(observed.size());

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double r = observed[i] - predicted[i];
        const double d = observed[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0)
        throw std::invalid_argument("r_squared: observed sequence has zero variance");
    return 1.0 - ss_res / ss_tot;
}

struct Interval {
    double low;
    double high;
};

/// Normal-approximation binomial interval p_hat +- z*sqrt(p_hat(1-p_hat)/n),
/// clamped to [0, 1].
inline Interval binomial_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials < 1) throw std::invalid_argument("binomial_interval: trials must be >= 1");
    if (successes > trials)
        throw std::invalid_argument("binomial_interval: successes exceed trials");
    if (!(z > 0.0)) throw std::invalid_argument("binomial_interval: z must be positive");
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    const double half = z * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

/// One grid point of a sweep: simulated statistics next to the analytic
/// values recomputable from (alpha, beta, theta) alone.
struct GridRecord {
    double alpha = 0.0;
    double beta = 0.0;
    double theta = 0.0;
    std::size_t n_events = 0;
    std::size_t n_coincident = 0;
    double skr_sim = 0.0;
    double skr_analytic = 0.0;
    double qber_sim = 0.0;
    std::optional<double> cr_estimate;
    double cr_analytic = 0.0;
    std::uint64_t seed = 0;

    bool below_shannon() const { return qber_sim < kShannonQberLimit; }
};

/// Sweep grid with agreement metrics. r_squared fields are absent when fewer
/// than two usable points exist or the observed column is constant.
struct SweepResult {
    std::vector<GridRecord> grid;
    std::optional<double> r_squared_skr;
    std::optional<double> r_squared_cr;
};

/// Seed for grid point (i, j, k), derived only from the master seed and the
/// point's coordinates so any execution schedule produces identical results.
inline std::uint64_t grid_point_seed(std::uint64_t master, std::size_t i, std::size_t j,
                                     std::size_t k) {
    return derive_seed(derive_seed(derive_seed(master, i), j + 0x100), k + 0x10000);
}

namespace detail {

inline std::optional<double> try_r_squared(const std::vector<double>& observed,
                                           const std::vector<double>& predicted) {
    try {
        return r_squared(observed, predicted);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Run the protocol at every (alpha, beta, theta) grid point and compare
/// against the closed forms. Points where the CHSH estimator lacks events in
/// some pair record an absent estimate and drop out of the CR comparison.
/// Record order is row-major: alpha outermost, theta innermost.
inline SweepResult run_sweep(const std::vector<double>& alpha_values,
                             const std::vector<double>& beta_values,
                             const std::vector<double>& theta_values, std::size_t n_events,
                             std::uint64_t master_seed, bool allow_degenerate = false) {
    if (alpha_values.empty() || beta_values.empty() || theta_values.empty())
        throw std::invalid_argument("run_sweep: empty grid axis");
    if (n_events < 1) throw std::invalid_argument("run_sweep: n_events must be >= 1");

    SweepResult result;
    result.grid.reserve(alpha_values.size() * beta_values.size() * theta_values.size());

    std::vector<double> skr_obs, skr_pred, cr_obs, cr_pred;
    for (std::size_t i = 0; i < alpha_values.size(); ++i) {
        for (std::size_t j = 0; j < beta_values.size(); ++j) {
            for (std::size_t k = 0; k < theta_values.size(); ++k) {
                const ProtocolAngles angles(alpha_values[i], beta_values[j]);
                const Phase theta(theta_values[k]);
                const std::uint64_t seed = grid_point_seed(master_seed, i, j, k);
                const auto point_context = [&](const char* what) {
                    return std::string(what) + " [grid point alpha=" +
                           std::to_string(alpha_values[i]) + " beta=" +
                           std::to_string(beta_values[j]) + " theta=" +
                           std::to_string(theta_values[k]) + "]";
                };
                ProtocolRun run;
                try {
                    run = run_protocol(angles, theta, n_events, seed, allow_degenerate);
                } catch (const DegenerateAnglesError& e) {
                    throw DegenerateAnglesError(point_context(e.what()));
                } catch (const NoCoincidentEventsError& e) {
                    throw NoCoincidentEventsError(point_context(e.what()));
                }

                GridRecord rec;
                rec.alpha = alpha_values[i];
                rec.beta = beta_values[j];
                rec.theta = theta_values[k];
                rec.n_events = run.stats.n_events;
                rec.n_coincident = run.stats.n_coincident;
                rec.skr_sim = run.stats.skr;
                rec.skr_analytic = p_corr(angles, theta);
                rec.qber_sim = run.stats.qber;
                rec.cr_estimate = run.stats.cr_estimate;
                rec.cr_analytic = chsh_cr(angles, theta);
                rec.seed = seed;
                result.grid.push_back(rec);

                skr_obs.push_back(rec.skr_sim);
                skr_pred.push_back(rec.skr_analytic);
                if (rec.cr_estimate) {
                    cr_obs.push_back(std::abs(*rec.cr_estimate));
                    cr_pred.push_back(std::abs(rec.cr_analytic));
                }
            }
        }
    }

    result.r_squared_skr = detail::try_r_squared(skr_obs, skr_pred);
    result.r_squared_cr = detail::try_r_squared(cr_obs, cr_pred);
    return result;
}

}  // namespace e91fss
