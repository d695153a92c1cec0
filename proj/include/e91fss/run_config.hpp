#pragma once

/// Run configuration and command-line parsing. Angles are accepted in
/// radians or as rational multiples of pi ("pi/8", "3pi/8", "2pi"); sweep
/// axes additionally accept inclusive grid specs "start:stop:count".

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "e91fss/analytic.hpp"
#include "e91fss/errors.hpp"
#include "e91fss/results_io.hpp"

namespace e91fss {

enum class Mode { single, sweep_skr, sweep_chsh };

inline const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::single: return "single";
        case Mode::sweep_skr: return "sweep-skr";
        default: return "sweep-chsh";
    }
}

/// Parse a scalar angle: plain radians ("0.5"), or a rational multiple of pi
/// ("pi", "2pi", "pi/8", "3pi/8", "-pi/4").
inline double parse_angle_value(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw UsageError("empty angle value");

    const auto pi_pos = s.find("pi");
    if (pi_pos == std::string::npos) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("malformed angle '" + text + "' (expected radians or a pi multiple)");
        }
    }

    std::string coeff = s.substr(0, pi_pos);
    std::string rest = s.substr(pi_pos + 2);
    double numerator = 1.0;
    if (coeff == "-")
        numerator = -1.0;
    else if (!coeff.empty()) {
        try {
            std::size_t used = 0;
            numerator = std::stod(coeff, &used);
            if (used != coeff.size()) throw std::invalid_argument(coeff);
        } catch (const std::exception&) {
            throw UsageError("malformed angle '" + text + "': bad pi coefficient '" + coeff + "'");
        }
    }
    double denominator = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/')
            throw UsageError("malformed angle '" + text + "': expected '/denominator' after pi");
        try {
            std::size_t used = 0;
            denominator = std::stod(rest.substr(1), &used);
            if (used != rest.size() - 1 || denominator == 0.0)
                throw std::invalid_argument(rest);
        } catch (const std::exception&) {
            throw UsageError("malformed angle '" + text + "': bad denominator '" + rest + "'");
        }
    }
    return numerator * kPi / denominator;
}

/// One axis of the run: a scalar or an inclusive linear grid.
struct AxisSpec {
    std::vector<double> values;
    std::string spec;  ///< original text, kept for metadata

    bool is_grid() const { return values.size() > 1; }
    double scalar() const { return values.front(); }
};

/// Parse "value" or "start:stop:count" (count >= 2, stop > start, endpoints
/// included).
inline AxisSpec parse_axis(const std::string& text) {
    AxisSpec axis;
    axis.spec = text;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        axis.values.push_back(parse_angle_value(text));
        return axis;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
        throw UsageError("malformed grid spec '" + text + "' (expected start:stop:count)");
    const double start = parse_angle_value(text.substr(0, c1));
    const double stop = parse_angle_value(text.substr(c1 + 1, c2 - c1 - 1));
    long count = 0;
    try {
        std::size_t used = 0;
        count = std::stol(text.substr(c2 + 1), &used);
        if (used != text.size() - c2 - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw UsageError("malformed grid spec '" + text + "': bad count");
    }
    if (count < 2) throw UsageError("grid spec '" + text + "': count must be >= 2");
    if (!(stop > start)) throw UsageError("grid spec '" + text + "': stop must exceed start");
    for (long i = 0; i < count; ++i)
        axis.values.push_back(start + (stop - start) * static_cast<double>(i) /
                                          static_cast<double>(count - 1));
    return axis;
}

/// Validated configuration of one CLI invocation.
struct RunConfig {
    Mode mode = Mode::single;
    AxisSpec alpha;
    AxisSpec beta;
    AxisSpec theta;
    std::optional<double> fss_energy;        ///< micro-eV, with exciton_lifetime replaces theta
    std::optional<double> exciton_lifetime;  ///< picoseconds
    std::size_t n_events = 50000;
    std::uint64_t seed = 0;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    bool emit_plot = false;
    bool allow_degenerate = false;
};

/// Help text requested; not an error.
class HelpRequested : public std::runtime_error {
  public:
    explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

namespace cli_detail {

struct RawOptions {
    std::string alpha;
    std::string beta;
    std::string theta;
    double fss = -1.0;
    double lifetime = -1.0;
    bool fss_given = false;
    bool lifetime_given = false;
    std::uint64_t events = 50000;
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "csv";
    bool plot = false;
    bool allow_degenerate = false;
};

inline void add_common_options(CLI::App& sub, RawOptions& raw, bool sweep_axes) {
    const char* angle_help = sweep_axes ? " (radians, pi form, or start:stop:count grid)"
                                        : " (radians or pi form, e.g. pi/8)";
    sub.add_option("--alpha", raw.alpha, std::string("direction of phi1 from vertical") + angle_help);
    sub.add_option("--beta", raw.beta,
                   std::string("angle between the coincident directions") + angle_help);
    sub.add_option("--theta", raw.theta,
                   std::string("dephasing phase of the photon pair") + angle_help);
    sub.add_option("--fss", raw.fss, "fine structure splitting S in micro-eV (with --lifetime)")
        ->check(CLI::NonNegativeNumber);
    sub.add_option("--lifetime", raw.lifetime, "exciton lifetime tau in picoseconds (with --fss)")
        ->check(CLI::NonNegativeNumber);
    sub.add_option("--events", raw.events, "transmissions per protocol execution")
        ->capture_default_str();
    sub.add_option("--seed", raw.seed, "master seed")->capture_default_str();
    sub.add_option("--output", raw.output, "result file path (default results.<format>)");
    sub.add_option("--format", raw.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub.add_flag("--plot", raw.plot, "also write gnuplot data and an SVG rendering");
}

inline void finalize(RunConfig& cfg, const RawOptions& raw, bool theta_given) {
    const bool physical = raw.fss_given || raw.lifetime_given;
    if (physical && theta_given)
        throw UsageError("--theta conflicts with --fss/--lifetime: supply exactly one of them");
    if (physical && (!raw.fss_given || !raw.lifetime_given))
        throw UsageError("--fss and --lifetime must be given together");

    cfg.n_events = raw.events;
    cfg.seed = raw.seed;
    cfg.format = raw.format == "json" ? OutputFormat::json : OutputFormat::csv;
    cfg.emit_plot = raw.plot;

    if (physical) {
        cfg.fss_energy = raw.fss;
        cfg.exciton_lifetime = raw.lifetime;
        const Phase theta = theta_from_physical(PhysicalParams(raw.fss, raw.lifetime));
        cfg.theta.values = {theta.radians()};
        cfg.theta.spec = "fss=" + format_double(raw.fss) + ",lifetime=" +
                         format_double(raw.lifetime);
    }

    if (cfg.n_events < 1) throw UsageError("--events must be >= 1");

    if (!raw.output.empty()) {
        cfg.output_path = raw.output;
    } else {
        cfg.output_path = std::string("results.") + to_string(cfg.format);
    }
    // Relative outputs may be redirected wholesale via the environment.
    if (const char* dir = std::getenv("E91FSS_OUTPUT_DIR");
        dir != nullptr && *dir != '\0' && !cfg.output_path.empty() && cfg.output_path[0] != '/') {
        cfg.output_path = std::string(dir) + "/" + cfg.output_path;
    }
}

}  // namespace cli_detail

/// Parse command-line arguments (argv[1:]) into a validated RunConfig.
/// Throws UsageError on bad input and HelpRequested for --help.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"E91 quantum key distribution with a dephased photon-pair source"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI file with options under a [single]/[sweep-skr]/[sweep-chsh] section; "
                   "command-line flags win");

    cli_detail::RawOptions raw;

    CLI::App* single = app.add_subcommand("single", "one protocol execution at fixed angles");
    cli_detail::add_common_options(*single, raw, false);
    single->add_flag("--allow-degenerate", raw.allow_degenerate,
                     "run even when beta is a multiple of pi (insecure configuration)");

    CLI::App* sweep_skr = app.add_subcommand(
        "sweep-skr", "SKR over an (alpha, beta, theta) grid vs the closed form");
    cli_detail::add_common_options(*sweep_skr, raw, true);

    CLI::App* sweep_chsh =
        app.add_subcommand("sweep-chsh", "|CR| over a theta grid vs the closed form");
    cli_detail::add_common_options(*sweep_chsh, raw, true);

    // Sweep grids follow the closed forms over the full domain, which includes
    // the insecure beta = n*pi lines; --reject-degenerate restores the strict
    // behavior of `single`.
    bool reject_degenerate = false;
    for (CLI::App* sub : {sweep_skr, sweep_chsh})
        sub->add_flag("--reject-degenerate", reject_degenerate,
                      "fail on beta = n*pi grid points instead of simulating them");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig cfg;
    CLI::App* active = single->parsed() ? single : (sweep_skr->parsed() ? sweep_skr : sweep_chsh);
    raw.fss_given = active->count("--fss") > 0;
    raw.lifetime_given = active->count("--lifetime") > 0;

    if (single->parsed()) {
        cfg.mode = Mode::single;
        cfg.alpha = AxisSpec{{parse_angle_value(raw.alpha.empty() ? "pi/8" : raw.alpha)},
                             raw.alpha.empty() ? "pi/8" : raw.alpha};
        cfg.beta = AxisSpec{{parse_angle_value(raw.beta.empty() ? "pi/8" : raw.beta)},
                            raw.beta.empty() ? "pi/8" : raw.beta};
        const bool theta_given = !raw.theta.empty();
        if (theta_given) cfg.theta = AxisSpec{{parse_angle_value(raw.theta)}, raw.theta};
        cli_detail::finalize(cfg, raw, theta_given);
        cfg.allow_degenerate = raw.allow_degenerate;
        if (cfg.theta.values.empty())
            throw UsageError("single mode needs --theta or the --fss/--lifetime pair");
    } else {
        const bool chsh = sweep_chsh->parsed();
        cfg.mode = chsh ? Mode::sweep_chsh : Mode::sweep_skr;
        const std::string alpha_default = "pi/8";
        const std::string beta_default = chsh ? "pi/8" : "0:pi:17";
        const std::string theta_default = "0:2pi:21";
        cfg.alpha = parse_axis(raw.alpha.empty() ? alpha_default : raw.alpha);
        cfg.beta = parse_axis(raw.beta.empty() ? beta_default : raw.beta);
        const bool theta_given = !raw.theta.empty();
        if (theta_given)
            cfg.theta = parse_axis(raw.theta);
        else
            cfg.theta = parse_axis(theta_default);
        cli_detail::finalize(cfg, raw, theta_given);
        cfg.allow_degenerate = !reject_degenerate;
    }
    return cfg;
}

}  // namespace e91fss
