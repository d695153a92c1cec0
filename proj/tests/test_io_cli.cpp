#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "e91fss/e91fss.hpp"

using namespace e91fss;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {
constexpr double pi = std::numbers::pi;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("e91fss_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GridRecord sample_record() {
    GridRecord rec;
    rec.alpha = pi / 8.0;
    rec.beta = pi / 8.0;
    rec.theta = 1.0 / 3.0;
    rec.n_events = 50000;
    rec.n_coincident = 11083;
    rec.skr_sim = 0.123456789012345678;
    rec.skr_analytic = p_corr(ProtocolAngles(rec.alpha, rec.beta), Phase(rec.theta));
    rec.qber_sim = 1.0 - rec.skr_sim;
    rec.cr_estimate = 2.0 * std::numbers::sqrt2 - 1e-3;
    rec.cr_analytic = chsh_cr(ProtocolAngles(rec.alpha, rec.beta), Phase(rec.theta));
    rec.seed = 0xdeadbeefcafeULL;
    return rec;
}
}  // namespace

TEST_CASE("format_double round-trips doubles exactly") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(gen);
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(parse_double(format_double(2.0 * std::numbers::sqrt2)) == 2.0 * std::numbers::sqrt2);
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("CSV writing and parsing round-trip byte-identically") {
    std::vector<GridRecord> records{sample_record(), sample_record()};
    records[1].cr_estimate.reset();  // absent estimate serializes as nan
    records[1].theta = 2.0;

    const std::string csv = to_csv(records);
    CHECK_THAT(csv, ContainsSubstring(kCsvHeader));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    const auto parsed = parse_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].skr_sim == records[0].skr_sim);
    CHECK(parsed[0].cr_estimate == records[0].cr_estimate);
    CHECK_FALSE(parsed[1].cr_estimate.has_value());
    CHECK(parsed[1].seed == records[1].seed);

    CHECK(to_csv(parsed) == csv);

    CHECK_THROWS_AS(parse_csv("bogus\n1,2,3\n"), std::invalid_argument);
}

TEST_CASE("JSON output mirrors the records and reconstructs numbers exactly") {
    std::vector<GridRecord> records{sample_record()};
    const std::string json = to_json(records, 0.997, std::nullopt);
    CHECK_THAT(json, ContainsSubstring("\"r_squared_skr\": 0.997"));
    CHECK_THAT(json, ContainsSubstring("\"r_squared_cr\": null"));
    CHECK_THAT(json, ContainsSubstring("\"below_shannon\""));

    const auto parsed = parse_json_records(json);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].alpha == records[0].alpha);
    CHECK(parsed[0].skr_sim == records[0].skr_sim);
    CHECK(parsed[0].qber_sim == records[0].qber_sim);
    CHECK(parsed[0].cr_estimate == records[0].cr_estimate);
    CHECK(parsed[0].cr_analytic == records[0].cr_analytic);
    CHECK(parsed[0].seed == records[0].seed);
}

TEST_CASE("write_results emits the payload and a metadata sidecar") {
    TempDir tmp;
    RunMetadata meta;
    meta.mode = "single";
    meta.master_seed = 7;
    meta.n_events = 1000;
    meta.alpha_spec = "pi/8";
    meta.beta_spec = "pi/8";
    meta.theta_spec = "0";

    const std::vector<GridRecord> records{sample_record()};
    const std::string path = tmp.file("out.csv");
    write_results(records, std::nullopt, std::nullopt, OutputFormat::csv, path, meta);
    CHECK(fs::exists(path));
    CHECK(fs::exists(path + ".meta.json"));
    CHECK_THAT(slurp(path + ".meta.json"), ContainsSubstring("\"master_seed\": 7"));
    CHECK_THAT(slurp(path + ".meta.json"), ContainsSubstring(kVersion));

    CHECK_THROWS_AS(write_results(records, std::nullopt, std::nullopt, OutputFormat::csv,
                                  tmp.file("no/such/dir/out.csv"), meta),
                    IoError);
    // Serializing an empty grid is an internal error, not a data condition.
    CHECK_THROWS_AS(write_results({}, std::nullopt, std::nullopt, OutputFormat::csv,
                                  tmp.file("empty.csv"), meta),
                    std::logic_error);
}

TEST_CASE("parse_angle_value accepts radians and pi multiples") {
    CHECK(parse_angle_value("0") == 0.0);
    CHECK(parse_angle_value("0.5") == 0.5);
    CHECK(parse_angle_value("pi") == pi);
    CHECK(parse_angle_value("2pi") == 2.0 * pi);
    CHECK(parse_angle_value("pi/8") == pi / 8.0);
    CHECK(parse_angle_value("3pi/8") == 3.0 * pi / 8.0);
    CHECK(parse_angle_value("-pi/4") == -pi / 4.0);
    CHECK(parse_angle_value(" pi / 8 ") == pi / 8.0);

    CHECK_THROWS_AS(parse_angle_value("pie"), UsageError);
    CHECK_THROWS_AS(parse_angle_value("pi/"), UsageError);
    CHECK_THROWS_AS(parse_angle_value("pi/0"), UsageError);
    CHECK_THROWS_AS(parse_angle_value("x"), UsageError);
    CHECK_THROWS_AS(parse_angle_value(""), UsageError);
}

TEST_CASE("parse_axis handles scalars and inclusive grids") {
    const auto scalar = parse_axis("pi/8");
    CHECK_FALSE(scalar.is_grid());
    CHECK(scalar.scalar() == pi / 8.0);

    const auto grid = parse_axis("0:pi:17");
    REQUIRE(grid.values.size() == 17);
    CHECK(grid.values.front() == 0.0);
    CHECK_THAT(grid.values.back(), WithinAbs(pi, 1e-15));
    CHECK_THAT(grid.values[8], WithinAbs(pi / 2.0, 1e-15));

    CHECK_THROWS_AS(parse_axis("0:pi:1"), UsageError);
    CHECK_THROWS_AS(parse_axis("pi:0:5"), UsageError);
    CHECK_THROWS_AS(parse_axis("0:pi"), UsageError);
    CHECK_THROWS_AS(parse_axis("0:pi:5:2"), UsageError);
    CHECK_THROWS_AS(parse_axis("0:pi:x"), UsageError);
}

TEST_CASE("parse_config: single mode") {
    const auto cfg = parse_config(
        {"single", "--alpha", "pi/8", "--beta", "pi/8", "--theta", "0", "--events", "50000"});
    CHECK(cfg.mode == Mode::single);
    CHECK(cfg.alpha.scalar() == pi / 8.0);
    CHECK(cfg.beta.scalar() == pi / 8.0);
    CHECK(cfg.theta.scalar() == 0.0);
    CHECK(cfg.n_events == 50000);
    CHECK(cfg.seed == 0);
    CHECK(cfg.format == OutputFormat::csv);
    CHECK_FALSE(cfg.allow_degenerate);
}

TEST_CASE("parse_config: physical parameters resolve theta") {
    const auto cfg =
        parse_config({"single", "--fss", "1.0", "--lifetime", "658.2119569"});
    REQUIRE(cfg.fss_energy.has_value());
    REQUIRE(cfg.exciton_lifetime.has_value());
    CHECK_THAT(cfg.theta.scalar(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("parse_config: conflicting and missing phase specifications") {
    CHECK_THROWS_AS(
        parse_config({"single", "--theta", "0", "--fss", "1", "--lifetime", "10"}), UsageError);
    CHECK_THROWS_AS(parse_config({"single", "--fss", "1"}), UsageError);
    CHECK_THROWS_AS(parse_config({"single"}), UsageError);
    CHECK_THROWS_AS(parse_config({"single", "--bogus-flag", "1", "--theta", "0"}), UsageError);
    CHECK_THROWS_AS(parse_config({}), UsageError);
    CHECK_THROWS_AS(parse_config({"--help"}), HelpRequested);
}

TEST_CASE("parse_config: sweep defaults mirror the reference grids") {
    const auto chsh = parse_config({"sweep-chsh"});
    CHECK(chsh.mode == Mode::sweep_chsh);
    CHECK(chsh.alpha.scalar() == pi / 8.0);
    CHECK(chsh.beta.scalar() == pi / 8.0);
    CHECK(chsh.theta.values.size() == 21);
    CHECK(chsh.allow_degenerate);

    const auto skr = parse_config({"sweep-skr", "--alpha", "pi/4", "--events", "1000"});
    CHECK(skr.mode == Mode::sweep_skr);
    CHECK(skr.alpha.scalar() == pi / 4.0);
    CHECK(skr.beta.values.size() == 17);
    CHECK(skr.theta.values.size() == 21);
    CHECK(skr.n_events == 1000);

    const auto strict = parse_config({"sweep-skr", "--reject-degenerate"});
    CHECK_FALSE(strict.allow_degenerate);
}

TEST_CASE("parse_config: config file values are overridden by flags") {
    TempDir tmp;
    {
        std::ofstream cfg_file(tmp.file("run.ini"));
        cfg_file << "[single]\nalpha=pi/4\nbeta=pi/8\ntheta=0\nevents=123\n";
    }
    const auto cfg = parse_config(
        {"--config", tmp.file("run.ini"), "single", "--alpha", "pi/8"});
    CHECK(cfg.alpha.scalar() == pi / 8.0);  // flag wins
    CHECK(cfg.beta.scalar() == pi / 8.0);
    CHECK(cfg.n_events == 123);
}

TEST_CASE("execute: single mode prints the run summary and writes records") {
    TempDir tmp;
    auto cfg = parse_config({"single", "--alpha", "pi/8", "--beta", "pi/8", "--theta", "0",
                             "--output", tmp.file("single.csv")});
    std::ostringstream out, err;
    CHECK(execute(cfg, out, err) == kExitOk);
    CHECK_THAT(out.str(), ContainsSubstring("SKR=1.000000"));
    CHECK_THAT(out.str(), ContainsSubstring("QBER=0.000000"));
    CHECK_THAT(out.str(), ContainsSubstring("SECURITY_IDENTITY=pass"));

    const auto records = parse_csv(slurp(tmp.file("single.csv")));
    REQUIRE(records.size() == 1);
    CHECK(records[0].skr_sim == 1.0);
    CHECK(records[0].skr_analytic == 1.0);

    // Analytic columns are reproducible from the serialized angles alone.
    const ProtocolAngles angles(records[0].alpha, records[0].beta);
    CHECK(records[0].skr_analytic == p_corr(angles, Phase(records[0].theta)));
    CHECK(records[0].cr_analytic == chsh_cr(angles, Phase(records[0].theta)));
}

TEST_CASE("execute: degenerate single run fails with the statistics exit code") {
    TempDir tmp;
    auto cfg = parse_config({"single", "--beta", "0", "--theta", "1",
                             "--output", tmp.file("deg.csv")});
    std::ostringstream out, err;
    CHECK(execute(cfg, out, err) == kExitRuntime);
    CHECK_THAT(err.str(), ContainsSubstring("degenerate"));

    auto forced = parse_config({"single", "--beta", "0", "--theta", "1", "--allow-degenerate",
                                "--events", "1000", "--output", tmp.file("deg2.csv")});
    std::ostringstream out2, err2;
    CHECK(execute(forced, out2, err2) == kExitOk);
}

TEST_CASE("execute: sweep-chsh writes one row per grid point plus summary") {
    TempDir tmp;
    auto cfg = parse_config({"sweep-chsh", "--events", "2000", "--output",
                             tmp.file("chsh.csv"), "--plot"});
    std::ostringstream out, err;
    REQUIRE(execute(cfg, out, err) == kExitOk);
    CHECK_THAT(out.str(), ContainsSubstring("R2_CR=0.9"));
    CHECK_THAT(out.str(), ContainsSubstring("SHANNON_OK="));

    const std::string csv = slurp(tmp.file("chsh.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);  // header + 21 rows

    CHECK(fs::exists(tmp.file("chsh.dat")));
    const std::string svg = slurp(tmp.file("chsh.svg"));
    CHECK_THAT(svg, ContainsSubstring("<svg"));
    CHECK_THAT(svg, ContainsSubstring("circle"));
}

TEST_CASE("execute: sweep-skr heatmap plot for a (beta, theta) surface") {
    TempDir tmp;
    auto cfg = parse_config({"sweep-skr", "--beta", "0:pi:5", "--theta", "0:2pi:5", "--events",
                             "500", "--format", "json", "--output", tmp.file("skr.json"),
                             "--plot"});
    std::ostringstream out, err;
    REQUIRE(execute(cfg, out, err) == kExitOk);
    const auto records = parse_json_records(slurp(tmp.file("skr.json")));
    CHECK(records.size() == 25);
    CHECK_THAT(slurp(tmp.file("skr.svg")), ContainsSubstring("rect"));
}

TEST_CASE("execute: unwritable output maps to the I/O exit code") {
    auto cfg = parse_config({"single", "--theta", "0", "--output", "/no/such/dir/out.csv"});
    std::ostringstream out, err;
    CHECK(execute(cfg, out, err) == kExitIo);
    CHECK_THAT(err.str(), ContainsSubstring("/no/such/dir/out.csv"));
}

TEST_CASE("identical configurations produce byte-identical output files") {
    TempDir tmp;
    for (const char* fmt : {"csv", "json"}) {
        auto cfg1 = parse_config({"sweep-chsh", "--theta", "0:2pi:5", "--events", "2000",
                                  "--format", fmt, "--output", tmp.file(std::string("a.") + fmt)});
        auto cfg2 = parse_config({"sweep-chsh", "--theta", "0:2pi:5", "--events", "2000",
                                  "--format", fmt, "--output", tmp.file(std::string("b.") + fmt)});
        std::ostringstream out, err;
        REQUIRE(execute(cfg1, out, err) == kExitOk);
        REQUIRE(execute(cfg2, out, err) == kExitOk);
        CHECK(slurp(tmp.file(std::string("a.") + fmt)) ==
              slurp(tmp.file(std::string("b.") + fmt)));
    }
}

TEST_CASE("E91FSS_OUTPUT_DIR redirects relative output paths") {
    TempDir tmp;
    ::setenv("E91FSS_OUTPUT_DIR", tmp.path.string().c_str(), 1);
    auto cfg = parse_config({"single", "--theta", "0", "--output", "env_out.csv"});
    ::unsetenv("E91FSS_OUTPUT_DIR");
    CHECK(cfg.output_path == tmp.file("env_out.csv"));
}
