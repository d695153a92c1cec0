#pragma once

/// Serialization of run and sweep results: CSV with IEEE-754 round-trip
/// decimal formatting, JSON mirroring the same fields, and a run-metadata
/// sidecar. Output is byte-deterministic for a given result.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "e91fss/analysis.hpp"
#include "e91fss/errors.hpp"
#include "e91fss/version.hpp"

namespace e91fss {

enum class OutputFormat { csv, json };

inline const char* to_string(OutputFormat fmt) {
    return fmt == OutputFormat::csv ? "csv" : "json";
}

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("parse_double: bad numeric field '" + std::string(text) + "'");
    return value;
}

inline constexpr const char* kCsvHeader =
    "alpha,beta,theta,n_events,n_coincident,skr_sim,skr_analytic,qber_sim,cr_estimate,"
    "cr_analytic,seed";

inline std::string csv_row(const GridRecord& rec) {
    std::string row;
    row += format_double(rec.alpha);
    row += ',';
    row += format_double(rec.beta);
    row += ',';
    row += format_double(rec.theta);
    row += ',';
    row += std::to_string(rec.n_events);
    row += ',';
    row += std::to_string(rec.n_coincident);
    row += ',';
    row += format_double(rec.skr_sim);
    row += ',';
    row += format_double(rec.skr_analytic);
    row += ',';
    row += format_double(rec.qber_sim);
    row += ',';
    row += rec.cr_estimate ? format_double(*rec.cr_estimate) : "nan";
    row += ',';
    row += format_double(rec.cr_analytic);
    row += ',';
    row += std::to_string(rec.seed);
    return row;
}

inline std::string to_csv(const std::vector<GridRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& rec : records) {
        out += csv_row(rec);
        out += '\n';
    }
    return out;
}

/// Inverse of to_csv; used for round-trip checks and downstream tooling.
inline std::vector<GridRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::invalid_argument("parse_csv: missing or unexpected header row");
    std::vector<GridRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 11)
            throw std::invalid_argument("parse_csv: expected 11 fields, got " +
                                        std::to_string(fields.size()));
        GridRecord rec;
        rec.alpha = parse_double(fields[0]);
        rec.beta = parse_double(fields[1]);
        rec.theta = parse_double(fields[2]);
        rec.n_events = static_cast<std::size_t>(std::stoull(fields[3]));
        rec.n_coincident = static_cast<std::size_t>(std::stoull(fields[4]));
        rec.skr_sim = parse_double(fields[5]);
        rec.skr_analytic = parse_double(fields[6]);
        rec.qber_sim = parse_double(fields[7]);
        if (fields[8] != "nan") rec.cr_estimate = parse_double(fields[8]);
        rec.cr_analytic = parse_double(fields[9]);
        rec.seed = std::stoull(fields[10]);
        records.push_back(rec);
    }
    return records;
}

inline nlohmann::ordered_json record_to_json(const GridRecord& rec) {
    nlohmann::ordered_json j;
    j["alpha"] = rec.alpha;
    j["beta"] = rec.beta;
    j["theta"] = rec.theta;
    j["n_events"] = rec.n_events;
    j["n_coincident"] = rec.n_coincident;
    j["skr_sim"] = rec.skr_sim;
    j["skr_analytic"] = rec.skr_analytic;
    j["qber_sim"] = rec.qber_sim;
    if (rec.cr_estimate)
        j["cr_estimate"] = *rec.cr_estimate;
    else
        j["cr_estimate"] = nullptr;
    j["cr_analytic"] = rec.cr_analytic;
    j["seed"] = rec.seed;
    j["below_shannon"] = rec.below_shannon();
    return j;
}

inline std::string to_json(const std::vector<GridRecord>& records,
                           std::optional<double> r_squared_skr,
                           std::optional<double> r_squared_cr) {
    nlohmann::ordered_json j;
    if (r_squared_skr)
        j["r_squared_skr"] = *r_squared_skr;
    else
        j["r_squared_skr"] = nullptr;
    if (r_squared_cr)
        j["r_squared_cr"] = *r_squared_cr;
    else
        j["r_squared_cr"] = nullptr;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& rec : records) j["records"].push_back(record_to_json(rec));
    return j.dump(2) + "\n";
}

inline std::vector<GridRecord> parse_json_records(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<GridRecord> records;
    for (const auto& jr : j.at("records")) {
        GridRecord rec;
        rec.alpha = jr.at("alpha").get<double>();
        rec.beta = jr.at("beta").get<double>();
        rec.theta = jr.at("theta").get<double>();
        rec.n_events = jr.at("n_events").get<std::size_t>();
        rec.n_coincident = jr.at("n_coincident").get<std::size_t>();
        rec.skr_sim = jr.at("skr_sim").get<double>();
        rec.skr_analytic = jr.at("skr_analytic").get<double>();
        rec.qber_sim = jr.at("qber_sim").get<double>();
        if (!jr.at("cr_estimate").is_null()) rec.cr_estimate = jr.at("cr_estimate").get<double>();
        rec.cr_analytic = jr.at("cr_analytic").get<double>();
        rec.seed = jr.at("seed").get<std::uint64_t>();
        records.push_back(rec);
    }
    return records;
}

/// Provenance written next to every result file.
struct RunMetadata {
    std::string mode;
    std::uint64_t master_seed = 0;
    std::size_t n_events = 0;
    std::string alpha_spec;
    std::string beta_spec;
    std::string theta_spec;
    bool allow_degenerate = false;
};

inline std::string to_json(const RunMetadata& meta) {
    nlohmann::ordered_json j;
    j["artifact_version"] = kVersion;
    j["mode"] = meta.mode;
    j["master_seed"] = meta.master_seed;
    j["n_events"] = meta.n_events;
    j["grid"]["alpha"] = meta.alpha_spec;
    j["grid"]["beta"] = meta.beta_spec;
    j["grid"]["theta"] = meta.theta_spec;
    j["allow_degenerate"] = meta.allow_degenerate;
    return j.dump(2) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// Write records in the requested format plus the metadata sidecar
/// (`<path>.meta.json`).
inline void write_results(const std::vector<GridRecord>& records,
                          std::optional<double> r_squared_skr, std::optional<double> r_squared_cr,
                          OutputFormat format, const std::string& path, const RunMetadata& meta) {
    if (records.empty())
        throw std::logic_error("write_results: empty record set should be unreachable");
    if (format == OutputFormat::csv)
        write_text_file(path, to_csv(records));
    else
        write_text_file(path, to_json(records, r_squared_skr, r_squared_cr));
    write_text_file(path + ".meta.json", to_json(meta));
}

}  // namespace e91fss
