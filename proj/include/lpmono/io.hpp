#pragma once

// Run records and their on-disk formats.
//
// CSV: header `n,residual_p,residual_q,iterate_norm,phi_to_target,elapsed_s`,
// one row per trace entry with 17 significant digits, absent optional columns
// left blank, and the summary appended as `# key=value` footer lines.
//
// Log-log data: whitespace separated `n residual`, non-positive residuals
// dropped.
//
// JSON: {"schema": 1, "config": {...}, "summary": {...}, "trace": [...]}.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lpmono/error.hpp"
#include "lpmono/grid.hpp"
#include "lpmono/operators.hpp"
#include "lpmono/solver.hpp"

namespace lpmono {

inline constexpr int kSchemaVersion = 1;

// Everything needed to rerun a solve bit-identically.
struct RunConfig {
    int example = 0;                 // 1..3 for the reference experiments, 0 otherwise
    std::string solver = "zero";     // zero | hilbert | hammerstein | min | vi | jfixed
    std::string op = "mult";
    std::string kernel_path;         // kernel CSV for the `kernel` operator
    std::string init = "inv-quad";
    std::string init_v = "inv-tsin"; // second initial point (Hammerstein v_1)
    double p = 1.5;
    std::int64_t grid = 100;
    double tol = 1e-6;
    std::int64_t max_iter = 1'000'000;
    double gamma = 1.0;
    std::int64_t theta_offset = 16;
    double log_base = 2.718281828459045;
    std::string subgrad_variant = "scaled";  // scaled | duality
    double box_lo = -1.0;
    double box_hi = 1.0;
    double cone_magnitude = 1.0;
    std::string duality_formula = "standard";  // standard | swapped
    double divergence_guard = 1e6;
    bool known_zero = true;          // the operator's zero is the zero function
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, example, solver, op, kernel_path, init, init_v, p, grid,
                                                tol, max_iter, gamma, theta_offset, log_base, subgrad_variant,
                                                box_lo, box_hi, cone_magnitude, duality_formula,
                                                divergence_guard, known_zero)

struct RunSummary {
    std::int64_t nfe = 0;
    double residual = 0.0;
    std::optional<double> residual_q;
    double iterate_norm = 0.0;
    std::optional<double> iterate_norm_q;
    double wall_time = 0.0;
    bool converged = false;
};

struct RunRecord {
    RunConfig config;
    nlohmann::json schedule;  // ScheduleInfo of the run
    IterationTrace trace;
    RunSummary summary;
};

/// Summary taken from the trace's final row.
inline RunSummary summarize(const IterationTrace& trace) {
    RunSummary s;
    s.converged = trace.converged;
    s.nfe = trace.nfe();
    if (trace.rows.empty()) return s;
    const TraceRow& last = trace.last();
    s.residual = last.residual;
    s.residual_q = last.residual_q;
    s.iterate_norm = last.iterate_norm;
    s.iterate_norm_q = last.iterate_norm_q;
    s.wall_time = last.elapsed;
    return s;
}

inline nlohmann::json schedule_json(const ScheduleInfo& info) {
    return {{"name", info.name},           {"gamma", info.gamma},
            {"theta_offset", info.theta_offset}, {"log_base", info.log_base},
            {"alpha_rule", info.alpha_rule}, {"theta_rule", info.theta_rule}};
}

// 17 significant digits, enough to read back the same double; independent of
// the global locale.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw IoError("cannot parse number '" + std::string(text) + "'");
    }
    return v;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

} // namespace detail

inline constexpr std::string_view kCsvHeader = "n,residual_p,residual_q,iterate_norm,phi_to_target,elapsed_s";

inline void export_csv(const RunRecord& rec, const std::filesystem::path& path) {
    std::ofstream out = detail::open_for_write(path);
    out << kCsvHeader << '\n';
    for (const TraceRow& r : rec.trace.rows) {
        out << r.n << ',' << format_double(r.residual) << ',' << detail::optional_field(r.residual_q) << ','
            << format_double(r.iterate_norm) << ',' << detail::optional_field(r.phi_to_target) << ','
            << format_double(r.elapsed) << '\n';
    }
    const RunSummary& s = rec.summary;
    out << "# nfe=" << s.nfe << '\n';
    out << "# residual_p=" << format_double(s.residual) << '\n';
    if (s.residual_q) out << "# residual_q=" << format_double(*s.residual_q) << '\n';
    out << "# iterate_norm=" << format_double(s.iterate_norm) << '\n';
    out << "# wall_time_s=" << format_double(s.wall_time) << '\n';
    out << "# converged=" << (s.converged ? "true" : "false") << '\n';
    detail::finish_write(out, path);
}

/// Reads the rows written by export_csv back into a trace (footer ignored).
inline IterationTrace read_csv_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) {
        throw IoError("'" + path.string() + "' does not start with the trace CSV header");
    }
    IterationTrace trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') {
            if (body.starts_with("# converged=")) trace.converged = body.ends_with("true");
            continue;
        }
        const auto f = detail::split(body, ',');
        if (f.size() != 6) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 6 fields, got " +
                          std::to_string(f.size()));
        }
        TraceRow r;
        r.n = static_cast<std::int64_t>(parse_double(f[0]));
        r.residual = parse_double(f[1]);
        if (!f[2].empty()) r.residual_q = parse_double(f[2]);
        r.iterate_norm = parse_double(f[3]);
        if (!f[4].empty()) r.phi_to_target = parse_double(f[4]);
        r.elapsed = parse_double(f[5]);
        trace.rows.push_back(r);
    }
    trace.hit_max_iter = !trace.converged;
    return trace;
}

/// Writes `n residual` pairs; returns how many non-positive residuals were dropped.
inline std::size_t export_loglog(const RunRecord& rec, const std::filesystem::path& path) {
    if (rec.trace.rows.empty()) throw Error("export_loglog: trace is empty");
    std::ostringstream body;
    std::size_t dropped = 0;
    std::size_t kept = 0;
    for (const TraceRow& r : rec.trace.rows) {
        if (!(r.residual > 0.0)) {
            ++dropped;
            continue;
        }
        body << r.n << ' ' << format_double(r.residual) << '\n';
        ++kept;
    }
    if (kept == 0) {
        throw Error("export_loglog: no positive residuals left after dropping " + std::to_string(dropped) +
                    " rows; refusing to write '" + path.string() + "'");
    }
    std::ofstream out = detail::open_for_write(path);
    out << body.str();
    detail::finish_write(out, path);
    return dropped;
}

inline nlohmann::json trace_row_json(const TraceRow& r) {
    nlohmann::json j = {{"n", r.n}, {"residual_p", r.residual}, {"iterate_norm", r.iterate_norm},
                        {"elapsed_s", r.elapsed}};
    if (r.residual_q) j["residual_q"] = *r.residual_q;
    if (r.iterate_norm_q) j["iterate_norm_q"] = *r.iterate_norm_q;
    if (r.phi_to_target) j["phi_to_target"] = *r.phi_to_target;
    if (r.violation) j["violation"] = *r.violation;
    return j;
}

inline nlohmann::json summary_json(const RunSummary& s) {
    nlohmann::json j = {{"nfe", s.nfe},
                        {"residual_p", s.residual},
                        {"iterate_norm", s.iterate_norm},
                        {"wall_time_s", s.wall_time},
                        {"converged", s.converged}};
    if (s.residual_q) j["residual_q"] = *s.residual_q;
    if (s.iterate_norm_q) j["iterate_norm_q"] = *s.iterate_norm_q;
    return j;
}

inline nlohmann::json record_json(const RunRecord& rec) {
    nlohmann::json trace = nlohmann::json::array();
    for (const TraceRow& r : rec.trace.rows) trace.push_back(trace_row_json(r));
    nlohmann::json config = rec.config;
    config["schedule"] = rec.schedule;
    return {{"schema", kSchemaVersion}, {"config", config}, {"summary", summary_json(rec.summary)}, {"trace", trace}};
}

inline void export_json(const RunRecord& rec, const std::filesystem::path& path) {
    std::ofstream out = detail::open_for_write(path);
    out << record_json(rec).dump(2) << '\n';
    detail::finish_write(out, path);
}

/// Loads the run configuration stored in an exported JSON record.
inline RunConfig load_config_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != kSchemaVersion) {
        throw IoError("'" + path.string() + "' has no supported schema field (expected schema: 1)");
    }
    return doc.at("config").get<RunConfig>();
}

namespace detail {

inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<double> row;
        for (std::string_view field : split(body, ',')) {
            try {
                row.push_back(parse_double(trim(field)));
            } catch (const IoError& e) {
                throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/// Kernel samples: row i holds k(t_i, s_0), ..., k(t_i, s_M).
inline KernelMatrix load_kernel_csv(const std::filesystem::path& path) {
    return KernelMatrix::from_rows(detail::read_numeric_csv(path));
}

/// Grid function samples, one node per line; either `value` or `t,value`.
inline GridFunction load_grid_csv(const std::filesystem::path& path) {
    std::vector<double> values;
    for (const auto& row : detail::read_numeric_csv(path)) {
        if (row.empty() || row.size() > 2) throw IoError("'" + path.string() + "': expected `value` or `t,value` rows");
        values.push_back(row.back());
    }
    return GridFunction(std::move(values));
}

} // namespace lpmono
