// Command-line experiment runner.
//
//   lpmono run-example 1 [--ladder]
//   lpmono zero --operator mult --init inv-quad --out run.csv
//   lpmono rerun run.json
//
// Exit status: 0 when every run converged, 2 when a run stopped at
// --max-iter, 1 on errors. Each run prints one JSON metadata line.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpmono/lpmono.hpp"

namespace {

using lpmono::RunConfig;
using lpmono::RunRecord;

struct Overrides {
    std::optional<double> p;
    std::optional<std::int64_t> grid;
    std::optional<double> tol;
    std::optional<std::int64_t> max_iter;
    std::optional<double> gamma;
    std::optional<std::int64_t> theta_offset;
    std::optional<double> log_base;
    std::optional<std::string> init;
    std::optional<std::string> init_v;
    std::optional<std::string> subgrad_variant;
    std::optional<std::string> box;
    std::optional<double> cone_magnitude;
    std::optional<std::string> kernel;
    std::optional<std::string> duality_formula;
    std::optional<double> divergence_guard;

    void apply(RunConfig& cfg) const {
        if (p) cfg.p = *p;
        if (grid) cfg.grid = *grid;
        if (tol) cfg.tol = *tol;
        if (max_iter) cfg.max_iter = *max_iter;
        if (gamma) cfg.gamma = *gamma;
        if (theta_offset) cfg.theta_offset = *theta_offset;
        if (log_base) cfg.log_base = *log_base;
        if (init) cfg.init = *init;
        if (init_v) cfg.init_v = *init_v;
        if (subgrad_variant) cfg.subgrad_variant = *subgrad_variant;
        if (cone_magnitude) cfg.cone_magnitude = *cone_magnitude;
        if (kernel) cfg.kernel_path = *kernel;
        if (duality_formula) cfg.duality_formula = *duality_formula;
        if (divergence_guard) cfg.divergence_guard = *divergence_guard;
        if (box) {
            const auto comma = box->find(',');
            if (comma == std::string::npos) throw lpmono::InvalidArgument("--box expects lo,hi");
            cfg.box_lo = lpmono::parse_double(box->substr(0, comma));
            cfg.box_hi = lpmono::parse_double(box->substr(comma + 1));
        }
    }
};

struct OutputOptions {
    std::string path;
    std::string format = "csv";
};

void add_run_flags(CLI::App* app, Overrides& o, OutputOptions& out) {
    app->add_option("--p", o.p, "Exponent p in (1, 2]");
    app->add_option("--grid", o.grid, "Number of grid subintervals M");
    app->add_option("--tol", o.tol, "Stop when ||x_n - x_{n-1}||_p < tol");
    app->add_option("--max-iter", o.max_iter, "Maximum number of operator applications");
    app->add_option("--gamma", o.gamma, "Coupling bound: alpha_n <= gamma * theta_n");
    app->add_option("--theta-offset", o.theta_offset, "Offset n0 in theta_n = 1/loglog(n + n0)");
    app->add_option("--log-base", o.log_base, "Logarithm base used by theta_n");
    app->add_option("--init", o.init, "Initial point: preset name, zero, const:<c> or csv:<path>");
    app->add_option("--init-v", o.init_v, "Second initial point v_1 (hammerstein)");
    app->add_option("--subgrad-variant", o.subgrad_variant, "scaled (x/||x||) or duality (Jx/||x||)")
        ->check(CLI::IsMember({"scaled", "duality"}));
    app->add_option("--box", o.box, "Box constraint lo,hi (vi)");
    app->add_option("--cone-magnitude", o.cone_magnitude, "Magnitude of the normal-cone selection (vi)");
    app->add_option("--kernel", o.kernel, "Kernel CSV, row i = k(t_i, s_0..s_M)");
    app->add_option("--duality-formula", o.duality_formula, "standard or swapped exponent arrangement")
        ->check(CLI::IsMember({"standard", "swapped"}));
    app->add_option("--divergence-guard", o.divergence_guard, "Abort when ||x_n||_p exceeds this value");
    app->add_option("--out", out.path, "Write the run record to this path");
    app->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json", "loglog"}));
}

std::string tol_tag(double tol) {
    std::ostringstream s;
    s << tol;
    return s.str();
}

std::filesystem::path output_path(const OutputOptions& out, const RunRecord& rec, bool many) {
    std::filesystem::path path(out.path);
    if (!many) return path;
    const std::string stem = path.stem().string() + "_tol" + tol_tag(rec.config.tol);
    return path.parent_path() / (stem + path.extension().string());
}

void emit(const RunRecord& rec, const OutputOptions& out, bool many) {
    nlohmann::json meta = {{"example", rec.config.example},
                           {"solver", rec.config.solver},
                           {"operator", rec.config.op},
                           {"init", rec.config.init},
                           {"tol", rec.config.tol},
                           {"p", rec.config.p},
                           {"grid", rec.config.grid},
                           {"schedule", rec.schedule},
                           {"summary", lpmono::summary_json(rec.summary)}};
    if (rec.config.solver == "hammerstein") meta["init_v"] = rec.config.init_v;
    if (!out.path.empty()) {
        const std::filesystem::path path = output_path(out, rec, many);
        if (out.format == "json") {
            lpmono::export_json(rec, path);
        } else if (out.format == "loglog") {
            meta["dropped_rows"] = lpmono::export_loglog(rec, path);
        } else {
            lpmono::export_csv(rec, path);
        }
        meta["out"] = path.string();
    }
    std::cout << meta.dump() << '\n';
}

int exit_code(const std::vector<RunRecord>& records) {
    for (const auto& r : records) {
        if (!r.summary.converged) return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized one-step iteration for zeros of monotone operators on L_p([0,1])"};
    app.require_subcommand(1);

    // run-example
    int which = 1;
    bool ladder = false;
    double smallest_tol = 0.0;
    Overrides example_overrides;
    OutputOptions example_out;
    auto* example_cmd = app.add_subcommand("run-example", "Run reference example 1, 2 or 3");
    example_cmd->add_option("which", which, "Example number")->required()->check(CLI::IsMember({1, 2, 3}));
    example_cmd->add_flag("--ladder", ladder, "Rerun across the example's tolerance column");
    example_cmd->add_option("--smallest-tol", smallest_tol, "Skip ladder tolerances below this value");
    add_run_flags(example_cmd, example_overrides, example_out);

    // generic solvers
    struct Generic {
        std::string solver;
        std::string op;
        Overrides overrides;
        OutputOptions out;
        CLI::App* cmd = nullptr;
    };
    std::vector<Generic> generics(6);
    const std::vector<std::pair<std::string, std::string>> solvers = {
        {"zero", "Zero of A : E -> E*"},
        {"hilbert", "Zero of A with the J-free recursion (p = 2)"},
        {"hammerstein", "Hammerstein system u + KFu = 0"},
        {"min", "Minimize a convex functional via subgradients"},
        {"vi", "Variational inequality over a box"},
        {"jfixed", "J-fixed point of T : E -> E*"},
    };
    for (std::size_t k = 0; k < solvers.size(); ++k) {
        Generic& g = generics[k];
        g.solver = solvers[k].first;
        g.cmd = app.add_subcommand(g.solver, solvers[k].second);
        g.cmd->add_option("--operator", g.op, "Operator name")->required();
        add_run_flags(g.cmd, g.overrides, g.out);
    }

    // rerun
    std::string record_path;
    OutputOptions rerun_out;
    auto* rerun_cmd = app.add_subcommand("rerun", "Rerun the configuration stored in a JSON record");
    rerun_cmd->add_option("record", record_path, "JSON record written with --format json")->required();
    rerun_cmd->add_option("--out", rerun_out.path, "Write the new run record to this path");
    rerun_cmd->add_option("--format", rerun_out.format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "loglog"}));

    auto* presets_cmd = app.add_subcommand("presets", "List the initial-point presets");

    int i_max = 6;
    double gamma = 1.0;
    std::int64_t theta_offset = 16;
    double log_base = std::exp(1.0);
    auto* schedule_cmd = app.add_subcommand("check-schedule", "Block statistics of the default schedule");
    schedule_cmd->add_option("--i-max", i_max, "Last block index (2..12)");
    schedule_cmd->add_option("--gamma", gamma, "Coupling bound");
    schedule_cmd->add_option("--theta-offset", theta_offset, "Offset n0 in theta_n");
    schedule_cmd->add_option("--log-base", log_base, "Logarithm base used by theta_n");

    CLI11_PARSE(app, argc, argv);

    try {
        if (example_cmd->parsed()) {
            RunConfig cfg = lpmono::example_config(which);
            example_overrides.apply(cfg);
            const auto records = lpmono::run_example(cfg, ladder, smallest_tol);
            for (const auto& r : records) emit(r, example_out, records.size() > 1);
            return exit_code(records);
        }
        for (const Generic& g : generics) {
            if (!g.cmd->parsed()) continue;
            RunConfig cfg;
            cfg.solver = g.solver;
            cfg.op = g.op;
            g.overrides.apply(cfg);
            const RunRecord rec = lpmono::run_config(cfg);
            emit(rec, g.out, false);
            return exit_code({rec});
        }
        if (rerun_cmd->parsed()) {
            const RunRecord rec = lpmono::run_config(lpmono::load_config_json(record_path));
            emit(rec, rerun_out, false);
            return exit_code({rec});
        }
        if (presets_cmd->parsed()) {
            for (const auto& preset : lpmono::preset_catalog()) {
                std::cout << preset.name << '\t' << preset.formula << '\n';
            }
            std::cout << "zero\t0\nconst:<c>\tconstant c\ncsv:<path>\tsamples from a CSV file\n";
            return 0;
        }
        if (schedule_cmd->parsed()) {
            const auto schedule = lpmono::default_schedule(gamma, theta_offset, log_base);
            const auto report = lpmono::check_acceptably_paired(schedule, i_max);
            nlohmann::json blocks = nlohmann::json::array();
            for (const auto& b : report.blocks) {
                blocks.push_back({{"i", b.i}, {"start", b.start}, {"end", b.end}, {"s1", b.s1}, {"s2", b.s2},
                                  {"s3", b.s3}});
            }
            const nlohmann::json out = {{"schedule", lpmono::schedule_json(schedule.info)},
                                        {"blocks", blocks},
                                        {"s1_decreasing", report.s1_decreasing},
                                        {"s2_bounded_below", report.s2_bounded_below},
                                        {"s2_floor", report.s2_floor},
                                        {"s3_decreasing", report.s3_decreasing}};
            std::cout << out.dump() << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
