#pragma once
//
// Command-line driver:
//   solve     --config run.json
//   verify    [--experiment NAME] --config run.json   (name defaults to the config's)
//   rearrange --input field.csv --norm lorentz:2,inf
//
// Exit codes: 0 success (or verdict holds / holds-with-growth), 1 usage or
// configuration error, 2 numerical failure (non-convergence, under-resolved
// setup), 3 verdict "violated".
//

#include <vwslab/config.hpp>
#include <vwslab/io.hpp>
#include <vwslab/rearrange.hpp>
#include <vwslab/solver.hpp>
#include <vwslab/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace vwslab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int numerical = 2;
inline constexpr int violated = 3;
} // namespace exit_code

/// Scalar overrides from the command line, applied to the JSON document before validation.
struct ConfigOverrides
{
    std::optional<int> n;
    std::optional<std::string> output_dir;
    std::optional<double> tol;
    std::optional<double> c;
    std::optional<double> r;
    std::optional<double> alpha;
};

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config", "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in, nullptr, true, true);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
}

inline RunConfig config_with_overrides(const std::filesystem::path& path, const ConfigOverrides& o)
{
    auto doc = read_json_file(path);
    if (!doc.is_object())
        throw ConfigError("(root)", "expected a JSON object");
    if (o.n) doc["n"] = *o.n;
    if (o.output_dir) doc["output_dir"] = *o.output_dir;
    if (o.tol) doc["solver"]["tol"] = *o.tol;
    if (o.c) doc["params"]["c"] = *o.c;
    if (o.r) doc["params"]["r"] = *o.r;
    if (o.alpha) doc["params"]["alpha"] = *o.alpha;
    return parse_config(doc);
}

inline std::string config_hash(const RunConfig& cfg)
{
    return fnv1a_hex(cfg.source.dump());
}

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PlotLayout
{
    std::size_t x;
    std::vector<std::size_t> y;
    bool log_x, log_y;
};

/// Which table columns an experiment plots.
inline PlotLayout plot_layout(const EstimateReport& r)
{
    if (r.name == "weighted_gradient") return {0, {1, 2}, true, true};
    if (r.name == "lnprime_blowup") return {0, {2, 3}, true, true};
    if (r.name == "no_bc_uniqueness") return {0, {1, 2}, true, true};
    if (r.name == "kato") return {0, {3}, true, true};
    if (r.name == "dual_linf") return {0, {5}, true, false};
    if (r.name == "weighted_potential_bound") return {0, {3}, true, false};
    if (r.name == "gradient_regularity") return {0, {4}, true, false};
    return {0, {r.columns.size() - 1}, true, false};
}

inline std::string report_svg(const EstimateReport& r)
{
    const auto layout = plot_layout(r);
    std::vector<PlotSeries> series;
    for (std::size_t yc : layout.y) {
        PlotSeries s;
        s.name = r.columns[yc];
        for (const auto& row : r.rows) {
            s.x.push_back(row[layout.x]);
            s.y.push_back(row[yc]);
        }
        series.push_back(std::move(s));
    }
    PlotSpec spec{r.name + ": " + to_string(r.verdict), r.columns[layout.x], layout.y.size() == 1 ? r.columns[layout.y[0]] : "",
                  layout.log_x, layout.log_y};
    return plot_svg(spec, series);
}

} // namespace detail

[[nodiscard]] inline int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    const int n = cfg.solve_mesh();
    const auto mesh = build_mesh(n);
    const auto& dir = cfg.output_dir;
    const auto hash = detail::config_hash(cfg);
    ProblemSpec spec;
    try {
        spec = cfg.params.setup.build(mesh, cfg.mode);
        spec.validate();
    }
    catch (const UnderResolved& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::numerical;
    }
    catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    }

    SolveReport rep;
    try {
        rep = solve(spec, cfg.params.solve);
    }
    catch (const ConvergenceError& e) {
        std::vector<std::vector<double>> rows;
        const auto& h = e.residual_history();
        for (std::size_t i = 0; i < h.size(); ++i)
            rows.push_back({double(i + 1), h[i]});
        write_csv(dir / "residual_history.csv", {"iteration", "relative_residual"}, rows);
        append_manifest(dir, {{hash, "solve", "failed", detail::seconds_since(t0), "residual_history.csv"}});
        err << "solver failure: " << e.what() << "\n";
        return exit_code::numerical;
    }

    write_field_csv(dir / "solution.csv", rep.solution);
    write_atomic(dir / "solution.svg",
                 heatmap_svg(rep.solution, std::string(cfg.mode == Mode::primal ? "omega" : "phi") + ", n=" +
                                               std::to_string(n)));
    std::string norms = "quantity,value\n";
    norms += "n," + std::to_string(n) + "\n";
    norms += "method," + rep.method + "\n";
    norms += "iterations," + std::to_string(rep.iterations) + "\n";
    norms += "final_relative_residual," + format_number(rep.final_relative_residual) + "\n";
    for (const auto& [k, v] : rep.norms)
        norms += k + "," + format_number(v) + "\n";
    write_atomic(dir / "norms.csv", norms);
    const double wall = detail::seconds_since(t0);
    append_manifest(dir, {{hash, "solve", "ok", wall, "solution.csv"},
                          {hash, "solve", "ok", wall, "solution.svg"},
                          {hash, "solve", "ok", wall, "norms.csv"}});

    out << "solved n=" << n << " with " << rep.method << " (" << rep.iterations << " iterations, residual "
        << format_number(rep.final_relative_residual) << ")\n";
    for (const auto& [k, v] : rep.norms)
        out << "  " << k << " = " << format_number(v) << "\n";
    return exit_code::ok;
}

[[nodiscard]] inline int cmd_verify(const std::string& name, const RunConfig& cfg, std::ostream& out,
                                    std::ostream& err)
{
    if (!experiment_registry().count(name)) {
        err << "unknown experiment '" << name << "'; available:";
        for (const auto& [k, v] : experiment_registry())
            err << " " << k;
        err << "\n";
        return exit_code::usage;
    }
    const auto t0 = std::chrono::steady_clock::now();
    EstimateReport rep;
    try {
        rep = run_experiment(name, cfg.params);
    }
    catch (const UnderResolved& e) {
        err << "under-resolved setup: " << e.what() << "\n";
        return exit_code::numerical;
    }
    catch (const ConvergenceError& e) {
        err << "solver failure: " << e.what() << "\n";
        return exit_code::numerical;
    }
    catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    }
    const double wall = detail::seconds_since(t0);
    const auto& dir = cfg.output_dir;
    write_csv(dir / (name + ".csv"), rep.columns, rep.rows);
    write_atomic(dir / (name + ".svg"), detail::report_svg(rep));
    const auto hash = detail::config_hash(cfg);
    const std::string verdict = to_string(rep.verdict);
    append_manifest(dir, {{hash, name, verdict, wall, name + ".csv"}, {hash, name, verdict, wall, name + ".svg"}});

    out << name << ": " << rep.summary << "\n";
    for (std::size_t i = 0; i < rep.columns.size(); ++i)
        out << (i ? "  " : "") << rep.columns[i];
    out << "\n";
    for (const auto& row : rep.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "  " : "") << format_number(row[i]);
        out << "\n";
    }
    out << "verdict: " << verdict << "\n";
    return rep.verdict == Verdict::violated ? exit_code::violated : exit_code::ok;
}

[[nodiscard]] inline int cmd_rearrange(const std::filesystem::path& input, const std::string& norm_text,
                                       std::optional<std::filesystem::path> profile_path, std::ostream& out,
                                       std::ostream& err)
{
    try {
        const auto spec = NormSpec::parse(norm_text);
        const auto u = read_field_csv(input);
        const double value = norm(u, spec);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%#.12g", value);
        out << buf << "\n";
        if (!profile_path) {
            auto p = input;
            p.replace_extension(".profile.csv");
            profile_path = p;
        }
        write_profile_csv(*profile_path, decreasing_rearrangement(abs(u)));
        return exit_code::ok;
    }
    catch (const CsvError& e) {
        err << "malformed input: " << e.what() << "\n";
        return exit_code::usage;
    }
    catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    }
}

/// Parses argv and dispatches; never throws.
[[nodiscard]] inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                                 std::ostream& err = std::cerr)
{
    CLI::App app{"vwslab: very weak solutions laboratory"};
    app.require_subcommand(1);

    ConfigOverrides ov;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--n", ov.n, "mesh size for solve");
        sub->add_option("--output-dir", ov.output_dir, "artifact directory");
        sub->add_option("--tol", ov.tol, "solver tolerance");
        sub->add_option("--c", ov.c, "potential coefficient for no_bc_uniqueness");
        sub->add_option("--r", ov.r, "potential exponent for no_bc_uniqueness");
        sub->add_option("--alpha", ov.alpha, "weight exponent for gradient_regularity");
    };

    std::string solve_cfg, verify_cfg, experiment, input, norm_text = "lorentz:2,inf", profile;
    auto* solve_cmd = app.add_subcommand("solve", "solve one primal or dual problem");
    solve_cmd->add_option("--config", solve_cfg, "run configuration (JSON)")->required();
    add_overrides(solve_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "run a registered experiment");
    verify_cmd->add_option("--experiment", experiment, "experiment name (default: the config's \"experiment\")");
    verify_cmd->add_option("--config", verify_cfg, "run configuration (JSON)")->required();
    add_overrides(verify_cmd);

    auto* rearr_cmd = app.add_subcommand("rearrange", "norm and decreasing rearrangement of a field CSV");
    rearr_cmd->add_option("--input", input, "CSV with x,y,value rows")->required();
    rearr_cmd->add_option("--norm", norm_text, "lorentz:p,q | lexp:a | lplnl:p,a | wl1:a");
    rearr_cmd->add_option("--profile", profile, "output CSV for the rearranged profile");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    }
    catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return exit_code::usage;
    }

    try {
        if (*solve_cmd)
            return cmd_solve(detail::config_with_overrides(solve_cfg, ov), out, err);
        if (*verify_cmd) {
            if (!experiment.empty() && !experiment_registry().count(experiment))
                return cmd_verify(experiment, RunConfig{}, out, err);
            const auto cfg = detail::config_with_overrides(verify_cfg, ov);
            const auto name = experiment.empty() ? cfg.experiment : experiment;
            if (name.empty()) {
                err << "verify: no experiment given on the command line or in the config\n";
                return exit_code::usage;
            }
            return cmd_verify(name, cfg, out, err);
        }
        return cmd_rearrange(input, norm_text,
                             profile.empty() ? std::nullopt : std::optional<std::filesystem::path>(profile), out, err);
    }
    catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    }
    catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::numerical;
    }
}

} // namespace vwslab
