#pragma once
//
// Run configuration: one JSON document per run. Every spec is validated
// against its constructor before anything is solved; errors name the field.
//
// {
//   "experiment": "no_bc_uniqueness",     // verify only
//   "mode": "primal",                     // solve only: primal | dual
//   "n": 64,                              // solve mesh (default: last of "meshes")
//   "meshes": [64, 128, 256],
//   "potential": {"kind": "power", "c": 1, "r": 3},
//   "stream": {"kind": "poly", "amplitude": 1, "exponent": 1, "scale": 1},
//   "rhs": {"kind": "constant", "amplitude": 1},
//   "bc": 0,
//   "solver": {"tol": 1e-10, "max_iterations": 20000, "method": "auto", "direct_max_n": 64},
//   "params": {"c": 1, "r": 3, "alpha": 0, "g_list": [0, 1], "d_list": [...], "k_list": [...]},
//   "output_dir": "out"
// }
//

#include <vwslab/fields.hpp>
#include <vwslab/solver.hpp>
#include <vwslab/verify.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vwslab {

class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field)
    {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig
{
    std::string experiment;
    Mode mode = Mode::primal;
    std::optional<int> n;
    ExperimentParams params;
    std::filesystem::path output_dir = "out";
    nlohmann::json source;  // normalized document, hashed for the manifest

    [[nodiscard]] int solve_mesh() const { return n ? *n : params.meshes.back(); }
};

namespace detail {

using nlohmann::json;

inline double get_number(const json& j, const std::string& key, const std::string& path, double fallback)
{
    if (!j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(path + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError(path + "." + key, "must be finite");
    return d;
}

inline std::string get_string(const json& j, const std::string& key, const std::string& path,
                              const std::string& fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_string())
        throw ConfigError(path + "." + key, "expected a string");
    return j.at(key).get<std::string>();
}

inline std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& path,
                                       std::vector<double> fallback)
{
    if (!j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (!v.is_array())
        throw ConfigError(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ConfigError(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline int mesh_size(double v, const std::string& field)
{
    if (v != std::floor(v) || v < 4 || v > 8192)
        throw ConfigError(field, "mesh size must be an integer in [4, 8192]");
    return static_cast<int>(v);
}

inline PotentialSpec parse_potential(const json& j)
{
    const std::string path = "potential";
    const auto kind = get_string(j, "kind", path, "zero");
    const double c = get_number(j, "c", path, 1.0);
    const double r = get_number(j, "r", path, 0.0);
    if (c < 0.0)
        throw ConfigError(path + ".c", "potential coefficient must be >= 0 (V must be non-negative)");
    if (r < 0.0)
        throw ConfigError(path + ".r", "exponent must be >= 0");
    if (kind == "zero") return PotentialSpec::zero();
    if (kind == "bounded") return PotentialSpec::bounded(c);
    if (kind == "power") return PotentialSpec::power(c, r);
    throw ConfigError(path + ".kind", "unknown potential '" + kind + "' (zero, bounded, power)");
}

inline StreamSpec parse_stream(const json& j, double& scale)
{
    const std::string path = "stream";
    StreamSpec s;
    const auto kind = get_string(j, "kind", path, "zero");
    if (kind == "zero") s.kind = StreamSpec::Kind::zero;
    else if (kind == "poly") s.kind = StreamSpec::Kind::poly;
    else if (kind == "sine") s.kind = StreamSpec::Kind::sine;
    else if (kind == "poly_power") s.kind = StreamSpec::Kind::poly_power;
    else throw ConfigError(path + ".kind", "unknown stream '" + kind + "' (zero, poly, sine, poly_power)");
    s.amplitude = get_number(j, "amplitude", path, 1.0);
    s.exponent = get_number(j, "exponent", path, 1.0);
    if (s.kind == StreamSpec::Kind::poly_power && !(s.exponent > 0.5))
        throw ConfigError(path + ".exponent", "must exceed 1/2");
    scale = get_number(j, "scale", path, 1.0);
    return s;
}

inline RhsSpec parse_rhs(const json& j)
{
    const std::string path = "rhs";
    const auto kind = get_string(j, "kind", path, "constant");
    const double amp = get_number(j, "amplitude", path, 1.0);
    RhsSpec s;
    if (kind == "constant") s = RhsSpec::constant(amp);
    else if (kind == "sine") s = RhsSpec::sine(amp);
    else if (kind == "bump") {
        const auto c = get_numbers(j, "center", path, {0.5, 0.5});
        if (c.size() != 2)
            throw ConfigError(path + ".center", "expected [x, y]");
        const double radius = get_number(j, "radius", path, 0.1);
        if (!(radius > 0.0))
            throw ConfigError(path + ".radius", "must be positive");
        s = RhsSpec::bump({c[0], c[1]}, radius, amp);
    }
    else if (kind == "boundary_bump") {
        const double d = get_number(j, "distance", path, 0.125);
        if (!(d > 0.0 && d <= 0.25))
            throw ConfigError(path + ".distance", "must lie in (0, 1/4]");
        s = RhsSpec::boundary_bump(d, RhsSpec::Normalization::none, get_number(j, "x0", path, 0.5));
        s.amplitude = amp;
    }
    else if (kind == "delta_power") {
        s.kind = RhsSpec::Kind::delta_power;
        s.amplitude = amp;
    }
    else if (kind == "indicator") {
        const auto b = get_numbers(j, "box", path, {0.0, 1.0, 0.0, 1.0});
        if (b.size() != 4)
            throw ConfigError(path + ".box", "expected [x0, x1, y0, y1]");
        s.kind = RhsSpec::Kind::indicator;
        s.amplitude = amp;
        s.box = {b[0], b[1], b[2], b[3]};
    }
    else
        throw ConfigError(path + ".kind",
                          "unknown rhs '" + kind + "' (constant, sine, bump, boundary_bump, delta_power, indicator)");
    s.exponent = get_number(j, "exponent", path, 0.0);
    const auto nz = get_string(j, "normalize", path, kind == "boundary_bump" ? "delta" : "none");
    if (nz == "none") s.normalize = RhsSpec::Normalization::none;
    else if (nz == "delta") s.normalize = RhsSpec::Normalization::delta;
    else if (nz == "delta_log") s.normalize = RhsSpec::Normalization::delta_log;
    else throw ConfigError(path + ".normalize", "unknown normalization '" + nz + "' (none, delta, delta_log)");
    return s;
}

inline SolveOptions parse_solver(const json& j)
{
    const std::string path = "solver";
    SolveOptions o;
    o.tol = get_number(j, "tol", path, o.tol);
    if (!(o.tol > 0.0 && o.tol < 1.0))
        throw ConfigError(path + ".tol", "must lie in (0, 1)");
    const double it = get_number(j, "max_iterations", path, o.max_iterations);
    if (it < 1 || it != std::floor(it))
        throw ConfigError(path + ".max_iterations", "must be a positive integer");
    o.max_iterations = static_cast<int>(it);
    const auto m = get_string(j, "method", path, "auto");
    if (m == "auto") o.method = SolverMethod::automatic;
    else if (m == "direct") o.method = SolverMethod::direct;
    else if (m == "iterative") o.method = SolverMethod::iterative;
    else throw ConfigError(path + ".method", "unknown method '" + m + "' (auto, direct, iterative)");
    o.direct_max_n = static_cast<int>(get_number(j, "direct_max_n", path, o.direct_max_n));
    return o;
}

inline const json& section(const json& doc, const char* key)
{
    static const json empty = json::object();
    if (!doc.contains(key))
        return empty;
    if (!doc.at(key).is_object())
        throw ConfigError(key, "expected an object");
    return doc.at(key);
}

} // namespace detail

/// Builds and validates a RunConfig from a parsed JSON document.
[[nodiscard]] inline RunConfig parse_config(const nlohmann::json& doc)
{
    using namespace detail;
    if (!doc.is_object())
        throw ConfigError("(root)", "expected a JSON object");
    RunConfig cfg;
    cfg.source = doc;
    cfg.experiment = get_string(doc, "experiment", "(root)", "");
    const auto mode = get_string(doc, "mode", "(root)", "primal");
    if (mode == "primal") cfg.mode = Mode::primal;
    else if (mode == "dual") cfg.mode = Mode::dual;
    else throw ConfigError("mode", "expected 'primal' or 'dual'");

    if (doc.contains("meshes")) {
        const auto ms = get_numbers(doc, "meshes", "(root)", {});
        if (ms.empty())
            throw ConfigError("meshes", "must not be empty");
        cfg.params.meshes.clear();
        for (std::size_t i = 0; i < ms.size(); ++i)
            cfg.params.meshes.push_back(mesh_size(ms[i], "meshes[" + std::to_string(i) + "]"));
        for (std::size_t i = 0; i + 1 < cfg.params.meshes.size(); ++i)
            if (cfg.params.meshes[i + 1] <= cfg.params.meshes[i])
                throw ConfigError("meshes", "must be strictly increasing");
    }
    if (doc.contains("n"))
        cfg.n = mesh_size(get_number(doc, "n", "(root)", 0), "n");

    auto& setup = cfg.params.setup;
    setup.potential = parse_potential(section(doc, "potential"));
    setup.stream = parse_stream(section(doc, "stream"), setup.velocity_scale);
    setup.rhs = parse_rhs(section(doc, "rhs"));
    setup.boundary_value = get_number(doc, "bc", "(root)", 0.0);
    cfg.params.solve = parse_solver(section(doc, "solver"));

    const auto& p = section(doc, "params");
    cfg.params.c = get_number(p, "c", "params", cfg.params.c);
    cfg.params.r = get_number(p, "r", "params", cfg.params.r);
    if (cfg.params.c < 0.0)
        throw ConfigError("params.c", "must be >= 0 (V must be non-negative)");
    if (!(cfg.params.r > 0.0))
        throw ConfigError("params.r", "must be positive");
    cfg.params.alpha = get_number(p, "alpha", "params", cfg.params.alpha);
    if (!(cfg.params.alpha >= 0.0 && cfg.params.alpha < 1.0))
        throw ConfigError("params.alpha", "must lie in [0, 1)");
    cfg.params.g_list = get_numbers(p, "g_list", "params", cfg.params.g_list);
    cfg.params.d_list = get_numbers(p, "d_list", "params", cfg.params.d_list);
    cfg.params.k_list = get_numbers(p, "k_list", "params", cfg.params.k_list);
    for (std::size_t i = 0; i < cfg.params.d_list.size(); ++i)
        if (!(cfg.params.d_list[i] > 0.0 && cfg.params.d_list[i] <= 0.25))
            throw ConfigError("params.d_list[" + std::to_string(i) + "]", "must lie in (0, 1/4]");
    for (std::size_t i = 0; i < cfg.params.k_list.size(); ++i)
        if (!(cfg.params.k_list[i] > 0.0))
            throw ConfigError("params.k_list[" + std::to_string(i) + "]", "must be positive");
    cfg.params.kato.bumps = static_cast<int>(get_number(p, "bumps", "params", cfg.params.kato.bumps));
    cfg.params.kato.seed = static_cast<unsigned>(get_number(p, "seed", "params", cfg.params.kato.seed));
    if (cfg.params.kato.bumps < 1)
        throw ConfigError("params.bumps", "must be at least 1");

    cfg.output_dir = get_string(doc, "output_dir", "(root)", "out");
    return cfg;
}

[[nodiscard]] inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config", "cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace vwslab
