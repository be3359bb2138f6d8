#pragma once
//
// Experiments: each reproduces one estimate or qualitative statement at desk
// scale and condenses it into an EstimateReport (measured ratios, per-mesh
// trend, verdict, raw table).
//
// The constants of the estimates are not constructive, so most experiments
// measure them as ratios and judge stability or independence under sweeps.
//

#include <vwslab/fields.hpp>
#include <vwslab/rearrange.hpp>
#include <vwslab/solver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace vwslab {

enum class Verdict { holds, holds_with_growth, violated };

[[nodiscard]] inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_with_growth: return "holds-with-growth";
    case Verdict::violated: return "violated";
    }
    return "violated";
}

struct EstimateReport
{
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;            // lhs / rhs on the finest mesh (or last sweep point)
    std::vector<int> meshes;
    std::vector<double> trend;     // one ratio per mesh or sweep point
    Verdict verdict = Verdict::violated;
    std::map<std::string, double> metrics;  // experiment-specific margins
    std::vector<std::string> columns;       // raw table
    std::vector<std::vector<double>> rows;
    std::string summary;
};

/// Data of one problem family, sampled afresh on every mesh.
struct ProblemSetup
{
    PotentialSpec potential;
    StreamSpec stream;
    RhsSpec rhs = RhsSpec::constant(1.0);
    double velocity_scale = 1.0;
    double boundary_value = 0.0;

    [[nodiscard]] ProblemSpec build(const MeshPtr& mesh, Mode mode) const
    {
        ProblemSpec s = ProblemSpec::make(mode, make_potential(mesh, potential),
                                          stream.velocity(mesh).scaled(velocity_scale), rhs.sample(mesh));
        if (boundary_value != 0.0)
            s.bc = constant_boundary(*mesh, boundary_value);
        return s;
    }
};

namespace detail {

inline void require_meshes(const std::vector<int>& meshes, std::size_t min_count, const char* where)
{
    if (meshes.size() < min_count)
        throw InvalidArgument(std::string(where) + ": needs at least " + std::to_string(min_count) + " meshes");
    if (!std::is_sorted(meshes.begin(), meshes.end()) ||
        std::adjacent_find(meshes.begin(), meshes.end()) != meshes.end())
        throw InvalidArgument(std::string(where) + ": meshes must be strictly increasing");
}

inline double spread(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

inline bool non_increasing(const std::vector<double>& v, double rel_tol = 1e-9)
{
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > v[i] * (1.0 + rel_tol) + rel_tol * std::numeric_limits<double>::min())
            return false;
    return true;
}

/// Stability verdict for a measured constant: holds when the trend stays in a
/// band of relative width `band` and does not grow, holds-with-growth when it
/// stays in the band but grows.
inline Verdict stability_verdict(const std::vector<double>& trend, double band)
{
    if (trend.empty() || !(spread(trend) <= 1.0 + band))
        return Verdict::violated;
    return non_increasing(trend, 1e-6) ? Verdict::holds : Verdict::holds_with_growth;
}

/// Per-doubling factor between two meshes.
inline double per_doubling(double coarse, double fine, int n_coarse, int n_fine)
{
    if (coarse <= 0.0)
        return fine <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(fine / coarse, 1.0 / std::log2(static_cast<double>(n_fine) / n_coarse));
}

inline double weighted_mass(const GridFunction& f, double alpha = 1.0)
{
    return integrate(abs(f), alpha == 1.0 ? distance_weight(f.mesh_ptr()) : distance_weight(f.mesh_ptr(), alpha));
}

/// Maximum-principle guard: with non-negative data the solution may dip below
/// zero only by solver noise.
inline double positivity_margin(const SolveReport& r)
{
    return r.solution.min() / std::max(1.0, r.solution.max_abs());
}

inline bool data_non_negative(const ProblemSpec& s)
{
    if (s.rhs.min() < 0.0)
        return false;
    for (double g : s.bc)
        if (g < 0.0)
            return false;
    return true;
}

inline constexpr double positivity_tol = 1e-9;

} // namespace detail

// ---------------------------------------------------------------------------
// dual L^∞ estimate
// ---------------------------------------------------------------------------

/// ‖φ‖_∞ / ‖T‖_{L^{1,1}} for the dual problem on each mesh and over the sweep
/// {V, 10V, 100V} × {u, 2u}. The ratio must stay within a factor `band` over
/// the sweep, never grow with V, and stay mesh-stable within 10%.
[[nodiscard]] inline EstimateReport verify_dual_linf(const ProblemSetup& setup, const std::vector<int>& meshes,
                                                     const SolveOptions& opts = {}, double band = 1.5)
{
    detail::require_meshes(meshes, 1, "verify_dual_linf");
    EstimateReport rep;
    rep.name = "dual_linf";
    rep.meshes = meshes;
    rep.columns = {"n", "V_scale", "u_scale", "phi_linf", "T_lorentz_1_1", "ratio", "phi_min"};

    const NormSpec tnorm = NormSpec::lorentz(space_dim / 2.0, 1.0);
    bool positive = true, monotone_in_v = true;
    double worst_spread = 1.0, worst_min = std::numeric_limits<double>::infinity();
    for (int n : meshes) {
        const auto mesh = build_mesh(n);
        const auto base = setup.build(mesh, Mode::dual);
        const double tn = norm(base.rhs, tnorm);
        if (!(tn > 0.0))
            throw InvalidArgument("verify_dual_linf: T must not vanish");
        std::vector<double> sweep;
        for (double us : {1.0, 2.0}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double vs : {1.0, 10.0, 100.0}) {
                ProblemSpec s = base;
                s.V = base.V * vs;
                s.u = base.u.scaled(us);
                const auto r = solve(s, opts);
                const double phi = r.solution.max_abs();
                const double ratio = phi / tn;
                rep.rows.push_back({double(n), vs, us, phi, tn, ratio, r.solution.min()});
                sweep.push_back(ratio);
                if (ratio > prev * (1.0 + 1e-9))
                    monotone_in_v = false;
                prev = ratio;
                if (detail::data_non_negative(s)) {
                    worst_min = std::min(worst_min, r.solution.min());
                    if (r.solution.min() < -detail::positivity_tol)
                        positive = false;
                }
                if (vs == 1.0 && us == 1.0) {
                    rep.trend.push_back(ratio);
                    rep.lhs = phi;
                    rep.rhs = tn;
                    rep.ratio = ratio;
                }
            }
        }
        worst_spread = std::max(worst_spread, detail::spread(sweep));
    }
    rep.metrics["sweep_spread"] = worst_spread;
    rep.metrics["mesh_spread"] = detail::spread(rep.trend);
    rep.metrics["monotone_in_V"] = monotone_in_v ? 1.0 : 0.0;
    rep.metrics["min_phi"] = worst_min;

    const bool mesh_ok = meshes.size() < 2 || detail::spread(rep.trend) <= 1.1;
    rep.verdict = positive && monotone_in_v && worst_spread <= band && mesh_ok ? Verdict::holds : Verdict::violated;
    char buf[160];
    std::snprintf(buf, sizeof buf, "ratio %.6g, sweep spread %.4f, mesh spread %.4f, min phi %.3g", rep.ratio,
                  worst_spread, rep.metrics["mesh_spread"], worst_min);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// weak-Lorentz estimate for the primal solution
// ---------------------------------------------------------------------------

/// ‖ω‖_{L^{2,∞}} / ∫|f|δ on each mesh; stable within `band`.
[[nodiscard]] inline EstimateReport verify_weak_lorentz(const ProblemSetup& setup, const std::vector<int>& meshes,
                                                        const SolveOptions& opts = {}, double band = 0.1)
{
    detail::require_meshes(meshes, 2, "verify_weak_lorentz");
    EstimateReport rep;
    rep.name = "weak_lorentz";
    rep.meshes = meshes;
    rep.columns = {"n", "omega_lorentz_2_inf", "f_l1_delta", "ratio", "omega_min"};
    bool positive = true;
    for (int n : meshes) {
        const auto mesh = build_mesh(n);
        const auto spec = setup.build(mesh, Mode::primal);
        const auto r = solve(spec, opts);
        const double lhs = norm(r.solution, NormSpec::lorentz(2.0, std::numeric_limits<double>::infinity()));
        const double rhs = detail::weighted_mass(spec.rhs);
        if (!(rhs > 0.0))
            throw InvalidArgument("verify_weak_lorentz: f must have positive weighted mass");
        rep.rows.push_back({double(n), lhs, rhs, lhs / rhs, r.solution.min()});
        rep.trend.push_back(lhs / rhs);
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.ratio = lhs / rhs;
        if (detail::data_non_negative(spec) && r.solution.min() < -detail::positivity_tol)
            positive = false;
    }
    rep.metrics["mesh_spread"] = detail::spread(rep.trend);
    rep.verdict = positive ? detail::stability_verdict(rep.trend, band) : Verdict::violated;
    char buf[128];
    std::snprintf(buf, sizeof buf, "K0 estimate %.6g, mesh spread %.4f", rep.ratio, rep.metrics["mesh_spread"]);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// weighted potential bound along the truncation ladder
// ---------------------------------------------------------------------------

/// ∫V_kω_kδ / ((1 + ‖u‖_{L^{2,1}})∫|f|δ) along V_k = min(V, k) on one mesh.
/// Holds when the ratio stays at most 1 and is monotone in k.
[[nodiscard]] inline EstimateReport verify_weighted_potential_bound(const ProblemSetup& setup, int n,
                                                                    std::vector<double> k_list = {},
                                                                    const SolveOptions& opts = {})
{
    if (k_list.empty())
        k_list = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    const auto mesh = build_mesh(n);
    const auto spec = setup.build(mesh, Mode::primal);
    for (double v : spec.rhs.values())
        if (v < 0.0)
            throw InvalidArgument("verify_weighted_potential_bound: f must be non-negative");
    EstimateReport rep;
    rep.name = "weighted_potential_bound";
    rep.meshes = {n};
    rep.columns = {"k", "V_omega_l1_delta", "rhs", "ratio"};

    const double unorm = norm(spec.u.magnitude(), NormSpec::lorentz(2.0, 1.0));
    const double rhs = (1.0 + unorm) * detail::weighted_mass(spec.rhs);
    const auto ladder = truncation_ladder(spec, k_list, opts);
    const auto w = distance_weight(mesh);
    for (std::size_t i = 0; i < ladder.rungs.size(); ++i) {
        const auto Vk = truncate_potential(spec.V, k_list[i]);
        const double lhs = rhs > 0.0 ? integrate(Vk * ladder.rungs[i].solution, w) : 0.0;
        const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        rep.rows.push_back({k_list[i], lhs, rhs, ratio});
        rep.trend.push_back(ratio);
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.ratio = ratio;
    }
    bool up = true, down = true;
    for (std::size_t i = 0; i + 1 < rep.trend.size(); ++i) {
        up = up && rep.trend[i + 1] >= rep.trend[i] * (1.0 - 1e-9);
        down = down && rep.trend[i + 1] <= rep.trend[i] * (1.0 + 1e-9);
    }
    const double peak = *std::max_element(rep.trend.begin(), rep.trend.end());
    rep.metrics["max_ratio"] = peak;
    rep.metrics["monotone"] = (up || down) ? 1.0 : 0.0;
    rep.verdict = (up || down) && peak <= 1.0 + 1e-9 ? Verdict::holds : Verdict::violated;
    char buf[128];
    std::snprintf(buf, sizeof buf, "max ratio %.6g over %zu rungs, %s", peak, rep.trend.size(),
                  up ? "increasing" : (down ? "decreasing" : "not monotone"));
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// weighted gradient law and truncation energy
// ---------------------------------------------------------------------------

/// S(λ) = ∫_{|∇ω| > λ} δ dx on cell data.
[[nodiscard]] inline double weighted_level_measure(const GridFunction& grad_mag, double lambda)
{
    const Mesh& m = grad_mag.mesh();
    double s = 0.0;
    for (std::size_t c = 0; c < grad_mag.size(); ++c)
        if (grad_mag[c] > lambda)
            s += m.delta(c);
    return s * m.cell_measure();
}

/// ∫|∇T_k ω|²δ / (k ∫|f|δ)
[[nodiscard]] inline double truncation_energy_constant(const GridFunction& omega, const GridFunction& f, double k)
{
    const auto g = gradient_magnitude(truncate_solution(omega, k));
    const auto w = distance_weight(omega.mesh_ptr());
    return integrate(g * g, w) / (k * detail::weighted_mass(f));
}

struct WeightedGradientOptions
{
    double points_per_octave = 2.0;
    double depth_decades = 4.0;     // λ grid from max|∇ω| down this many decades
    double fit_decades = 2.0;       // width of the fitted range
    double agreement = 0.1;         // S_n vs S_2n relative agreement for a resolved λ
    std::vector<double> k_list{1.0, 2.0, 4.0, 8.0};
    double slope_target = -(1.0 + 1.0 / space_dim);
    double slope_slack = 0.2;
    double c0_band = 0.2;
};

/// Fits the slope of log S(λ) against log λ on the mesh-resolved range.
///
/// λ is resolved where S on meshes n and 2n agree within `agreement`. The fit
/// runs over `fit_decades` below the largest resolved λ. Also reports
/// sup λ^{3/2}S(λ)/∫|f|δ and the truncation-energy constants on mesh n.
[[nodiscard]] inline EstimateReport verify_weighted_gradient(const ProblemSetup& setup, int n,
                                                             const WeightedGradientOptions& wo = {},
                                                             const SolveOptions& opts = {})
{
    EstimateReport rep;
    rep.name = "weighted_gradient";
    rep.meshes = {n, 2 * n};
    const auto mesh = build_mesh(n), fine = build_mesh(2 * n);
    const auto spec = setup.build(mesh, Mode::primal);
    const auto spec_fine = setup.build(fine, Mode::primal);
    const auto sol = solve(spec, opts).solution;
    const auto sol_fine = solve(spec_fine, opts).solution;
    const auto g = gradient_magnitude(sol), g_fine = gradient_magnitude(sol_fine);
    const double mass = detail::weighted_mass(spec.rhs);

    const double gmax = g.max();
    rep.columns = {"lambda", "S_n", "S_2n", "lambda^p*S_n/mass", "resolved"};
    std::vector<double> lam, S;
    std::vector<bool> resolved;
    const double step = std::pow(2.0, -1.0 / wo.points_per_octave);
    double sup_scaled = 0.0;
    const double p = -wo.slope_target;
    for (double l = gmax * step; l > gmax * std::pow(10.0, -wo.depth_decades); l *= step) {
        const double s = weighted_level_measure(g, l), sf = weighted_level_measure(g_fine, l);
        const bool ok = s > 0.0 && sf > 0.0 && std::abs(s / sf - 1.0) <= wo.agreement;
        lam.push_back(l);
        S.push_back(s);
        resolved.push_back(ok);
        const double scaled = std::pow(l, p) * s / mass;
        sup_scaled = std::max(sup_scaled, scaled);
        rep.rows.push_back({l, s, sf, scaled, ok ? 1.0 : 0.0});
    }

    // largest resolved λ, then every resolved point within fit_decades below it
    double top = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i)
        if (resolved[i]) {
            top = lam[i];
            break;
        }
    double slope = std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    if (top > 0.0) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            if (!resolved[i] || lam[i] > top * (1 + 1e-12) || lam[i] < top * std::pow(10.0, -wo.fit_decades) * (1 - 1e-12))
                continue;
            const double x = std::log(lam[i]), y = std::log(S[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++used;
        }
        if (used >= 3) {
            const double k = static_cast<double>(used);
            slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        }
    }

    std::vector<double> c0;
    for (double k : wo.k_list) {
        c0.push_back(truncation_energy_constant(sol, spec.rhs, k));
        rep.trend.push_back(c0.back());
    }
    const double c0_spread = c0.empty() ? 1.0 : detail::spread(c0);

    rep.lhs = slope;
    rep.rhs = wo.slope_target + wo.slope_slack;
    rep.ratio = sup_scaled;
    rep.metrics["slope"] = slope;
    rep.metrics["fit_points"] = static_cast<double>(used);
    rep.metrics["lambda_top"] = top;
    rep.metrics["sup_scaled"] = sup_scaled;
    rep.metrics["c0_spread"] = c0_spread;
    for (std::size_t i = 0; i < c0.size(); ++i)
        rep.metrics["c0_k" + std::to_string(static_cast<int>(wo.k_list[i]))] = c0[i];

    const bool slope_ok = used >= 3 && slope <= wo.slope_target + wo.slope_slack;
    const bool smooth = gmax <= 0.0;
    rep.verdict = (smooth || slope_ok) && c0_spread <= 1.0 + wo.c0_band ? Verdict::holds : Verdict::violated;
    char buf[200];
    std::snprintf(buf, sizeof buf, "slope %.4f over %zu resolved points (lambda %.4g..%.4g), c0 spread %.4f", slope,
                  used, top * std::pow(10.0, -wo.fit_decades), top, c0_spread);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// local Kato inequality
// ---------------------------------------------------------------------------

struct KatoResult
{
    double violation = 0.0;  // max over ψ of (LHS − RHS)_+, both parts
    double scale = 0.0;      // max over ψ of ∫ψ|Lω|
    double min_margin = 0.0; // min over ψ of RHS − LHS (signed)
};

/// ∫ω₊L*ψ ≤ ∫ψ sign₊(ω)Lω and ∫|ω|L*ψ ≤ ∫ψ sign(ω)Lω for each ψ, with the
/// discrete L (primal, V = 0) and L* (dual) of the solver; ω continued by
/// zero across ∂Ω.
[[nodiscard]] inline KatoResult kato_defect(const GridFunction& omega, const VectorField& u,
                                            const std::vector<GridFunction>& psi_set)
{
    const auto& mesh = omega.mesh_ptr();
    const GridFunction zero(mesh, 0.0);
    const auto Lp = assemble(ProblemSpec::make(Mode::primal, zero, u, zero)).matrix;
    const auto Ld = assemble(ProblemSpec::make(Mode::dual, zero, u, zero)).matrix;
    const auto Lw = Lp * omega.values();
    const double cm = mesh->cell_measure();

    KatoResult res;
    res.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& psi : psi_set) {
        require_same_mesh(psi, omega, "kato_defect");
        if (psi.min() < 0.0)
            throw InvalidArgument("kato_defect: test functions must be non-negative");
        const auto Lpsi = Ld * psi.values();
        double l1 = 0, r1 = 0, l2 = 0, r2 = 0, sc = 0;
        for (std::size_t c = 0; c < omega.size(); ++c) {
            const double w = omega[c];
            const double sp = w > 0.0 ? 1.0 : 0.0;
            const double sg = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
            l1 += std::max(w, 0.0) * Lpsi[c];
            r1 += psi[c] * sp * Lw[c];
            l2 += std::abs(w) * Lpsi[c];
            r2 += psi[c] * sg * Lw[c];
            sc += psi[c] * std::abs(Lw[c]);
        }
        const double m = std::min(r1 - l1, r2 - l2) * cm;
        res.min_margin = std::min(res.min_margin, m);
        res.violation = std::max(res.violation, -m);
        res.scale = std::max(res.scale, sc * cm);
    }
    return res;
}

/// `count` bumps with centers in [0.3, 0.7]², radii in [0.08, 0.18], each
/// multiplied by the boundary cutoff h_ε with ε = 0.2.
[[nodiscard]] inline std::vector<GridFunction> kato_test_functions(const MeshPtr& mesh, int count, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> pos(0.3, 0.7), rad(0.08, 0.18);
    const auto cut = make_cutoff(mesh, 0.2).values;
    std::vector<GridFunction> out;
    for (int k = 0; k < count; ++k) {
        const double cx = pos(gen), cy = pos(gen), r = rad(gen);
        auto b = GridFunction::sample(mesh, [&](double x, double y) {
            const double q = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
            return q < 1.0 ? (1.0 - q) * (1.0 - q) * (1.0 - q) : 0.0;
        });
        out.push_back(b * cut);
    }
    return out;
}

struct KatoOptions
{
    int bumps = 5;
    unsigned seed = 12345;
    double decay = 0.8;       // required per-doubling factor
    double floor = 1e-11;     // relative violations below this are roundoff
    double final_bound = 1e-2;
};

/// Refinement study of the Kato defect for ω(x, y) and the velocity of `stream`.
[[nodiscard]] inline EstimateReport verify_kato(const std::function<double(double, double)>& omega,
                                                const StreamSpec& stream, const std::vector<int>& meshes,
                                                const KatoOptions& ko = {})
{
    detail::require_meshes(meshes, 3, "verify_kato");
    EstimateReport rep;
    rep.name = "kato";
    rep.meshes = meshes;
    rep.columns = {"n", "violation", "scale", "relative", "margin"};
    for (int n : meshes) {
        const auto mesh = build_mesh(n);
        const auto w = GridFunction::sample(mesh, omega);
        const auto psi = kato_test_functions(mesh, ko.bumps, ko.seed);
        const auto res = kato_defect(w, stream.velocity(mesh), psi);
        const double rel = res.scale > 0.0 ? res.violation / res.scale : 0.0;
        rep.rows.push_back({double(n), res.violation, res.scale, rel, res.min_margin});
        rep.trend.push_back(rel);
        rep.lhs = res.violation;
        rep.rhs = res.scale;
        rep.ratio = rel;
    }
    bool decays = true;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < rep.trend.size(); ++i) {
        const double f = detail::per_doubling(rep.trend[i], rep.trend[i + 1], meshes[i], meshes[i + 1]);
        const bool noise = rep.trend[i + 1] <= ko.floor;
        if (!noise) {
            worst = std::max(worst, f);
            decays = decays && f <= ko.decay;
        }
    }
    rep.metrics["worst_per_doubling"] = worst;
    rep.metrics["final_relative"] = rep.ratio;
    rep.verdict = decays && rep.ratio <= ko.final_bound ? Verdict::holds : Verdict::violated;
    char buf[128];
    std::snprintf(buf, sizeof buf, "relative violation %.3g on n=%d, worst per-doubling factor %.3f", rep.ratio,
                  meshes.back(), worst);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// uniqueness without boundary condition
// ---------------------------------------------------------------------------

/// Solves the primal problem with V = c·δ^{−r} for every boundary value in
/// g_list and measures ∫|ω_g − ω_{g'}|δ and the gap on {δ > 1/4}, maximized
/// over pairs. Uniqueness holds when the weighted gap shrinks by at least
/// `decay` per mesh doubling.
[[nodiscard]] inline EstimateReport experiment_no_bc_uniqueness(double c, double r, const ProblemSetup& setup,
                                                                const std::vector<double>& g_list,
                                                                const std::vector<int>& meshes,
                                                                const SolveOptions& opts = {}, double decay = 0.7)
{
    detail::require_meshes(meshes, 3, "experiment_no_bc_uniqueness");
    if (!(r > 0.0))
        throw InvalidArgument("experiment_no_bc_uniqueness: r must be positive");
    if (std::find(g_list.begin(), g_list.end(), 0.0) == g_list.end() ||
        std::find(g_list.begin(), g_list.end(), 1.0) == g_list.end())
        throw InvalidArgument("experiment_no_bc_uniqueness: g_list must contain 0 and 1");

    EstimateReport rep;
    rep.name = "no_bc_uniqueness";
    rep.meshes = meshes;
    rep.columns = {"n", "weighted_gap", "interior_gap", "weighted_ratio", "interior_ratio"};
    std::vector<double> wgap, igap;
    bool positive = true;
    for (int n : meshes) {
        const auto mesh = build_mesh(n);
        ProblemSetup s = setup;
        s.potential = PotentialSpec::power(c, r);
        std::vector<GridFunction> sols;
        for (double g : g_list) {
            s.boundary_value = g;
            const auto spec = s.build(mesh, Mode::primal);
            const auto rs = solve(spec, opts);
            if (detail::data_non_negative(spec) && rs.solution.min() < -detail::positivity_tol)
                positive = false;
            sols.push_back(rs.solution);
        }
        const auto w = distance_weight(mesh);
        double wg = 0.0, ig = 0.0;
        for (std::size_t a = 0; a < sols.size(); ++a)
            for (std::size_t b = a + 1; b < sols.size(); ++b) {
                const auto d = abs(sols[a] - sols[b]);
                wg = std::max(wg, integrate(d, w));
                double in = 0.0;
                for (std::size_t k = 0; k < d.size(); ++k)
                    if (mesh->delta(k) > 0.25)
                        in += d[k];
                ig = std::max(ig, in * mesh->cell_measure());
            }
        wgap.push_back(wg);
        igap.push_back(ig);
    }
    double worst_w = 0.0, min_i = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < meshes.size(); ++i) {
        double rw = 0.0, ri = 0.0;
        if (i > 0) {
            rw = detail::per_doubling(wgap[i - 1], wgap[i], meshes[i - 1], meshes[i]);
            ri = detail::per_doubling(igap[i - 1], igap[i], meshes[i - 1], meshes[i]);
            rep.trend.push_back(rw);
            worst_w = std::max(worst_w, rw);
            min_i = std::min(min_i, ri);
        }
        rep.rows.push_back({double(meshes[i]), wgap[i], igap[i], rw, ri});
    }
    rep.lhs = wgap.back();
    rep.rhs = wgap.front();
    rep.ratio = worst_w;
    rep.metrics["worst_weighted_ratio"] = worst_w;
    rep.metrics["min_interior_ratio"] = min_i;
    rep.metrics["final_weighted_gap"] = wgap.back();
    rep.metrics["final_interior_gap"] = igap.back();
    rep.verdict = positive && worst_w <= decay ? Verdict::holds : Verdict::violated;
    char buf[200];
    std::snprintf(buf, sizeof buf, "r=%g: weighted gap per-doubling ratio <= %.4f, interior ratio >= %.4f", r, worst_w,
                  min_i);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// L^{N'} bound and blow-up
// ---------------------------------------------------------------------------

/// ‖ω‖_{L²} / ∫|f|δ(1 + |ln δ|)^{1/2} with V = 0; stable within `band`.
[[nodiscard]] inline EstimateReport experiment_lnprime_bound(const ProblemSetup& setup,
                                                             const std::vector<int>& meshes,
                                                             const SolveOptions& opts = {}, double band = 0.1)
{
    detail::require_meshes(meshes, 2, "experiment_lnprime_bound");
    if (setup.potential.kind != PotentialSpec::Kind::zero)
        throw InvalidArgument("experiment_lnprime_bound: requires V = 0");
    EstimateReport rep;
    rep.name = "lnprime_bound";
    rep.meshes = meshes;
    rep.columns = {"n", "omega_l2", "f_l1_delta_log", "ratio"};
    for (int n : meshes) {
        const auto mesh = build_mesh(n);
        const auto spec = setup.build(mesh, Mode::primal);
        const auto r = solve(spec, opts);
        const double lhs = l2_norm(r.solution);
        const double rhs = integrate(abs(spec.rhs), RhsSpec::weight(mesh, RhsSpec::Normalization::delta_log));
        rep.rows.push_back({double(n), lhs, rhs, lhs / rhs});
        rep.trend.push_back(lhs / rhs);
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.ratio = lhs / rhs;
    }
    rep.metrics["mesh_spread"] = detail::spread(rep.trend);
    rep.verdict = detail::stability_verdict(rep.trend, band);
    char buf[128];
    std::snprintf(buf, sizeof buf, "K12 estimate %.6g, mesh spread %.4f", rep.ratio, rep.metrics["mesh_spread"]);
    rep.summary = buf;
    return rep;
}

/// Mesh size resolving a boundary bump at distance d (h <= d/4), at least `min_n`.
[[nodiscard]] inline int resolving_mesh(double d, int min_n = 64)
{
    return std::max(min_n, static_cast<int>(std::ceil(4.0 / d - 1e-9)));
}

/// Boundary bumps f_d at distance d, once with ∫f_dδ = 1 (norms must grow
/// strictly as d shrinks) and once with ∫f_dδ(1 + |ln δ|)^{1/2} = 1 (norms
/// must stay within a factor `bounded_band`). Each d is solved on a mesh with
/// h <= d/4, at least `min_n`; pass min_n = 0 with `fixed_n` to use one mesh.
[[nodiscard]] inline EstimateReport experiment_lnprime_blowup(const std::vector<double>& d_list,
                                                              const StreamSpec& stream, int min_n = 64,
                                                              int fixed_n = 0, const SolveOptions& opts = {},
                                                              double bounded_band = 0.3)
{
    if (d_list.size() < 3)
        throw InvalidArgument("experiment_lnprime_blowup: needs at least 3 distances");
    for (std::size_t i = 0; i + 1 < d_list.size(); ++i)
        if (!(d_list[i + 1] < d_list[i]))
            throw InvalidArgument("experiment_lnprime_blowup: d_list must be strictly decreasing");
    EstimateReport rep;
    rep.name = "lnprime_blowup";
    rep.columns = {"d", "n", "l2_delta_normalized", "l2_log_normalized", "log_weighted_mass"};
    std::vector<double> grow, bounded;
    for (double d : d_list) {
        const int n = fixed_n > 0 ? fixed_n : resolving_mesh(d, min_n);
        const auto mesh = build_mesh(n);
        const auto u = stream.velocity(mesh);
        const GridFunction zero(mesh, 0.0);
        const auto fd = RhsSpec::boundary_bump(d, RhsSpec::Normalization::delta).sample(mesh);
        const auto fl = RhsSpec::boundary_bump(d, RhsSpec::Normalization::delta_log).sample(mesh);
        const double a = l2_norm(solve(ProblemSpec::make(Mode::primal, zero, u, fd), opts).solution);
        const double b = l2_norm(solve(ProblemSpec::make(Mode::primal, zero, u, fl), opts).solution);
        const double logmass = integrate(fd, RhsSpec::weight(mesh, RhsSpec::Normalization::delta_log));
        rep.meshes.push_back(n);
        rep.rows.push_back({d, double(n), a, b, logmass});
        grow.push_back(a);
        bounded.push_back(b);
    }
    rep.trend = grow;
    bool strict = true;
    double min_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grow.size(); ++i) {
        strict = strict && grow[i + 1] > grow[i];
        min_step = std::min(min_step, grow[i + 1] / grow[i]);
    }
    const double band = detail::spread(bounded);
    rep.lhs = grow.back();
    rep.rhs = grow.front();
    rep.ratio = grow.back() / grow.front();
    rep.metrics["min_growth_step"] = min_step;
    rep.metrics["log_normalized_spread"] = band;
    rep.verdict = strict && band <= 1.0 + bounded_band ? Verdict::holds : Verdict::violated;
    char buf[200];
    std::snprintf(buf, sizeof buf, "delta-normalized L2 grows x%.4f (min step x%.4f); log-normalized spread %.4f",
                  rep.ratio, min_step, band);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// gradient regularity
// ---------------------------------------------------------------------------

/// ‖∇ω‖_{L^{p,p}}, p = 2/(1 + α), over (1 + ‖u‖_{L^{2/(1−α)}})∫|f|δ^α; for
/// α = 0 the gradient norm is L^{2,∞}. V = 0. Stable within `band`.
[[nodiscard]] inline EstimateReport experiment_gradient_regularity(double alpha, const ProblemSetup& setup,
                                                                   const std::vector<int>& meshes,
                                                                   const SolveOptions& opts = {}, double band = 0.1)
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw InvalidArgument("experiment_gradient_regularity: alpha must lie in [0, 1)");
    if (setup.potential.kind != PotentialSpec::Kind::zero)
        throw InvalidArgument("experiment_gradient_regularity: requires V = 0");
    detail::require_meshes(meshes, 2, "experiment_gradient_regularity");
    const double p = space_dim / (space_dim - 1.0 + alpha);
    const NormSpec gnorm = alpha == 0.0 ? NormSpec::lorentz(2.0, std::numeric_limits<double>::infinity())
                                        : NormSpec::lorentz(p, p);
    const double q = space_dim / (1.0 - alpha);

    EstimateReport rep;
    rep.name = "gradient_regularity";
    rep.meshes = meshes;
    rep.columns = {"n", "grad_norm", "u_norm", "f_l1_delta_alpha", "ratio"};
    for (int n : meshes) {
        const auto mesh = build_mesh(n);
        const auto spec = setup.build(mesh, Mode::primal);
        const auto r = solve(spec, opts);
        const double lhs = norm(gradient_magnitude(r.solution), gnorm);
        const double un = profile_lp_norm(decreasing_rearrangement(spec.u.magnitude()), q);
        const double mass = alpha == 0.0 ? integrate(abs(spec.rhs)) : detail::weighted_mass(spec.rhs, alpha);
        const double rhs = (1.0 + un) * mass;
        rep.rows.push_back({double(n), lhs, un, mass, lhs / rhs});
        rep.trend.push_back(lhs / rhs);
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.ratio = lhs / rhs;
    }
    rep.metrics["mesh_spread"] = detail::spread(rep.trend);
    rep.metrics["alpha"] = alpha;
    rep.verdict = detail::stability_verdict(rep.trend, band);
    char buf[128];
    std::snprintf(buf, sizeof buf, "alpha=%g: ratio %.6g, mesh spread %.4f", alpha, rep.ratio,
                  rep.metrics["mesh_spread"]);
    rep.summary = buf;
    return rep;
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

/// Parameters shared by all experiments; each reads the fields it needs.
struct ExperimentParams
{
    ProblemSetup setup;
    std::vector<int> meshes{64, 128, 256};
    SolveOptions solve;
    double c = 1.0;
    double r = 3.0;
    double alpha = 0.0;
    std::vector<double> g_list{0.0, 1.0};
    std::vector<double> d_list{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    std::vector<double> k_list;  // ladder (weighted_potential_bound) or truncation levels (weighted_gradient)
    KatoOptions kato;
};

using Experiment = std::function<EstimateReport(const ExperimentParams&)>;

[[nodiscard]] inline const std::map<std::string, Experiment>& experiment_registry()
{
    static const std::map<std::string, Experiment> reg = {
        {"dual_linf", [](const ExperimentParams& p) { return verify_dual_linf(p.setup, p.meshes, p.solve); }},
        {"weak_lorentz", [](const ExperimentParams& p) { return verify_weak_lorentz(p.setup, p.meshes, p.solve); }},
        {"weighted_potential_bound",
         [](const ExperimentParams& p) {
             return verify_weighted_potential_bound(p.setup, p.meshes.back(), p.k_list, p.solve);
         }},
        {"weighted_gradient",
         [](const ExperimentParams& p) {
             WeightedGradientOptions wo;
             if (!p.k_list.empty())
                 wo.k_list = p.k_list;
             return verify_weighted_gradient(p.setup, p.meshes.back(), wo, p.solve);
         }},
        {"kato",
         [](const ExperimentParams& p) {
             const double pi = std::numbers::pi;
             return verify_kato([pi](double x, double y) { return std::sin(2 * pi * x) * std::sin(pi * y); },
                                p.setup.stream, p.meshes, p.kato);
         }},
        {"no_bc_uniqueness",
         [](const ExperimentParams& p) {
             return experiment_no_bc_uniqueness(p.c, p.r, p.setup, p.g_list, p.meshes, p.solve);
         }},
        {"lnprime_bound", [](const ExperimentParams& p) { return experiment_lnprime_bound(p.setup, p.meshes, p.solve); }},
        {"lnprime_blowup",
         [](const ExperimentParams& p) {
             return experiment_lnprime_blowup(p.d_list, p.setup.stream, p.meshes.front(), 0, p.solve);
         }},
        {"gradient_regularity",
         [](const ExperimentParams& p) {
             return experiment_gradient_regularity(p.alpha, p.setup, p.meshes, p.solve);
         }},
    };
    return reg;
}

/// Runs a registered experiment; unknown names raise InvalidArgument.
[[nodiscard]] inline EstimateReport run_experiment(const std::string& name, const ExperimentParams& params)
{
    const auto& reg = experiment_registry();
    const auto it = reg.find(name);
    if (it == reg.end())
        throw InvalidArgument("unknown experiment '" + name + "'");
    return it->second(params);
}

} // namespace vwslab
