#pragma once
//
// Discrete primal problem  −Δω + u·∇ω + Vω = f  and dual problem
// −Δφ − u·∇φ + Vφ = T  on the cell-centered grid, with Dirichlet data
// eliminated through ghost values, and the truncated-potential ladder.
//
// Convection is centered where the cell Péclet number |u|h/2 is at most one
// and first-order upwind elsewhere; either way every off-diagonal entry is
// non-positive, so the operator is an M-matrix and the discrete maximum
// principle holds.
//

#include <vwslab/difference.hpp>
#include <vwslab/fields.hpp>
#include <vwslab/mesh.hpp>
#include <vwslab/rearrange.hpp>
#include <vwslab/sparse.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace vwslab {

enum class Mode { primal, dual };

struct ProblemSpec
{
    Mode mode = Mode::primal;
    GridFunction V;
    VectorField u;
    GridFunction rhs;
    BoundaryData bc;  // one value per boundary face; empty means homogeneous

    [[nodiscard]] const MeshPtr& mesh_ptr() const { return rhs.mesh_ptr(); }

    /// Homogeneous-Dirichlet problem with the given data.
    static ProblemSpec make(Mode mode, GridFunction V, VectorField u, GridFunction rhs)
    {
        return {mode, std::move(V), std::move(u), std::move(rhs), {}};
    }

    void validate() const
    {
        require_same_mesh(rhs, V, "ProblemSpec");
        require_same_mesh(rhs, u.ux, "ProblemSpec");
        require_same_mesh(rhs, u.uy, "ProblemSpec");
        for (std::size_t c = 0; c < V.size(); ++c) {
            if (!(V[c] >= 0.0) || !std::isfinite(V[c]))
                throw InvalidArgument("ProblemSpec: potential V must be finite and non-negative (cell " +
                                      std::to_string(c) + ")");
            if (!std::isfinite(rhs[c]) || !std::isfinite(u.ux[c]) || !std::isfinite(u.uy[c]))
                throw InvalidArgument("ProblemSpec: non-finite data in cell " + std::to_string(c));
        }
        if (!bc.empty() && bc.size() != rhs.mesh().boundary_faces().size())
            throw InvalidArgument("ProblemSpec: boundary data size does not match mesh");
        for (double g : bc)
            if (!std::isfinite(g))
                throw InvalidArgument("ProblemSpec: non-finite boundary data");
    }
};

struct AssembledSystem
{
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::size_t upwind_cells = 0;
};

namespace detail {

// Row builder for one cell: W, S, C, N, E in column order (row-major numbering).
struct StencilRow
{
    double west = 0.0, south = 0.0, center = 0.0, north = 0.0, east = 0.0;
    double rhs = 0.0;
};

inline AssembledSystem assemble_impl(const MeshPtr& mesh, const GridFunction* V, const VectorField* u, double sign,
                                     const GridFunction* f, const BoundaryData* bc, bool diffusion)
{
    const Mesh& m = *mesh;
    const int n = m.n();
    const double h = m.h();
    const double d = diffusion ? 1.0 / (h * h) : 0.0;
    AssembledSystem sys{CsrMatrix(m.size()), std::vector<double>(m.size(), 0.0), 0};

    std::array<std::pair<std::size_t, double>, 5> entries;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto c = m.index(i, j);
            StencilRow row;
            row.rhs = f ? (*f)[c] : 0.0;
            if (V)
                row.center += (*V)[c];

            // neighbour coefficients before ghost elimination
            double kw = -d, ke = -d, ks = -d, kn = -d;
            row.center += 4.0 * d;
            if (u) {
                const double wx = sign * u->ux[c], wy = sign * u->uy[c];
                if (std::hypot(wx, wy) * h / 2.0 <= 1.0) {
                    kw -= wx / (2.0 * h);
                    ke += wx / (2.0 * h);
                    ks -= wy / (2.0 * h);
                    kn += wy / (2.0 * h);
                }
                else {
                    ++sys.upwind_cells;
                    if (wx > 0.0) { row.center += wx / h; kw -= wx / h; }
                    else { row.center -= wx / h; ke += wx / h; }
                    if (wy > 0.0) { row.center += wy / h; ks -= wy / h; }
                    else { row.center -= wy / h; kn += wy / h; }
                }
            }

            // ghost = 2g − ω_c across a boundary face
            auto eliminate = [&](double k, Side side, double& slot, bool interior) {
                if (interior) {
                    slot += k;
                    return;
                }
                const double g = (bc && !bc->empty()) ? (*bc)[boundary_face_index(m, side, i, j)] : 0.0;
                row.center -= k;
                row.rhs -= 2.0 * g * k;
            };
            eliminate(kw, Side::left, row.west, i > 0);
            eliminate(ke, Side::right, row.east, i < n - 1);
            eliminate(ks, Side::bottom, row.south, j > 0);
            eliminate(kn, Side::top, row.north, j < n - 1);

            std::size_t cnt = 0;
            if (j > 0) entries[cnt++] = {m.index(i, j - 1), row.south};
            if (i > 0) entries[cnt++] = {m.index(i - 1, j), row.west};
            entries[cnt++] = {c, row.center};
            if (i < n - 1) entries[cnt++] = {m.index(i + 1, j), row.east};
            if (j < n - 1) entries[cnt++] = {m.index(i, j + 1), row.north};
            sys.matrix.push_row(std::span(entries.data(), cnt));
            sys.rhs[c] = row.rhs;
        }
    }
    for (double v : sys.matrix.vals())
        if (!std::isfinite(v))
            throw InvalidArgument("assemble: non-finite matrix entry");
    return sys;
}

} // namespace detail

/// 5-point operator with hybrid convection; Dirichlet data moved to the right-hand side.
[[nodiscard]] inline AssembledSystem assemble(const ProblemSpec& spec)
{
    spec.validate();
    const double sign = spec.mode == Mode::primal ? 1.0 : -1.0;
    return detail::assemble_impl(spec.mesh_ptr(), &spec.V, &spec.u, sign, &spec.rhs, &spec.bc, true);
}

/// The convection block alone (u·∇ for primal, −u·∇ for dual), homogeneous ghosts.
[[nodiscard]] inline CsrMatrix convection_operator(const VectorField& u, Mode mode)
{
    const double sign = mode == Mode::primal ? 1.0 : -1.0;
    return detail::assemble_impl(u.mesh_ptr(), nullptr, &u, sign, nullptr, nullptr, false).matrix;
}

enum class SolverMethod { automatic, direct, iterative };

struct SolveOptions
{
    double tol = 1e-10;
    int max_iterations = 20000;
    SolverMethod method = SolverMethod::automatic;
    int direct_max_n = 64;
};

struct SolveReport
{
    GridFunction solution;
    int iterations = 0;
    double final_relative_residual = 0.0;
    std::vector<double> residual_history;
    std::string method;
    std::map<std::string, double> norms;
};

/// Norm catalogue of a solution; `bc` selects the ghost values for gradients.
[[nodiscard]] inline std::map<std::string, double> norm_catalogue(const GridFunction& w, const GridFunction& V,
                                                                  const BoundaryData* bc = nullptr)
{
    const BoundaryData* g = (bc && !bc->empty()) ? bc : nullptr;
    std::map<std::string, double> out;
    out["linf"] = w.max_abs();
    out["l2"] = l2_norm(w);
    out["lorentz_2_inf"] = norm(w, NormSpec::lorentz(2.0, std::numeric_limits<double>::infinity()));
    out["weighted_l1"] = norm(w, NormSpec::weighted_l1(1.0));
    out["V_omega_l1_delta"] = integrate(abs(V * w), distance_weight(w.mesh_ptr()));
    out["grad_l2"] = gradient_l2(w, g);
    out["grad_lorentz_2_inf"] =
        norm(gradient_magnitude(w, g), NormSpec::lorentz(2.0, std::numeric_limits<double>::infinity()));
    out["min"] = w.min();
    return out;
}

[[nodiscard]] inline SolveReport solve(const ProblemSpec& spec, const SolveOptions& opts = {})
{
    const auto sys = assemble(spec);
    SolveReport rep;
    const bool direct = opts.method == SolverMethod::direct ||
                        (opts.method == SolverMethod::automatic && spec.mesh_ptr()->n() <= opts.direct_max_n);
    std::vector<double> x;
    if (direct) {
        x = banded_solve(sys.matrix, sys.rhs);
        rep.method = "banded-lu";
        rep.iterations = 1;
        const auto Ax = sys.matrix * x;
        double rn = 0.0, bn = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            rn += (sys.rhs[i] - Ax[i]) * (sys.rhs[i] - Ax[i]);
            bn += sys.rhs[i] * sys.rhs[i];
        }
        rep.final_relative_residual = bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
        rep.residual_history = {rep.final_relative_residual};
    }
    else {
        auto it = bicgstab(sys.matrix, sys.rhs, opts.tol, opts.max_iterations);
        x = std::move(it.x);
        rep.method = "bicgstab-ilu0";
        rep.iterations = it.iterations;
        rep.final_relative_residual = it.relative_residual;
        rep.residual_history = std::move(it.history);
    }
    rep.solution = GridFunction(spec.mesh_ptr(), std::move(x));
    rep.norms = norm_catalogue(rep.solution, spec.V, &spec.bc);
    return rep;
}

struct LadderReport
{
    std::vector<double> k_list;
    std::vector<SolveReport> rungs;
    std::vector<double> gaps;  // ‖∇(φ_{k_i} − φ_{k_{i+1}})‖_{L²}
};

/// 2^4, 2^6, ..., 2^12
[[nodiscard]] inline std::vector<double> default_ladder()
{
    return {16.0, 64.0, 256.0, 1024.0, 4096.0};
}

/// Solves `spec` with V replaced by min(V, k) for each k.
[[nodiscard]] inline LadderReport truncation_ladder(const ProblemSpec& spec, std::vector<double> k_list,
                                                   const SolveOptions& opts = {})
{
    if (k_list.empty())
        k_list = default_ladder();
    if (!std::is_sorted(k_list.begin(), k_list.end()) ||
        std::adjacent_find(k_list.begin(), k_list.end()) != k_list.end())
        throw InvalidArgument("truncation_ladder: k_list must be strictly increasing");
    LadderReport out;
    out.k_list = k_list;
    for (double k : k_list) {
        ProblemSpec rung = spec;
        rung.V = truncate_potential(spec.V, k);
        out.rungs.push_back(solve(rung, opts));
    }
    for (std::size_t i = 0; i + 1 < out.rungs.size(); ++i)
        out.gaps.push_back(gradient_l2(out.rungs[i + 1].solution - out.rungs[i].solution));
    return out;
}

/// Dual solve of −Δφ − u·∇φ = χ_E with φ = 0 on ∂Ω.
[[nodiscard]] inline SolveReport solve_indicator_dual(std::span<const std::size_t> E, const VectorField& u,
                                                      const SolveOptions& opts = {})
{
    const auto& mesh = u.mesh_ptr();
    GridFunction chi(mesh, 0.0);
    for (std::size_t c : E) {
        if (c >= mesh->size())
            throw InvalidArgument("solve_indicator_dual: cell index out of range");
        chi[c] = 1.0;
    }
    return solve(ProblemSpec::make(Mode::dual, GridFunction(mesh, 0.0), u, std::move(chi)), opts);
}

/// T_k(w) = min(|w|, k)·sign(w)
[[nodiscard]] inline GridFunction truncate_solution(const GridFunction& w, double k)
{
    if (!(k > 0.0))
        throw InvalidArgument("truncate_solution: k must be positive");
    return w.map([k](double v) { return std::clamp(v, -k, k); });
}

} // namespace vwslab
