#pragma once
//
// Problem data: singular potentials and their truncations, divergence-free
// velocities generated by stream functions, boundary cutoffs, right-hand
// side families and the quality gate for velocity fields.
//

#include <vwslab/mesh.hpp>
#include <vwslab/rearrange.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace vwslab {

// ---------------------------------------------------------------------------
// potentials
// ---------------------------------------------------------------------------

struct PotentialSpec
{
    enum class Kind { zero, bounded, power };

    Kind kind = Kind::zero;
    double c = 0.0;
    double r = 0.0;

    static PotentialSpec zero() { return {}; }
    static PotentialSpec bounded(double c) { return validated({Kind::bounded, c, 0.0}); }
    /// c·δ^{−r}
    static PotentialSpec power(double c, double r) { return validated({Kind::power, c, r}); }

    static PotentialSpec validated(PotentialSpec s)
    {
        if (!(s.c >= 0.0) || !std::isfinite(s.c))
            throw InvalidArgument("potential: c must be finite and >= 0, got " + std::to_string(s.c));
        if (!(s.r >= 0.0) || !std::isfinite(s.r))
            throw InvalidArgument("potential: r must be finite and >= 0, got " + std::to_string(s.r));
        return s;
    }
};

[[nodiscard]] inline GridFunction make_potential(const MeshPtr& mesh, const PotentialSpec& spec)
{
    const auto s = PotentialSpec::validated(spec);
    switch (s.kind) {
    case PotentialSpec::Kind::zero: return GridFunction(mesh, 0.0);
    case PotentialSpec::Kind::bounded: return GridFunction(mesh, s.c);
    case PotentialSpec::Kind::power: return s.c * distance_weight(mesh, -s.r);
    }
    return GridFunction(mesh, 0.0);
}

/// V_k = min(V, k)
[[nodiscard]] inline GridFunction truncate_potential(const GridFunction& V, double k)
{
    if (!(k > 0.0))
        throw InvalidArgument("truncate_potential: k must be positive");
    return V.map([k](double v) { return std::min(v, k); });
}

// ---------------------------------------------------------------------------
// velocity fields
// ---------------------------------------------------------------------------

struct VectorField
{
    GridFunction ux;
    GridFunction uy;
    GridFunction stream;

    [[nodiscard]] const MeshPtr& mesh_ptr() const { return ux.mesh_ptr(); }

    [[nodiscard]] VectorField scaled(double s) const { return {ux * s, uy * s, stream * s}; }

    [[nodiscard]] GridFunction magnitude() const
    {
        GridFunction m(ux.mesh_ptr());
        for (std::size_t c = 0; c < m.size(); ++c)
            m[c] = std::hypot(ux[c], uy[c]);
        return m;
    }

    [[nodiscard]] static VectorField zero(const MeshPtr& mesh)
    {
        return {GridFunction(mesh), GridFunction(mesh), GridFunction(mesh)};
    }
};

namespace detail {

// ψ on an (n+4)² array with two ghost layers; odd reflection across each side puts ψ = 0 on ∂Ω.
class ExtendedStream
{
public:
    explicit ExtendedStream(const GridFunction& psi)
        : n_(psi.mesh().n()), w_(n_ + 4), data_(static_cast<std::size_t>(w_ * w_), 0.0)
    {
        for (int j = -2; j < n_ + 2; ++j) {
            for (int i = -2; i < n_ + 2; ++i) {
                auto [ri, si] = reflect(i);
                auto [rj, sj] = reflect(j);
                at(i, j) = si * sj * psi[psi.mesh().index(ri, rj)];
            }
        }
    }

    [[nodiscard]] double operator()(int i, int j) const { return data_[slot(i, j)]; }

private:
    [[nodiscard]] std::pair<int, double> reflect(int i) const
    {
        if (i < 0) return {-1 - i, -1.0};
        if (i >= n_) return {2 * n_ - 1 - i, -1.0};
        return {i, 1.0};
    }
    [[nodiscard]] std::size_t slot(int i, int j) const
    {
        return static_cast<std::size_t>((j + 2) * w_ + (i + 2));
    }
    double& at(int i, int j) { return data_[slot(i, j)]; }

    int n_;
    int w_;
    std::vector<double> data_;
};

} // namespace detail

/// u = (∂ψ/∂y, −∂ψ/∂x) by central differences. ψ is continued across ∂Ω by odd
/// reflection, so ψ = 0 on the boundary and u·n = 0 there.
[[nodiscard]] inline VectorField velocity_from_stream(const GridFunction& psi)
{
    const Mesh& m = psi.mesh();
    const detail::ExtendedStream ext(psi);
    const double inv2h = 0.5 / m.h();
    VectorField u{GridFunction(psi.mesh_ptr()), GridFunction(psi.mesh_ptr()), psi};
    for (int j = 0; j < m.n(); ++j) {
        for (int i = 0; i < m.n(); ++i) {
            const auto c = m.index(i, j);
            u.ux[c] = (ext(i, j + 1) - ext(i, j - 1)) * inv2h;
            u.uy[c] = -(ext(i + 1, j) - ext(i - 1, j)) * inv2h;
        }
    }
    return u;
}

/// Samples ψ at cell centers after checking that it vanishes on ∂Ω.
template <typename Fn>
[[nodiscard]] VectorField velocity_from_stream(const MeshPtr& mesh, Fn&& psi)
{
    double scale = 0.0, worst = 0.0;
    for (const auto& p : mesh->centers())
        scale = std::max(scale, std::abs(psi(p.x, p.y)));
    for (const auto& f : mesh->boundary_faces())
        worst = std::max(worst, std::abs(psi(f.midpoint.x, f.midpoint.y)));
    for (double corner : {0.0, 1.0})
        worst = std::max({worst, std::abs(psi(corner, 0.0)), std::abs(psi(corner, 1.0))});
    if (worst > 1e-12 * std::max(scale, 1.0))
        throw InvalidArgument("velocity_from_stream: stream function is nonzero on the boundary (max " +
                              std::to_string(worst) + ")");
    return velocity_from_stream(GridFunction::sample(mesh, psi));
}

/// Central-difference divergence; across ∂Ω the normal component is continued
/// oddly and the tangential one evenly, matching the reflected stream function.
[[nodiscard]] inline GridFunction divergence(const VectorField& u)
{
    const Mesh& m = u.ux.mesh();
    const int n = m.n();
    const double inv2h = 0.5 / m.h();
    GridFunction div(u.ux.mesh_ptr());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto c = m.index(i, j);
            const double e = i < n - 1 ? u.ux[m.index(i + 1, j)] : -u.ux[c];
            const double w = i > 0 ? u.ux[m.index(i - 1, j)] : -u.ux[c];
            const double nn = j < n - 1 ? u.uy[m.index(i, j + 1)] : -u.uy[c];
            const double s = j > 0 ? u.uy[m.index(i, j - 1)] : -u.uy[c];
            div[c] = (e - w + nn - s) * inv2h;
        }
    }
    return div;
}

struct FieldReport
{
    double max_div = 0.0;
    double max_un = 0.0;
    double lorentz_N1_norm = 0.0;  // ‖|u|‖ in L^{2,1}
    double l2eps_norm = 0.0;       // ‖|u|‖ in L^{2.5}
};

/// Quality gate for experiment velocities.
[[nodiscard]] inline FieldReport check_field(const VectorField& u)
{
    FieldReport r;
    r.max_div = divergence(u).max_abs();

    // normal velocity on a boundary face: mean of the cell value and its odd ghost
    const Mesh& m = u.stream.mesh();
    for (const auto& f : m.boundary_faces()) {
        const double un = u.ux[f.cell] * f.normal.x + u.uy[f.cell] * f.normal.y;
        r.max_un = std::max(r.max_un, std::abs(0.5 * (un - un)));
    }

    const auto mag = u.magnitude();
    r.lorentz_N1_norm = norm(mag, NormSpec::lorentz(2.0, 1.0));
    double sum = 0.0;
    for (double v : mag.values())
        sum += std::pow(v, 2.5);
    r.l2eps_norm = std::pow(sum * m.cell_measure(), 1.0 / 2.5);
    return r;
}

// ---------------------------------------------------------------------------
// boundary cutoff
// ---------------------------------------------------------------------------

/// h(σ) = 3σ² − 2σ³ on [0, 1], clamped outside.
[[nodiscard]] inline double smoothstep(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * (3.0 - 2.0 * s);
}

struct Cutoff
{
    double eps = 0.0;
    GridFunction values;
};

/// h_ε(x) = h((2δ(x) − ε)/ε): 1 where δ ≥ ε, 0 where δ ≤ ε/2.
[[nodiscard]] inline Cutoff make_cutoff(const MeshPtr& mesh, double eps)
{
    if (!(eps > 2.0 * mesh->h() && eps < 0.5))
        throw InvalidArgument("make_cutoff: eps must lie in (2h, 1/2), got " + std::to_string(eps));
    GridFunction v(mesh);
    for (std::size_t c = 0; c < mesh->size(); ++c)
        v[c] = smoothstep((2.0 * mesh->delta(c) - eps) / eps);
    return {eps, std::move(v)};
}

// ---------------------------------------------------------------------------
// stream-function and right-hand-side families
// ---------------------------------------------------------------------------

/// Stream functions vanishing on ∂Ω.
struct StreamSpec
{
    enum class Kind { zero, poly, sine, poly_power };

    Kind kind = Kind::zero;
    double amplitude = 1.0;
    double exponent = 1.0;  // poly_power: (x(1−x)y(1−y))^exponent

    [[nodiscard]] double operator()(double x, double y) const
    {
        switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::poly: return amplitude * x * (1.0 - x) * y * (1.0 - y);
        case Kind::sine: return amplitude * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
        case Kind::poly_power: {
            const double b = x * (1.0 - x) * y * (1.0 - y);
            return b <= 0.0 ? 0.0 : amplitude * std::pow(b, exponent);
        }
        }
        return 0.0;
    }

    [[nodiscard]] VectorField velocity(const MeshPtr& mesh) const
    {
        if (kind == Kind::poly_power && !(exponent > 0.5))
            throw InvalidArgument("stream: poly_power exponent must exceed 1/2");
        if (kind == Kind::zero)
            return VectorField::zero(mesh);
        return velocity_from_stream(mesh, *this);
    }
};

/// Right-hand-side families. A bump is (1 − |x − x0|²/ρ²)² on the disc of radius ρ.
struct RhsSpec
{
    enum class Kind { constant, sine, bump, boundary_bump, delta_power, indicator };
    enum class Normalization { none, delta, delta_log };

    Kind kind = Kind::constant;
    double amplitude = 1.0;
    Point center{0.5, 0.5};
    double radius = 0.1;
    double distance = 0.125;  // boundary_bump: center at (x0, d), radius d/2
    double exponent = 0.0;    // extra factor δ^exponent (all kinds)
    std::array<double, 4> box{0.0, 1.0, 0.0, 1.0};  // indicator: x0, x1, y0, y1
    Normalization normalize = Normalization::none;

    static RhsSpec constant(double v)
    {
        RhsSpec s;
        s.amplitude = v;
        return s;
    }
    static RhsSpec sine(double amplitude)
    {
        RhsSpec s;
        s.kind = Kind::sine;
        s.amplitude = amplitude;
        return s;
    }
    static RhsSpec bump(Point c, double radius, double amplitude = 1.0)
    {
        RhsSpec s;
        s.kind = Kind::bump;
        s.center = c;
        s.radius = radius;
        s.amplitude = amplitude;
        return s;
    }
    /// Bump of radius d/2 centered at distance d from the bottom side, above x = x0.
    static RhsSpec boundary_bump(double d, Normalization nz = Normalization::delta, double x0 = 0.5)
    {
        RhsSpec s;
        s.kind = Kind::boundary_bump;
        s.distance = d;
        s.center = {x0, d};
        s.radius = 0.5 * d;
        s.normalize = nz;
        return s;
    }

    /// Boundary bumps need h <= d/4, interior bumps h <= radius/2.
    void check_resolved(const Mesh& mesh) const
    {
        if (kind == Kind::boundary_bump && mesh.h() > distance / 4.0 * (1.0 + 1e-12))
            throw UnderResolved("boundary bump at distance " + std::to_string(distance) +
                                " needs h <= d/4, mesh has h = " + std::to_string(mesh.h()));
        if (kind == Kind::bump && mesh.h() > radius / 2.0 * (1.0 + 1e-12))
            throw UnderResolved("bump of radius " + std::to_string(radius) + " needs h <= radius/2");
    }

    [[nodiscard]] GridFunction sample(const MeshPtr& mesh) const
    {
        check_resolved(*mesh);
        GridFunction f(mesh);
        for (std::size_t c = 0; c < mesh->size(); ++c) {
            const auto& p = mesh->center(c);
            double v = 0.0;
            switch (kind) {
            case Kind::constant: v = 1.0; break;
            case Kind::sine: v = std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); break;
            case Kind::bump:
            case Kind::boundary_bump: {
                const double r2 = ((p.x - center.x) * (p.x - center.x) + (p.y - center.y) * (p.y - center.y)) /
                                  (radius * radius);
                v = r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
                break;
            }
            case Kind::delta_power: v = 1.0; break;
            case Kind::indicator:
                v = (p.x >= box[0] && p.x <= box[1] && p.y >= box[2] && p.y <= box[3]) ? 1.0 : 0.0;
                break;
            }
            if (exponent != 0.0)
                v *= std::pow(mesh->delta(c), exponent);
            f[c] = amplitude * v;
        }
        if (normalize != Normalization::none) {
            const double mass = integrate(abs(f), weight(mesh, normalize));
            if (mass > 0.0)
                f *= amplitude / mass;
        }
        return f;
    }

    /// δ or δ(1 + |ln δ|)^{1/2}
    [[nodiscard]] static GridFunction weight(const MeshPtr& mesh, Normalization nz)
    {
        GridFunction w(mesh, 1.0);
        for (std::size_t c = 0; c < mesh->size(); ++c) {
            const double d = mesh->delta(c);
            if (nz == Normalization::delta) w[c] = d;
            if (nz == Normalization::delta_log) w[c] = d * std::sqrt(1.0 + std::abs(std::log(d)));
        }
        return w;
    }
};

} // namespace vwslab
