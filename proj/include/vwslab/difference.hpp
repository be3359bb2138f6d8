#pragma once
//
// Finite-difference gradients on the cell-centered grid.
//
// Outside the domain a field is continued through the ghost value 2g - u(c)
// across every boundary face, which places the Dirichlet value g on the face
// itself. With g = 0 this is the discrete H^1_0 convention shared by the
// solver.
//

#include <vwslab/mesh.hpp>

#include <cmath>
#include <optional>
#include <utility>

namespace vwslab {

/// Position of the boundary face of `side` adjacent to cell (i, j) in Mesh::boundary_faces().
[[nodiscard]] inline std::size_t boundary_face_index(const Mesh& mesh, Side side, int i, int j)
{
    const auto n = static_cast<std::size_t>(mesh.n());
    switch (side) {
    case Side::bottom: return static_cast<std::size_t>(i);
    case Side::top: return n + static_cast<std::size_t>(i);
    case Side::left: return 2 * n + static_cast<std::size_t>(j);
    case Side::right: return 3 * n + static_cast<std::size_t>(j);
    }
    return 0;
}

namespace detail {

struct Neighbours
{
    double west, east, south, north;
};

inline Neighbours neighbours(const GridFunction& u, std::size_t c, const BoundaryData* bc)
{
    const Mesh& m = u.mesh();
    const int i = m.col(c), j = m.row(c), n = m.n();
    const double uc = u[c];
    auto ghost = [&](Side s) {
        const double g = bc ? (*bc)[boundary_face_index(m, s, i, j)] : 0.0;
        return 2.0 * g - uc;
    };
    return {
        i > 0 ? u[m.index(i - 1, j)] : ghost(Side::left),
        i < n - 1 ? u[m.index(i + 1, j)] : ghost(Side::right),
        j > 0 ? u[m.index(i, j - 1)] : ghost(Side::bottom),
        j < n - 1 ? u[m.index(i, j + 1)] : ghost(Side::top),
    };
}

inline void check_bc(const GridFunction& u, const BoundaryData* bc)
{
    if (bc && bc->size() != u.mesh().boundary_faces().size())
        throw InvalidArgument("boundary data size does not match mesh");
}

} // namespace detail

/// Central-difference gradient (∂x u, ∂y u) at cell centers.
[[nodiscard]] inline std::pair<GridFunction, GridFunction>
gradient(const GridFunction& u, const BoundaryData* bc = nullptr)
{
    detail::check_bc(u, bc);
    const double inv2h = 0.5 / u.mesh().h();
    GridFunction gx(u.mesh_ptr()), gy(u.mesh_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) {
        const auto nb = detail::neighbours(u, c, bc);
        gx[c] = (nb.east - nb.west) * inv2h;
        gy[c] = (nb.north - nb.south) * inv2h;
    }
    return {std::move(gx), std::move(gy)};
}

/// |∇u| at cell centers.
[[nodiscard]] inline GridFunction gradient_magnitude(const GridFunction& u, const BoundaryData* bc = nullptr)
{
    auto [gx, gy] = gradient(u, bc);
    for (std::size_t c = 0; c < gx.size(); ++c)
        gx[c] = std::hypot(gx[c], gy[c]);
    return gx;
}

/// Discrete (∫|∇u|² dx)^{1/2} from face differences, boundary faces included.
/// Equals the energy norm of the 5-point Laplacian: Σ u·(−Δ_h u)·h² when g = 0.
[[nodiscard]] inline double gradient_l2(const GridFunction& u, const BoundaryData* bc = nullptr)
{
    detail::check_bc(u, bc);
    const Mesh& m = u.mesh();
    const int n = m.n();
    double interior = 0.0;  // Σ (u_a − u_b)² over interior faces
    double boundary = 0.0;  // Σ (u − ghost)² over boundary faces
    for (std::size_t c = 0; c < u.size(); ++c) {
        const auto nb = detail::neighbours(u, c, bc);
        const int i = m.col(c), j = m.row(c);
        const double de = nb.east - u[c], dn = nb.north - u[c];
        (i < n - 1 ? interior : boundary) += de * de;
        (j < n - 1 ? interior : boundary) += dn * dn;
        if (i == 0) boundary += (u[c] - nb.west) * (u[c] - nb.west);
        if (j == 0) boundary += (u[c] - nb.south) * (u[c] - nb.south);
    }
    // a boundary face carries the half-cell difference (u - g)/(h/2) over area h²/2
    return std::sqrt(interior + 0.5 * boundary);
}

} // namespace vwslab
