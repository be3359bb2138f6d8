#pragma once
//
// Uniform cell-centered grid on the unit square, the distance-to-boundary
// weight and midpoint quadrature.
//

#include <vwslab/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vwslab {

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

enum class Side { bottom, top, left, right };

/// A cell face lying on the boundary of the unit square.
struct BoundaryFace
{
    std::size_t cell = 0;  // adjacent interior cell
    Side side = Side::bottom;
    Point midpoint;
    Point normal;  // outward unit normal
};

class Mesh
{
public:
    explicit Mesh(int n)
        : n_(n)
    {
        if (n < 4)
            throw InvalidArgument("build_mesh: n must be >= 4, got " + std::to_string(n));

        h_ = 1.0 / static_cast<double>(n);
        const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        centers_.resize(count);
        delta_.resize(count);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const auto c = index(i, j);
                const double x = (i + 0.5) * h_;
                const double y = (j + 0.5) * h_;
                centers_[c] = {x, y};
                delta_[c] = std::min({x, 1.0 - x, y, 1.0 - y});
            }
        }

        faces_.reserve(4 * static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            faces_.push_back({index(i, 0), Side::bottom, {(i + 0.5) * h_, 0.0}, {0.0, -1.0}});
        for (int i = 0; i < n; ++i)
            faces_.push_back({index(i, n - 1), Side::top, {(i + 0.5) * h_, 1.0}, {0.0, 1.0}});
        for (int j = 0; j < n; ++j)
            faces_.push_back({index(0, j), Side::left, {0.0, (j + 0.5) * h_}, {-1.0, 0.0}});
        for (int j = 0; j < n; ++j)
            faces_.push_back({index(n - 1, j), Side::right, {1.0, (j + 0.5) * h_}, {1.0, 0.0}});
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double cell_measure() const noexcept { return h_ * h_; }
    [[nodiscard]] std::size_t size() const noexcept { return centers_.size(); }

    /// Row-major: i runs along x, j along y.
    [[nodiscard]] std::size_t index(int i, int j) const noexcept
    {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    [[nodiscard]] int col(std::size_t c) const noexcept { return static_cast<int>(c % static_cast<std::size_t>(n_)); }
    [[nodiscard]] int row(std::size_t c) const noexcept { return static_cast<int>(c / static_cast<std::size_t>(n_)); }

    [[nodiscard]] const Point& center(std::size_t c) const { return centers_[c]; }
    [[nodiscard]] std::span<const Point> centers() const noexcept { return centers_; }

    /// Distance from the cell center to the boundary; always >= h/2.
    [[nodiscard]] double delta(std::size_t c) const { return delta_[c]; }
    [[nodiscard]] std::span<const double> deltas() const noexcept { return delta_; }

    [[nodiscard]] std::span<const BoundaryFace> boundary_faces() const noexcept { return faces_; }

    /// Cells in the outermost ring.
    [[nodiscard]] bool is_boundary_cell(std::size_t c) const noexcept
    {
        const int i = col(c), j = row(c);
        return i == 0 || j == 0 || i == n_ - 1 || j == n_ - 1;
    }

private:
    int n_;
    double h_ = 0.0;
    std::vector<Point> centers_;
    std::vector<double> delta_;
    std::vector<BoundaryFace> faces_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

[[nodiscard]] inline MeshPtr build_mesh(int n)
{
    return std::make_shared<const Mesh>(n);
}

/// Scalar field sampled at cell centers.
class GridFunction
{
public:
    GridFunction() = default;

    explicit GridFunction(MeshPtr mesh, double fill = 0.0)
        : mesh_(std::move(mesh)), values_(mesh_->size(), fill)
    {}

    GridFunction(MeshPtr mesh, std::vector<double> values)
        : mesh_(std::move(mesh)), values_(std::move(values))
    {
        if (values_.size() != mesh_->size())
            throw InvalidArgument("GridFunction: value count does not match mesh");
    }

    /// Samples `fn(x, y)` at every cell center.
    template <typename Fn>
    static GridFunction sample(const MeshPtr& mesh, Fn&& fn)
    {
        GridFunction g(mesh);
        for (std::size_t c = 0; c < mesh->size(); ++c) {
            const auto& p = mesh->center(c);
            g.values_[c] = fn(p.x, p.y);
        }
        return g;
    }

    [[nodiscard]] const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] double operator[](std::size_t c) const { return values_[c]; }
    [[nodiscard]] double& operator[](std::size_t c) { return values_[c]; }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return values_; }

    [[nodiscard]] double max() const { return *std::max_element(values_.begin(), values_.end()); }
    [[nodiscard]] double min() const { return *std::min_element(values_.begin(), values_.end()); }
    [[nodiscard]] double max_abs() const
    {
        double m = 0.0;
        for (double v : values_)
            m = std::max(m, std::abs(v));
        return m;
    }

    template <typename Fn>
    [[nodiscard]] GridFunction map(Fn&& fn) const
    {
        GridFunction out(mesh_);
        for (std::size_t c = 0; c < values_.size(); ++c)
            out.values_[c] = fn(values_[c]);
        return out;
    }

    GridFunction& operator*=(double s)
    {
        for (double& v : values_)
            v *= s;
        return *this;
    }

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(const GridFunction& o);

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

/// Meshes are interchangeable when they have the same resolution.
[[nodiscard]] inline bool same_mesh(const Mesh& a, const Mesh& b) noexcept
{
    return a.n() == b.n();
}

inline void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* where)
{
    if (!a.mesh_ptr() || !b.mesh_ptr() || !same_mesh(a.mesh(), b.mesh()))
        throw InvalidArgument(std::string(where) + ": mesh mismatch");
}

inline GridFunction& GridFunction::operator+=(const GridFunction& o)
{
    require_same_mesh(*this, o, "GridFunction::operator+=");
    for (std::size_t c = 0; c < values_.size(); ++c)
        values_[c] += o.values_[c];
    return *this;
}

inline GridFunction& GridFunction::operator-=(const GridFunction& o)
{
    require_same_mesh(*this, o, "GridFunction::operator-=");
    for (std::size_t c = 0; c < values_.size(); ++c)
        values_[c] -= o.values_[c];
    return *this;
}

inline GridFunction& GridFunction::operator*=(const GridFunction& o)
{
    require_same_mesh(*this, o, "GridFunction::operator*=");
    for (std::size_t c = 0; c < values_.size(); ++c)
        values_[c] *= o.values_[c];
    return *this;
}

[[nodiscard]] inline GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
[[nodiscard]] inline GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
[[nodiscard]] inline GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
[[nodiscard]] inline GridFunction operator*(double s, GridFunction a) { return a *= s; }
[[nodiscard]] inline GridFunction operator*(GridFunction a, double s) { return a *= s; }

[[nodiscard]] inline GridFunction abs(const GridFunction& u)
{
    return u.map([](double v) { return std::abs(v); });
}

/// The weight δ(x) as a grid function.
[[nodiscard]] inline GridFunction distance_weight(const MeshPtr& mesh)
{
    return GridFunction(mesh, std::vector<double>(mesh->deltas().begin(), mesh->deltas().end()));
}

/// δ^a
[[nodiscard]] inline GridFunction distance_weight(const MeshPtr& mesh, double power)
{
    GridFunction w(mesh);
    for (std::size_t c = 0; c < mesh->size(); ++c)
        w[c] = std::pow(mesh->delta(c), power);
    return w;
}

/// Midpoint rule for ∫_Ω u·weight dx.
[[nodiscard]] inline double integrate(const GridFunction& u, const std::optional<GridFunction>& weight = std::nullopt)
{
    double sum = 0.0;
    if (weight) {
        require_same_mesh(u, *weight, "integrate");
        for (std::size_t c = 0; c < u.size(); ++c)
            sum += u[c] * (*weight)[c];
    }
    else {
        for (std::size_t c = 0; c < u.size(); ++c)
            sum += u[c];
    }
    return sum * u.mesh().cell_measure();
}

/// ( ∫ |u|^2 dx )^{1/2}
[[nodiscard]] inline double l2_norm(const GridFunction& u)
{
    double sum = 0.0;
    for (double v : u.values())
        sum += v * v;
    return std::sqrt(sum * u.mesh().cell_measure());
}

/// Dirichlet data, one value per entry of Mesh::boundary_faces().
using BoundaryData = std::vector<double>;

[[nodiscard]] inline BoundaryData constant_boundary(const Mesh& mesh, double g)
{
    return BoundaryData(mesh.boundary_faces().size(), g);
}

} // namespace vwslab
