#pragma once
//
// Compressed-row sparse matrices and the two linear solvers used by the
// elliptic solver: ILU(0)-preconditioned BiCGStab and an unpivoted banded LU
// (the discretization is an M-matrix, so elimination without pivoting is stable).
//

#include <vwslab/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vwslab {

class CsrMatrix
{
public:
    CsrMatrix() = default;
    explicit CsrMatrix(std::size_t rows)
        : rows_(rows)
    {
        row_ptr_.reserve(rows + 1);
        row_ptr_.push_back(0);
    }

    /// Appends a row; entries must have strictly increasing columns.
    void push_row(std::span<const std::pair<std::size_t, double>> entries)
    {
        for (const auto& [c, v] : entries) {
            cols_.push_back(c);
            vals_.push_back(v);
        }
        row_ptr_.push_back(cols_.size());
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return vals_.size(); }
    [[nodiscard]] std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] std::span<const std::size_t> cols() const noexcept { return cols_; }
    [[nodiscard]] std::span<const double> vals() const noexcept { return vals_; }
    [[nodiscard]] std::span<double> vals() noexcept { return vals_; }

    /// A(r, c), zero when outside the pattern.
    [[nodiscard]] double at(std::size_t r, std::size_t c) const
    {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (cols_[k] == c)
                return vals_[k];
        return 0.0;
    }

    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                s += vals_[k] * x[cols_[k]];
            y[r] = s;
        }
    }

    [[nodiscard]] std::vector<double> operator*(std::span<const double> x) const
    {
        std::vector<double> y(rows_);
        multiply(x, y);
        return y;
    }

    /// Largest lower/upper distance |c - r| over the pattern.
    [[nodiscard]] std::size_t bandwidth() const
    {
        std::size_t bw = 0;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                bw = std::max(bw, cols_[k] > r ? cols_[k] - r : r - cols_[k]);
        return bw;
    }

private:
    std::size_t rows_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

} // namespace detail

/// Incomplete LU factorization on the sparsity pattern of A.
class Ilu0
{
public:
    explicit Ilu0(const CsrMatrix& A)
        : lu_(A), diag_(A.rows())
    {
        const auto rp = lu_.row_ptr();
        const auto cols = lu_.cols();
        auto vals = lu_.vals();
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
                if (cols[k] == i)
                    diag_[i] = k;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t kk = rp[i]; kk < rp[i + 1] && cols[kk] < i; ++kk) {
                const std::size_t k = cols[kk];
                vals[kk] /= vals[diag_[k]];
                const double lik = vals[kk];
                // a_ij -= l_ik u_kj for j > k inside row i's pattern
                std::size_t jj = kk + 1;
                for (std::size_t kj = diag_[k] + 1; kj < rp[k + 1]; ++kj) {
                    while (jj < rp[i + 1] && cols[jj] < cols[kj])
                        ++jj;
                    if (jj < rp[i + 1] && cols[jj] == cols[kj])
                        vals[jj] -= lik * vals[kj];
                }
            }
            if (vals[diag_[i]] == 0.0)
                throw InvalidArgument("ILU(0): zero pivot in row " + std::to_string(i));
        }
    }

    /// z = (LU)^{-1} r
    void apply(std::span<const double> r, std::span<double> z) const
    {
        const auto rp = lu_.row_ptr();
        const auto cols = lu_.cols();
        const auto vals = lu_.vals();
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            double s = r[i];
            for (std::size_t k = rp[i]; k < diag_[i]; ++k)
                s -= vals[k] * z[cols[k]];
            z[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = z[i];
            for (std::size_t k = diag_[i] + 1; k < rp[i + 1]; ++k)
                s -= vals[k] * z[cols[k]];
            z[i] = s / vals[diag_[i]];
        }
    }

private:
    CsrMatrix lu_;
    std::vector<std::size_t> diag_;
};

struct IterativeResult
{
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;
};

/// Right-preconditioned BiCGStab on the true residual: when the recursive
/// residual reaches `tol` the true one is recomputed and the iteration restarts
/// from it if needed. Throws ConvergenceError at the iteration cap.
[[nodiscard]] inline IterativeResult bicgstab(const CsrMatrix& A, std::span<const double> b, double tol,
                                              int max_iterations)
{
    using detail::dot;
    using detail::norm2;
    const std::size_t n = A.rows();
    IterativeResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0)
        return res;

    const Ilu0 M(A);
    std::vector<double> r(b.begin(), b.end()), rhat, p(n), v(n), y(n), s(n), z(n), t(n), Ax(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    auto restart = [&] {
        A.multiply(res.x, Ax);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = b[i] - Ax[i];
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        rho = alpha = omega = 1.0;
        return norm2(r) / bnorm;
    };

    res.relative_residual = restart();
    int it = 0;
    while (it < max_iterations) {
        ++it;
        const double rho_new = dot(rhat, r);
        if (rho_new == 0.0 || omega == 0.0) {
            res.relative_residual = restart();
            continue;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        M.apply(p, y);
        A.multiply(y, v);
        alpha = rho_new / dot(rhat, v);
        for (std::size_t i = 0; i < n; ++i)
            s[i] = r[i] - alpha * v[i];
        double rel = norm2(s) / bnorm;
        if (rel <= tol) {
            for (std::size_t i = 0; i < n; ++i)
                res.x[i] += alpha * y[i];
        }
        else {
            M.apply(s, z);
            A.multiply(z, t);
            const double tt = dot(t, t);
            omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                res.x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            rho = rho_new;
            rel = norm2(r) / bnorm;
        }
        res.history.push_back(rel);
        if (rel <= tol) {
            res.relative_residual = restart();
            if (res.relative_residual <= tol)
                break;
        }
    }
    res.iterations = it;
    if (res.relative_residual > tol)
        throw ConvergenceError("BiCGStab did not converge in " + std::to_string(max_iterations) +
                                   " iterations (relative residual " + std::to_string(res.relative_residual) + ")",
                               res.history);
    return res;
}

/// Unpivoted LU on the band of A; O(N·bw²).
[[nodiscard]] inline std::vector<double> banded_solve(const CsrMatrix& A, std::span<const double> b)
{
    const std::size_t n = A.rows();
    const std::size_t bw = A.bandwidth();
    const std::size_t width = 2 * bw + 1;
    std::vector<double> band(n * width, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return band[r * width + (c + bw - r)]; };

    const auto rp = A.row_ptr();
    const auto cols = A.cols();
    const auto vals = A.vals();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
            at(r, cols[k]) = vals[k];

    std::vector<double> x(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        const double pivot = at(k, k);
        if (pivot == 0.0)
            throw InvalidArgument("banded_solve: zero pivot in row " + std::to_string(k));
        const std::size_t last = std::min(n - 1, k + bw);
        for (std::size_t i = k + 1; i <= last; ++i) {
            double& lik = at(i, k);
            if (lik == 0.0)
                continue;
            const double l = lik / pivot;
            lik = 0.0;
            for (std::size_t j = k + 1; j <= last; ++j)
                at(i, j) -= l * at(k, j);
            x[i] -= l * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        const std::size_t last = std::min(n - 1, k + bw);
        for (std::size_t j = k + 1; j <= last; ++j)
            s -= at(k, j) * x[j];
        x[k] = s / at(k, k);
    }
    return x;
}

} // namespace vwslab
