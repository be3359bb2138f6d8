#include <vwslab/fields.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace vwslab;

namespace {
constexpr double pi = std::numbers::pi;

double poly_psi(double x, double y) { return x * (1 - x) * y * (1 - y); }
}

TEST(Potential, Examples)
{
    const auto m6 = build_mesh(6);
    const auto V = make_potential(m6, PotentialSpec::power(1, 2));
    ASSERT_DOUBLE_EQ(m6->delta(m6->index(1, 1)), 0.25);
    EXPECT_DOUBLE_EQ(V[m6->index(1, 1)], 16.0);

    const auto m = build_mesh(64);
    const auto zero = make_potential(m, PotentialSpec::zero());
    EXPECT_EQ(zero.max_abs(), 0.0);
    const auto V3 = make_potential(m, PotentialSpec::power(1, 3));
    EXPECT_DOUBLE_EQ(V3[m->index(0, 30)], 2097152.0);
    EXPECT_DOUBLE_EQ(V3.max(), 2097152.0);
    EXPECT_GE(V3.min(), 0.0);
    EXPECT_DOUBLE_EQ(make_potential(m, PotentialSpec::bounded(2.5)).min(), 2.5);
}

TEST(Potential, RejectsNegativeParameters)
{
    EXPECT_THROW(PotentialSpec::power(-1, 2), InvalidArgument);
    EXPECT_THROW(PotentialSpec::power(1, -2), InvalidArgument);
    EXPECT_THROW(PotentialSpec::bounded(-0.1), InvalidArgument);
}

TEST(Truncation, Examples)
{
    const auto m = build_mesh(8);
    EXPECT_EQ(truncate_potential(GridFunction(m, 16.0), 10).max(), 10.0);
    EXPECT_EQ(truncate_potential(GridFunction(m, 16.0), 10).min(), 10.0);
    EXPECT_EQ(truncate_potential(GridFunction(m, 16.0), 100).min(), 16.0);
    EXPECT_THROW((void)truncate_potential(GridFunction(m, 1.0), 0.0), InvalidArgument);
}

TEST(Truncation, ClippedOnlyNearBoundary)
{
    const auto m = build_mesh(64);
    const auto V = make_potential(m, PotentialSpec::power(1, 2));
    const auto Vk = truncate_potential(V, 64.0);
    for (std::size_t c = 0; c < m->size(); ++c) {
        if (m->delta(c) < 0.125)
            EXPECT_EQ(Vk[c], 64.0);
        else
            EXPECT_EQ(Vk[c], V[c]);
    }
}

TEST(Truncation, PointwiseProperties)
{
    const auto m = build_mesh(32);
    const auto V = make_potential(m, PotentialSpec::power(2, 2.5));
    GridFunction prev(m, 0.0);
    for (double k : {1.0, 10.0, 100.0, 1e4, 1e8}) {
        const auto Vk = truncate_potential(V, k);
        for (std::size_t c = 0; c < m->size(); ++c) {
            EXPECT_LE(Vk[c], V[c]);
            EXPECT_LE(Vk[c], k);
            EXPECT_GE(Vk[c], prev[c]);
        }
        prev = Vk;
    }
    const auto top = truncate_potential(V, V.max());
    EXPECT_EQ((top - V).max_abs(), 0.0);
}

TEST(Velocity, ZeroStream)
{
    const auto m = build_mesh(16);
    const auto u = velocity_from_stream(GridFunction(m, 0.0));
    EXPECT_EQ(u.ux.max_abs(), 0.0);
    EXPECT_EQ(u.uy.max_abs(), 0.0);
    const auto r = check_field(u);
    EXPECT_EQ(r.max_div, 0.0);
    EXPECT_EQ(r.max_un, 0.0);
    EXPECT_EQ(r.lorentz_N1_norm, 0.0);
}

TEST(Velocity, SineStreamIsSecondOrder)
{
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
        const auto m = build_mesh(n);
        const auto u = velocity_from_stream(m, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
        double err = 0.0;
        for (std::size_t c = 0; c < m->size(); ++c) {
            const auto p = m->center(c);
            err = std::max({err, std::abs(u.ux[c] - pi * std::sin(pi * p.x) * std::cos(pi * p.y)),
                            std::abs(u.uy[c] + pi * std::cos(pi * p.x) * std::sin(pi * p.y))});
        }
        if (prev > 0.0) {
            EXPECT_NEAR(prev / err, 4.0, 0.3) << "n=" << n;
        }
        prev = err;
        EXPECT_LE(divergence(u).max_abs(), 1e-12 * u.ux.max_abs());
    }
}

TEST(Velocity, PolynomialStreamDivergenceVanishes)
{
    // the reflected stream makes the discrete divergence vanish identically
    for (int n : {32, 64, 128}) {
        const auto m = build_mesh(n);
        const auto u = velocity_from_stream(m, poly_psi);
        EXPECT_LE(divergence(u).max_abs(), 1e-12);
    }
}

TEST(Velocity, RejectsStreamNonzeroOnBoundary)
{
    const auto m = build_mesh(16);
    EXPECT_THROW((void)velocity_from_stream(m, [](double x, double) { return x; }), InvalidArgument);
    StreamSpec bad;
    bad.kind = StreamSpec::Kind::poly_power;
    bad.exponent = 0.4;
    EXPECT_THROW((void)bad.velocity(m), InvalidArgument);
}

TEST(Velocity, PairingWithGradientVanishes)
{
    // ∫ u·∇φ = 0 for φ vanishing on boundary cells
    for (int n : {32, 64, 128}) {
        const auto m = build_mesh(n);
        const auto u = velocity_from_stream(m, [](double x, double y) {
            return std::sin(pi * x) * std::sin(pi * y) * (1.0 + x * y);
        });
        auto phi = GridFunction::sample(m, [](double x, double y) { return std::exp(x) * std::sin(2 * pi * y) + x * x; });
        for (std::size_t c = 0; c < m->size(); ++c)
            if (m->is_boundary_cell(c))
                phi[c] = 0.0;
        const auto [gx, gy] = gradient(phi);
        const double pairing = std::abs(integrate(u.ux * gx + u.uy * gy));
        const double scale = integrate(abs(u.ux * gx) + abs(u.uy * gy));
        EXPECT_LE(pairing, 1e-12 * scale) << "n=" << n;
    }
}

TEST(CheckField, PolynomialStream)
{
    double prev = 0.0;
    for (int n : {64, 128}) {
        const auto m = build_mesh(n);
        const auto u = velocity_from_stream(m, poly_psi);
        const auto r = check_field(u);
        EXPECT_EQ(r.max_un, 0.0);
        EXPECT_TRUE(std::isfinite(r.lorentz_N1_norm));
        EXPECT_GT(r.lorentz_N1_norm, 0.0);
        EXPECT_GT(r.l2eps_norm, 0.0);
        if (prev > 0.0) {
            EXPECT_NEAR(r.lorentz_N1_norm / prev, 1.0, 0.02);
        }
        prev = r.lorentz_N1_norm;
    }
}

TEST(Cutoff, Examples)
{
    EXPECT_DOUBLE_EQ(smoothstep(1.0), 1.0);
    EXPECT_DOUBLE_EQ(smoothstep(0.0), 0.0);
    EXPECT_DOUBLE_EQ(smoothstep(0.5), 0.5);
    EXPECT_DOUBLE_EQ(smoothstep(-3.0), 0.0);
    EXPECT_DOUBLE_EQ(smoothstep(7.0), 1.0);

    const auto m = build_mesh(64);
    const auto cell = [&](int k) { return m->index(k, 32); };  // δ = (k + 1/2)/64 for k < 32
    EXPECT_DOUBLE_EQ(make_cutoff(m, 25.0 / 128).values[cell(12)], 1.0);   // δ = ε
    EXPECT_DOUBLE_EQ(make_cutoff(m, 25.0 / 64).values[cell(12)], 0.0);    // δ = ε/2
    EXPECT_DOUBLE_EQ(make_cutoff(m, 18.0 / 64).values[cell(13)], 0.5);    // δ = 3ε/4
}

TEST(Cutoff, RangeAndSupport)
{
    const auto m = build_mesh(128);
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
        const auto cut = make_cutoff(m, eps);
        EXPECT_EQ(cut.eps, eps);
        for (std::size_t c = 0; c < m->size(); ++c) {
            const double v = cut.values[c], d = m->delta(c);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            if (d >= eps) {
                EXPECT_EQ(v, 1.0);
            }
            if (d <= eps / 2) {
                EXPECT_EQ(v, 0.0);
            }
        }
        // |∇h_ε| ≤ max|h'|·2/ε = 3/ε
        const auto [gx, gy] = gradient(cut.values);
        double g = 0.0;
        for (std::size_t c = 0; c < m->size(); ++c)
            g = std::max(g, std::hypot(gx[c], gy[c]));
        EXPECT_LE(g * eps, 3.0 * 1.05) << "eps=" << eps;
    }
    EXPECT_THROW((void)make_cutoff(m, 2.0 / 128), InvalidArgument);
    EXPECT_THROW((void)make_cutoff(m, 0.5), InvalidArgument);
}

TEST(Cutoff, ComplementMassDecreases)
{
    const auto m = build_mesh(256);
    const auto w = distance_weight(m, 2.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.4, 0.2, 0.1, 0.05, 0.025}) {
        const auto cut = make_cutoff(m, eps);
        const double mass = integrate(GridFunction(m, 1.0) - cut.values, w);
        EXPECT_LT(mass, prev);
        prev = mass;
    }
}

TEST(Rhs, FamiliesAndNormalization)
{
    const auto m = build_mesh(128);
    EXPECT_DOUBLE_EQ(RhsSpec::constant(3).sample(m).min(), 3.0);
    const auto bb = RhsSpec::boundary_bump(1.0 / 16).sample(m);
    EXPECT_NEAR(integrate(bb, distance_weight(m)), 1.0, 1e-12);
    EXPECT_GE(bb.min(), 0.0);
    auto logn = RhsSpec::boundary_bump(1.0 / 16, RhsSpec::Normalization::delta_log);
    const auto bl = logn.sample(m);
    EXPECT_NEAR(integrate(bl, RhsSpec::weight(m, RhsSpec::Normalization::delta_log)), 1.0, 1e-12);
    EXPECT_THROW((void)RhsSpec::boundary_bump(1.0 / 64).sample(m), UnderResolved);
    EXPECT_THROW((void)RhsSpec::bump({0.5, 0.5}, 0.01).sample(m), UnderResolved);
}
