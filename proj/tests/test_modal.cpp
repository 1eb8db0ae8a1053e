#include <cmath>
#include <array>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "vibrafin/structural_modal.hpp"

using namespace vibrafin;
using namespace vibrafin::modal;

TEST(RodStiffness, CantileverFormula) {
    // 3 E I / L^3 with I = h w^3 / 12 and w h^3 / 12, E 2 GPa, 10 x 7.5 x 3 mm
    const RigidPartGeometry g;
    const auto k = rod_stiffness(g);
    EXPECT_NEAR(k.x_n_m, 101250.0, 1e-6);
    EXPECT_NEAR(k.y_n_m, 632812.5, 1e-5);
    EXPECT_NEAR(joint_stiffness(g), 1935.0, 1e-9);
}

TEST(RodStiffness, InverseCubeOfLength) {
    RigidPartGeometry g;
    const double k10 = rod_stiffness(g).x_n_m;
    g.rod_length_m = 20e-3;
    EXPECT_NEAR(rod_stiffness(g).x_n_m, k10 / 8.0, 1e-9);
}

TEST(Series, Combination) {
    EXPECT_DOUBLE_EQ(series(2.0, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(series(3.0, 6.0), 2.0);
}

TEST(ReducedModel, DefaultFirstFrequency) {
    // k = 101250 * 1935 / (101250 + 1935), m = 2.5 g + 0.24 * 1200 * 225 mm^3
    const auto m = build_reduced_model({}, {}, FluidProperties{});
    EXPECT_NEAR(m.effective_mass_x_kg, 2.5648e-3, 1e-12);
    const auto nf = natural_frequencies(m);
    EXPECT_NEAR(nf.f1_hz, 136.93772090661, 1e-8);
    EXPECT_EQ(nf.axis1, ModeAxis::X);
    EXPECT_GT(nf.f2_hz, nf.f1_hz);
}

TEST(ReducedModel, DampingFromRatio) {
    const auto m = build_reduced_model({}, {}, FluidProperties{});
    EXPECT_NEAR(m.damping_x_ns_m, 2.0 * 0.05 * std::sqrt(m.stiffness_x_n_m * m.effective_mass_x_kg), 1e-15);
}

TEST(ReducedModel, AxisSwapsWhenWidthExceedsHeight) {
    RigidPartGeometry g;
    std::swap(g.rod_height_m, g.rod_width_m);
    g.joint_stiffness_per_area_pa_m = 1e12;  // rod dominated
    const auto nf = natural_frequencies(build_reduced_model(g, {}, std::nullopt));
    EXPECT_EQ(nf.axis1, ModeAxis::Y);
}

TEST(FinFrequency, ClampedFreePlate) {
    // lambda^2 / (2 pi L^2) sqrt(E t^2 / (12 rho (1 - nu^2))), 12 mm, 200 um PET
    const FlexibleFinGeometry fin;
    EXPECT_NEAR(fin_first_frequency(fin, std::nullopt), 316.555037990618, 1e-8);
    // Gamma = (pi/4) 1000 * 11 mm / (1420 * 200 um)
    EXPECT_NEAR(fin_added_mass_ratio(fin, {}, std::numbers::pi / 4.0), 30.420351399197, 1e-9);
    EXPECT_NEAR(fin_first_frequency(fin, FluidProperties{}), 56.473370802638, 1e-8);
}

TEST(FinFrequency, InverseSquareOfLength) {
    FlexibleFinGeometry fin;
    const double f12 = fin_first_frequency(fin, std::nullopt);
    fin.fin_length_m = 24e-3;
    EXPECT_NEAR(fin_first_frequency(fin, std::nullopt), f12 / 4.0, 1e-9);
}

TEST(FinFrequency, RejectsBadGeometry) {
    FlexibleFinGeometry fin;
    fin.thickness_m = 0.0;
    EXPECT_THROW(fin_first_frequency(fin, std::nullopt), ValidationError);
    fin = {};
    fin.poisson_ratio = 0.5;
    EXPECT_THROW(fin_first_frequency(fin, std::nullopt), ValidationError);
}

TEST(ChainFrequencies, EqualMassesAndSprings) {
    // ground-k-m-k-m: lambda = (3 -+ sqrt 5)/2 k/m
    const auto f = chain_frequencies(4.0, 1.0, 4.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    EXPECT_NEAR(f.f1_hz, std::sqrt(4.0 * (3.0 - std::sqrt(5.0)) / 2.0) / two_pi, 1e-12);
    EXPECT_NEAR(f.f2_hz, std::sqrt(4.0 * (3.0 + std::sqrt(5.0)) / 2.0) / two_pi, 1e-12);
}

TEST(ChainFrequencies, StiffSecondSpringActsAsOneMass) {
    const auto f = chain_frequencies(1.0, 1.0, 1e12, 1.0);
    EXPECT_NEAR(f.f1_hz, std::sqrt(0.5) / (2.0 * std::numbers::pi), 1e-6);
}

TEST(ChainFrequencies, InterlacesUncoupledFrequencies) {
    const auto m = build_reduced_model({}, {}, FluidProperties{});
    const auto chain = assembly_frequencies(m);
    const double w_fin = std::sqrt(m.fin_modal_stiffness_n_m / m.fin_modal_mass_kg) / (2.0 * std::numbers::pi);
    const double w_rigid = natural_frequencies(m).f1_hz;
    EXPECT_LT(chain.f1_hz, std::min(w_fin, w_rigid));
    EXPECT_GT(chain.f2_hz, std::max(w_fin, w_rigid));
}

TEST(Sweep, RowOrderAndAspectArea) {
    SweepBase base;
    const auto t = modal_sweep({{SweepAxis::RodLength, {6e-3, 10e-3}}, {SweepAxis::AspectRatio, {1.0, 2.0, 2.5}}}, base);
    ASSERT_EQ(t.rows.size(), 6u);
    EXPECT_DOUBLE_EQ(t.rows[0].coordinates[0], 6e-3);
    EXPECT_DOUBLE_EQ(t.rows[2].coordinates[1], 2.5);
    EXPECT_DOUBLE_EQ(t.rows[3].coordinates[0], 10e-3);
    RigidPartGeometry g = base.rigid;
    FlexibleFinGeometry fin = base.fin;
    apply_coordinate(SweepAxis::AspectRatio, 2.0, g, fin, 22.5e-6);
    EXPECT_NEAR(g.rod_height_m * g.rod_width_m, 22.5e-6, 1e-18);
    EXPECT_NEAR(g.rod_height_m / g.rod_width_m, 2.0, 1e-12);
    for (const auto& r : t.rows) EXPECT_NEAR(r.gap_ratio, (r.f2_hz - r.f1_hz) / r.f1_hz, 1e-15);
}

TEST(Sweep, FinAxisGivesAssemblyFrequencies) {
    SweepBase base;
    const auto t = modal_sweep({{SweepAxis::FinLength, {12e-3}}}, base);
    const auto chain = assembly_frequencies(build_reduced_model(base.rigid, base.fin, base.fluid, base.config));
    EXPECT_DOUBLE_EQ(t.rows[0].f1_hz, chain.f1_hz);
}

TEST(Sweep, RejectsEmptyAxes) {
    EXPECT_THROW(modal_sweep({}, {}), ValidationError);
    EXPECT_THROW(modal_sweep({{SweepAxis::RodLength, {}}}, {}), ValidationError);
}

namespace {

// Lowest eigenvalue of the clamped-free beam w'''' = beta^4 w on [0, 1],
// central differences with ghost nodes, by inverse iteration.
double fd_beam_beta4(int n) {
    const double h = 1.0 / n;
    // unknowns w_1..w_n (w_0 = 0 clamped)
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    auto add = [&](int row, int j, double v) {
        // node index j in [-1, n+2]; apply boundary conditions
        if (j == 0) return;                       // w0 = 0
        if (j == -1) { a[row][0] += v; return; }  // w_-1 = w_1 (zero slope)
        if (j == n + 1) {                         // w_{n+1} = 2 w_n - w_{n-1} (zero moment)
            a[row][n - 1] += 2.0 * v;
            a[row][n - 2] -= v;
            return;
        }
        if (j == n + 2) {  // zero shear: w_{n+2} = 2 w_{n+1} - 2 w_{n-1} + w_{n-2}, with w_{n+1} substituted
            a[row][n - 1] += 4.0 * v;
            a[row][n - 2] -= 4.0 * v;
            if (n - 3 >= 0) a[row][n - 3] += v;
            return;
        }
        a[row][j - 1] += v;
    };
    const double c = 1.0 / (h * h * h * h);
    for (int i = 1; i <= n; ++i) {
        add(i - 1, i - 2, c);
        add(i - 1, i - 1, -4.0 * c);
        add(i - 1, i, 6.0 * c);
        add(i - 1, i + 1, -4.0 * c);
        add(i - 1, i + 2, c);
    }
    // LU with partial pivoting, factored once
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        std::swap(a[k], a[p]);
        piv[k] = p;
        for (int i = k + 1; i < n; ++i) {
            a[i][k] /= a[k][k];
            for (int j = k + 1; j < n; ++j) a[i][j] -= a[i][k] * a[k][j];
        }
    }
    auto solve = [&](std::vector<double> b) {
        for (int k = 0; k < n; ++k) std::swap(b[k], b[piv[k]]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) b[i] -= a[i][j] * b[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) b[i] -= a[i][j] * b[j];
            b[i] /= a[i][i];
        }
        return b;
    };

    std::vector<double> x(n, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        const auto b = solve(x);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) num += x[i] * x[i], den += x[i] * b[i];
        lambda = num / den;
        double norm = 0.0;
        for (double v : b) norm = std::max(norm, std::abs(v));
        for (int i = 0; i < n; ++i) x[i] = b[i] / norm;
    }
    return lambda;
}

}  // namespace

TEST(FinFrequency, PolyimideInAirMatchesDiscretizedBeam) {
    FlexibleFinGeometry fin;
    fin.poisson_ratio = 0.0;
    const double f = fin_first_frequency(fin, std::nullopt);
    EXPECT_NEAR(f, 298.0, 1.0);
    // same beam solved numerically: f = sqrt(beta^4) / (2 pi L^2) sqrt(E t^2 / (12 rho))
    const double beta4 = fd_beam_beta4(400);
    const double f_fd = std::sqrt(beta4) / (2.0 * std::numbers::pi * 12e-3 * 12e-3) *
                        std::sqrt(2.5e9 * 200e-6 * 200e-6 / (12.0 * 1420.0));
    EXPECT_NEAR(f / f_fd, 1.0, 1e-3);
}

TEST(FinFrequency, DecreasesWithFinLength) {
    FlexibleFinGeometry fin;
    double prev = 1e300;
    for (double mm : {6.0, 9.0, 12.0, 15.0, 18.0}) {
        fin.fin_length_m = mm * 1e-3;
        const double f = fin_first_frequency(fin, FluidProperties{});
        EXPECT_LT(f, prev);
        prev = f;
    }
}

TEST(ChainFrequencies, MatchesSymmetricEigenSolve) {
    // M^-1/2 K M^-1/2 for K = [[k1+k2, -k2], [-k2, k2]], eigenvalues of a symmetric 2x2
    for (const auto& [k1, m1, k2, m2] : std::vector<std::array<double, 4>>{
             {1935.0, 2.56e-3, 12.0, 4e-5}, {3.0, 2.0, 5.0, 0.5}, {1e4, 1e-3, 1e2, 1e-5}}) {
        const double a = (k1 + k2) / m1, d = k2 / m2, b = -k2 / std::sqrt(m1 * m2);
        const double mid = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
        const double two_pi = 2.0 * std::numbers::pi;
        const auto f = chain_frequencies(k1, m1, k2, m2);
        EXPECT_NEAR(f.f1_hz / (std::sqrt(mid - rad) / two_pi), 1.0, 1e-9);
        EXPECT_NEAR(f.f2_hz / (std::sqrt(mid + rad) / two_pi), 1.0, 1e-9);
    }
}

TEST(ReducedModel, SoftAxisIsX) {
    const auto m = build_reduced_model({}, {}, FluidProperties{});
    EXPECT_LT(m.stiffness_x_n_m, m.stiffness_y_n_m);
}

TEST(ReducedModel, RejectsNegativeParticipation) {
    ModalConfig c;
    c.rod_mass_participation = -0.1;
    EXPECT_THROW(build_reduced_model({}, {}, FluidProperties{}, c), ValidationError);
}

TEST(ModalTrends, RodLengthAndAspect) {
    SweepBase base;
    base.rigid.joint_stiffness_per_area_pa_m = 8.736545e7;
    const auto l = modal_sweep({{SweepAxis::RodLength, {6e-3, 8e-3, 10e-3, 12e-3, 14e-3}}}, base);
    for (std::size_t i = 1; i < l.rows.size(); ++i) EXPECT_LT(l.rows[i].f1_hz, l.rows[i - 1].f1_hz);
    EXPECT_NEAR(l.rows[2].f1_hz, 138.0, 1e-3);
    const auto a = modal_sweep({{SweepAxis::AspectRatio, {1.0, 1.5, 2.0, 2.5}}}, base);
    for (std::size_t i = 1; i < a.rows.size(); ++i) EXPECT_GT(a.rows[i].gap_ratio, a.rows[i - 1].gap_ratio);
}
