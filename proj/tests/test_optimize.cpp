#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "vibrafin/optimize.hpp"

using namespace vibrafin;

namespace {

double rosenbrock(std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
}

}  // namespace

TEST(FitLinear, ExactAndErrors) {
    const std::vector<Point2> pts{{1.0, 3.0}, {2.0, 5.0}, {4.0, 9.0}};
    const auto f = fit_linear(pts);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_THROW(fit_linear(std::vector<Point2>{{1.0, 1.0}}), ValidationError);
    EXPECT_THROW(fit_linear(std::vector<Point2>{{1.0, 1.0}, {1.0, 2.0}}), ValidationError);
}

TEST(NelderMead, Rosenbrock) {
    NelderMeadOptions opt;
    opt.max_iter = 5000;
    opt.f_tol = 1e-16;
    opt.x_tol = 1e-12;
    const auto r = nelder_mead(rosenbrock, {-1.2, 1.0}, opt);
    EXPECT_NEAR(r.parameters[0], 1.0, 1e-4);
    EXPECT_NEAR(r.parameters[1], 1.0, 1e-4);
    EXPECT_TRUE(r.converged);
}

TEST(NelderMead, QuadraticBowl) {
    const auto r = nelder_mead(
        [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0) + 4.0 * (x[1] + 1.0) * (x[1] + 1.0) + 2.0; },
        {0.0, 0.0});
    EXPECT_NEAR(r.parameters[0], 3.0, 1e-4);
    EXPECT_NEAR(r.parameters[1], -1.0, 1e-4);
    EXPECT_NEAR(r.objective, 2.0, 1e-8);
}

TEST(NelderMead, BestHistoryIsMonotoneAndDominatesProbes) {
    NelderMeadOptions opt;
    opt.record_probes = true;
    const auto r = nelder_mead(rosenbrock, {-1.2, 1.0}, opt);
    ASSERT_FALSE(r.best_history.empty());
    for (std::size_t i = 1; i < r.best_history.size(); ++i) EXPECT_LE(r.best_history[i], r.best_history[i - 1]);
    ASSERT_FALSE(r.probes.empty());
    for (const auto& p : r.probes) EXPECT_LE(r.objective, p.value);
    EXPECT_EQ(static_cast<int>(r.probes.size()), r.evaluations);
}

TEST(NelderMead, StopsAtIterationCap) {
    NelderMeadOptions opt;
    opt.max_iter = 5;
    const auto r = nelder_mead(rosenbrock, {-1.2, 1.0}, opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 5);
}

TEST(NelderMead, NonFiniteObjectiveCarriesPoint) {
    try {
        nelder_mead([](std::span<const double> x) { return x[0] > 0.0 ? std::nan("") : -x[0]; }, {-1.0});
        FAIL() << "expected NonFiniteObjectiveError";
    } catch (const NonFiniteObjectiveError& e) {
        ASSERT_EQ(e.point().size(), 1u);
        EXPECT_GT(e.point()[0], 0.0);
    }
}

TEST(NelderMead, RejectsEmptyStart) { EXPECT_THROW(nelder_mead(rosenbrock, {}), ValidationError); }

TEST(GoldenSection, Parabola) {
    const auto r = golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-8);
    EXPECT_NEAR(r.x, 0.3, 1e-7);
    EXPECT_FALSE(r.at_boundary);
    for (const auto& p : r.probes) EXPECT_LE(r.value, p.value);
}

TEST(GoldenSection, BoundaryMinimum) {
    const auto r = golden_section([](double x) { return x; }, 2.0, 5.0, 1e-6);
    EXPECT_DOUBLE_EQ(r.x, 2.0);
    EXPECT_TRUE(r.at_boundary);
}

TEST(GoldenSection, DegenerateInterval) {
    const auto r = golden_section([](double x) { return x * x; }, 1.5, 1.5, 1e-6);
    EXPECT_DOUBLE_EQ(r.x, 1.5);
    EXPECT_EQ(r.probes.size(), 1u);
}

TEST(GoldenSection, Errors) {
    EXPECT_THROW(golden_section([](double x) { return x; }, 1.0, 0.0, 1e-6), ValidationError);
    EXPECT_THROW(golden_section([](double x) { return x; }, 0.0, 1.0, 0.0), ValidationError);
    EXPECT_THROW(golden_section([](double) { return std::numeric_limits<double>::infinity(); }, 0.0, 1.0, 1e-3),
                 NonFiniteObjectiveError);
}
