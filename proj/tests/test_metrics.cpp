#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "vibrafin/config.hpp"
#include "vibrafin/locomotion.hpp"

using namespace vibrafin;
using namespace vibrafin::loco;

namespace {

// constant-speed circle of radius R about (cx, cy), counter-clockwise
std::vector<SimState> circle_path(double radius, double speed, double duration, double dt, double cx = 0.3,
                                  double cy = -0.2) {
    std::vector<SimState> out;
    const double w = speed / radius;
    for (int k = 0; k * dt <= duration + 1e-12; ++k) {
        SimState s;
        s.t = k * dt;
        const double a = w * s.t;
        s.x = cx + radius * std::sin(a);
        s.y = cy - radius * std::cos(a);
        s.theta = a;
        s.u = speed;
        s.r = w;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(Summarize, RecoversCircleRadius) {
    const auto path = circle_path(0.10, 0.08, 20.0, 0.01);
    const auto s = summarize(path);
    EXPECT_NEAR(s.turning_radius_m, 0.10, 1e-9);
    EXPECT_NEAR(s.steady_speed_m_s, 0.08, 1e-12);
    EXPECT_NEAR(s.steady_yaw_rate_rad_s, 0.8, 1e-12);
    EXPECT_NEAR(s.kinematic_radius_m, 0.10, 1e-12);
}

TEST(Summarize, PartialArcStillFitsRadius) {
    // window shorter than one revolution
    const auto path = circle_path(0.10, 0.01, 30.0, 0.01);
    const auto s = summarize(path, 0.2);
    EXPECT_NEAR(s.turning_radius_m, 0.10, 1e-6);
}

TEST(Summarize, StraightPathHasInfiniteRadius) {
    std::vector<SimState> path;
    for (int k = 0; k <= 1000; ++k) {
        SimState s;
        s.t = k * 0.01;
        s.x = 0.05 * s.t;
        s.u = 0.05;
        path.push_back(s);
    }
    const auto s = summarize(path);
    EXPECT_TRUE(std::isinf(s.turning_radius_m));
    EXPECT_TRUE(std::isinf(s.kinematic_radius_m));
    EXPECT_EQ(s.steady_yaw_rate_rad_s, 0.0);
    EXPECT_NEAR(s.steady_speed_m_s, 0.05, 1e-15);
}

TEST(Summarize, TimeToSteady) {
    // speed ramps up linearly for 4.1 s, then holds
    std::vector<SimState> path;
    for (int k = 0; k <= 1000; ++k) {
        SimState s;
        s.t = k * 0.01;
        s.u = std::min(1.0, s.t / 4.1) * 0.1;
        path.push_back(s);
    }
    const auto s = summarize(path);
    // u >= 0.098 from t = 0.98 * 4.1 = 4.018 s, first sample at 4.02 s
    EXPECT_NEAR(s.time_to_steady_s, 4.02, 1e-9);
}

TEST(Summarize, Rejections) {
    EXPECT_THROW(summarize({}), ValidationError);
    const auto short_path = circle_path(0.1, 0.1, 1.5, 0.01);
    EXPECT_THROW(summarize(short_path), ValidationError);
    const auto path = circle_path(0.1, 0.1, 10.0, 0.01);
    EXPECT_THROW(summarize(path, 0.0), ValidationError);
    EXPECT_THROW(summarize(path, 1.5), ValidationError);
    const auto sparse = circle_path(0.1, 0.1, 10.0, 2.5);
    EXPECT_THROW(summarize(sparse, 0.3), ValidationError);
}

TEST(FitCircle, ExactThreePoints) {
    const auto c = fit_circle({{{1.0, 0.0}}, {{0.0, 1.0}}, {{-1.0, 0.0}}});
    EXPECT_NEAR(c.cx, 0.0, 1e-12);
    EXPECT_NEAR(c.cy, 0.0, 1e-12);
    EXPECT_NEAR(c.radius, 1.0, 1e-12);
}

TEST(FitCircle, CollinearIsDegenerate) {
    EXPECT_THROW(fit_circle({{{0.0, 0.0}}, {{1.0, 1.0}}, {{2.0, 2.0}}}), NumericalError);
    EXPECT_THROW(fit_circle({{{0.0, 0.0}}, {{1.0, 1.0}}}), ValidationError);
}

TEST(Summarize, SimulatedTurnIsKinematicallyConsistent) {
    Scenario sc;
    sc.duration_s = 30.0;
    sc.dt_s = 2e-3;
    sc.schedule.push_back({0.0, 30.0, {true, false, true}});
    const std::filesystem::path root = std::filesystem::path(VIBRAFIN_DATA_DIR).parent_path();
    const auto body = io::load_config(root / "configs" / "calibration_start.json").bundle.body;
    const auto s = summarize(states_of(simulate(sc, body)));
    ASSERT_TRUE(std::isfinite(s.turning_radius_m));
    EXPECT_LT(std::abs(s.steady_speed_m_s - std::abs(s.steady_yaw_rate_rad_s) * s.turning_radius_m) /
                  s.steady_speed_m_s,
              0.02);
}
