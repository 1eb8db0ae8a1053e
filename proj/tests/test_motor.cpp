#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "vibrafin/erm_motor.hpp"

using namespace vibrafin;

TEST(VoltageFrequency, LineThroughBothPoints) {
    // two points fix the line exactly: slope 6 Hz/V, intercept 120 Hz
    const motor::MotorSpec spec;
    const auto line = motor::voltage_frequency_line(spec);
    EXPECT_NEAR(line.slope, 6.0, 1e-12);
    EXPECT_NEAR(line.intercept, 120.0, 1e-12);
    EXPECT_NEAR(motor::drive_frequency(spec, 3.0), 138.0, 1e-9);
    EXPECT_NEAR(motor::drive_frequency(spec, 4.0), 144.0, 1e-9);
    EXPECT_NEAR(motor::drive_frequency(spec, 3.5), 141.0, 1e-9);
}

TEST(VoltageFrequency, LeastSquaresWithThreePoints) {
    // (0,1), (1,3), (2,4): slope 1.5, intercept 7/6
    motor::MotorSpec spec;
    spec.voltage_freq_points = {{0.0, 1.0}, {1.0, 3.0}, {2.0, 4.0}};
    spec.voltage_min_v = 0.0;
    spec.voltage_max_v = 2.0;
    spec.rated_voltage_v = 1.0;
    const auto line = motor::voltage_frequency_line(spec);
    EXPECT_NEAR(line.slope, 1.5, 1e-12);
    EXPECT_NEAR(line.intercept, 7.0 / 6.0, 1e-12);
}

TEST(VoltageFrequency, RejectsOutOfRange) {
    const motor::MotorSpec spec;
    EXPECT_THROW(motor::drive_frequency(spec, 2.99), OutOfRangeError);
    EXPECT_THROW(motor::drive_frequency(spec, 4.01), OutOfRangeError);
    EXPECT_NO_THROW(motor::drive_frequency(spec, 3.0));
    EXPECT_NO_THROW(motor::drive_frequency(spec, 4.0));
}

TEST(MotorSpec, ValidatesPoints) {
    motor::MotorSpec spec;
    spec.voltage_freq_points = {{3.0, 138.0}};
    EXPECT_THROW(spec.validate(), ValidationError);
    spec.voltage_freq_points = {{3.0, 138.0}, {3.0, 140.0}};
    EXPECT_THROW(spec.validate(), ValidationError);
    spec.voltage_freq_points = {{3.0, 138.0}, {4.0, 137.0}};
    EXPECT_THROW(spec.validate(), ValidationError);
    spec = {};
    spec.eccentric_mass_kg = 0.0;
    EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(CentrifugalForce, HandValueAt138Hz) {
    // 0.9 g * 0.5 mm * (2 pi 138)^2 evaluated by hand
    const motor::MotorSpec spec;
    const double omega = motor::angular_velocity(138.0);
    EXPECT_NEAR(omega, 867.0795724, 1e-6);
    EXPECT_NEAR(motor::centrifugal_amplitude(spec, omega), 0.3383221431858, 1e-12);
    EXPECT_EQ(motor::centrifugal_amplitude(spec, 0.0), 0.0);
    EXPECT_THROW(motor::centrifugal_amplitude(spec, -1.0), ValidationError);
}

TEST(CentrifugalForce, ScalesWithSquareOfSpeed) {
    const motor::MotorSpec spec;
    const double f1 = motor::centrifugal_amplitude(spec, 100.0);
    const double f2 = motor::centrifugal_amplitude(spec, 200.0);
    EXPECT_NEAR(f2 / f1, 4.0, 1e-12);
}

TEST(RotatingForce, Components) {
    const motor::RotatingForce f{2.0, std::numbers::pi, 0.0};
    auto c = motor::force_components(f, 0.0);
    EXPECT_NEAR(c.fx, 2.0, 1e-15);
    EXPECT_NEAR(c.fy, 0.0, 1e-15);
    c = motor::force_components(f, 0.5);
    EXPECT_NEAR(c.fx, 0.0, 1e-12);
    EXPECT_NEAR(c.fy, 2.0, 1e-12);
    for (double t : {0.1, 0.37, 1.9}) {
        c = motor::force_components(f, t);
        EXPECT_NEAR(std::hypot(c.fx, c.fy), 2.0, 1e-12);
    }
    EXPECT_THROW(motor::force_components(f, -0.1), ValidationError);
}
