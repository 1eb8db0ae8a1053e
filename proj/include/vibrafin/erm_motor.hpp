#pragma once

// Eccentric-rotating-mass (ERM) vibration motor.
//
// The motor is treated as a prescribed-frequency force source: the supply
// voltage sets the spin frequency through a fitted line, and the spinning
// eccentric mass m at radius d produces a rotating centrifugal force
//
//   F(t) = F0 e^{i(wt + phi)},  F0 = m d w^2
//
// There is no electrical model (no current, torque ripple or spin-up).

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vibrafin/errors.hpp"
#include "vibrafin/optimize.hpp"

namespace vibrafin::motor {

struct VoltageFrequencyPoint {
    double voltage_v = 0.0;
    double frequency_hz = 0.0;
};

struct MotorSpec {
    // m and d are not reported for the motor; these are typical small-ERM
    // values and only the product m*d matters downstream (absorbed by
    // calibration of the streaming constants).
    double eccentric_mass_kg = 0.9e-3;
    double eccentricity_m = 0.5e-3;
    std::vector<VoltageFrequencyPoint> voltage_freq_points{{3.0, 138.0}, {4.0, 144.0}};
    double rated_voltage_v = 3.0;
    double voltage_min_v = 3.0;
    double voltage_max_v = 4.0;

    void validate() const {
        detail::require_positive(eccentric_mass_kg, "eccentric_mass_kg");
        detail::require_positive(eccentricity_m, "eccentricity_m");
        detail::require(voltage_freq_points.size() >= 2, "voltage_freq_points", "needs at least two points");
        for (std::size_t i = 1; i < voltage_freq_points.size(); ++i) {
            const auto& a = voltage_freq_points[i - 1];
            const auto& b = voltage_freq_points[i];
            detail::require(b.voltage_v > a.voltage_v, "voltage_freq_points", "voltages must strictly increase");
            detail::require(b.frequency_hz > a.frequency_hz, "voltage_freq_points",
                            "frequencies must strictly increase");
        }
        detail::require(voltage_min_v < voltage_max_v, "voltage_range", "min must be below max");
        detail::require(rated_voltage_v >= voltage_min_v && rated_voltage_v <= voltage_max_v, "rated_voltage_v",
                        "must lie inside voltage_range");
    }
};

struct RotatingForce {
    double amplitude_n = 0.0;
    double angular_velocity_rad_s = 0.0;
    double phase_rad = 0.0;
};

struct ForceComponents {
    double fx = 0.0;
    double fy = 0.0;
};

inline LinearFit voltage_frequency_line(const MotorSpec& spec) {
    std::vector<Point2> pts;
    pts.reserve(spec.voltage_freq_points.size());
    for (const auto& p : spec.voltage_freq_points) pts.push_back({p.voltage_v, p.frequency_hz});
    return fit_linear(pts);
}

/// Spin frequency [Hz] at `voltage_v` from the least-squares line through
/// the measured voltage/frequency points. No extrapolation outside the range.
inline double drive_frequency(const MotorSpec& spec, double voltage_v) {
    if (!(voltage_v >= spec.voltage_min_v && voltage_v <= spec.voltage_max_v))
        throw OutOfRangeError("voltage", "voltage " + std::to_string(voltage_v) + " V outside motor range [" +
                                             std::to_string(spec.voltage_min_v) + ", " +
                                             std::to_string(spec.voltage_max_v) + "] V");
    return voltage_frequency_line(spec)(voltage_v);
}

inline double angular_velocity(double frequency_hz) { return 2.0 * std::numbers::pi * frequency_hz; }

/// F0 = m d w^2 [N].
inline double centrifugal_amplitude(const MotorSpec& spec, double omega_rad_s) {
    if (!(omega_rad_s >= 0.0)) throw ValidationError("omega", "must be non-negative");
    return spec.eccentric_mass_kg * spec.eccentricity_m * omega_rad_s * omega_rad_s;
}

inline ForceComponents force_components(const RotatingForce& force, double t) {
    if (!(t >= 0.0)) throw ValidationError("t", "must be non-negative");
    const double angle = force.angular_velocity_rad_s * t + force.phase_rad;
    return {force.amplitude_n * std::cos(angle), force.amplitude_n * std::sin(angle)};
}

}  // namespace vibrafin::motor
