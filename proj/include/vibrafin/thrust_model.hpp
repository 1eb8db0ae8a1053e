#pragma once

// Rotating force -> oscillation amplitude -> streaming velocity -> thrust.
//
//   A_x1 = F0 / |k_x - m_x w^2 + i c_x w|                  rigid part, x
//   A_x2 = A_x1 m_f w^2 / |k_f - m_f w^2 + i c_f w|        fin tip, base excited
//   A_x3 = A_x1 + A_x2
//   U    = C_U rho A_x3^2 w^2 / mu                          C_U in m^2
//   F    = C_F rho U^2 L_f b
//
// The streaming scaling law is only a proportionality; C_U carries the
// missing length^2 so U comes out in m/s, and the thrust law is multiplied
// by the fin width b so that rho U^2 times an area gives a force. Absolute
// U values are therefore relative unless C_U has been calibrated.

#include <cmath>
#include <optional>

#include "vibrafin/erm_motor.hpp"
#include "vibrafin/errors.hpp"
#include "vibrafin/structural_modal.hpp"

namespace vibrafin::thrust {

using modal::FlexibleFinGeometry;
using modal::FluidProperties;
using modal::ModalConfig;
using modal::ReducedOrderModel;
using modal::RigidPartGeometry;

struct OscillationAmplitudes {
    double a_x1_m = 0.0;  // rigid part, x
    double a_x2_m = 0.0;  // fin free-end deformation, x
    double a_x3_m = 0.0;  // total, x
    double a_1y_m = 0.0;  // rigid part, y
};

struct StreamingCoefficients {
    double c_u_m2 = 1e-9;
    double c_f = 1.0;

    void validate() const {
        detail::require_positive(c_u_m2, "c_u_m2");
        detail::require_positive(c_f, "c_f");
    }
};

struct MarkerMeasurement {
    double d_x_m = 0.0;
    double d_x0_m = 0.0;
    double d_y_m = 0.0;
    double d_y0_m = 0.0;
};

namespace detail {

// |k - m w^2 + i c w|; throws on an undamped exact resonance.
inline double dynamic_stiffness(double k, double m, double c, double omega, const char* what) {
    const double re = k - m * omega * omega;
    const double im = c * omega;
    const double mag = std::hypot(re, im);
    if (mag == 0.0) throw SingularityError(std::string("undamped exact resonance in ") + what);
    return mag;
}

}  // namespace detail

inline OscillationAmplitudes forced_amplitude(const ReducedOrderModel& model, double force_amplitude_n,
                                              double omega_rad_s) {
    if (!(omega_rad_s > 0.0)) throw ValidationError("omega", "must be positive");
    vibrafin::detail::require_non_negative(force_amplitude_n, "F0");

    OscillationAmplitudes a;
    a.a_x1_m = force_amplitude_n / detail::dynamic_stiffness(model.stiffness_x_n_m, model.effective_mass_x_kg,
                                                             model.damping_x_ns_m, omega_rad_s, "rigid x mode");
    a.a_1y_m = force_amplitude_n / detail::dynamic_stiffness(model.stiffness_y_n_m, model.effective_mass_y_kg,
                                                             model.damping_y_ns_m, omega_rad_s, "rigid y mode");
    const double inertial = model.fin_modal_mass_kg * omega_rad_s * omega_rad_s;
    a.a_x2_m = a.a_x1_m * inertial /
               detail::dynamic_stiffness(model.fin_modal_stiffness_n_m, model.fin_modal_mass_kg,
                                         model.fin_modal_damping_ns_m, omega_rad_s, "fin mode");
    a.a_x3_m = a.a_x1_m + a.a_x2_m;
    return a;
}

inline double total_amplitude(double a_x1_m, double a_x2_m) {
    vibrafin::detail::require_non_negative(a_x1_m, "A_x1");
    vibrafin::detail::require_non_negative(a_x2_m, "A_x2");
    return a_x1_m + a_x2_m;
}

inline double streaming_velocity(double a_x3_m, double omega_rad_s, const FluidProperties& fluid,
                                 const StreamingCoefficients& coeffs) {
    vibrafin::detail::require_non_negative(a_x3_m, "A_x3");
    vibrafin::detail::require_non_negative(omega_rad_s, "omega");
    return coeffs.c_u_m2 * fluid.density_kg_m3 * a_x3_m * a_x3_m * omega_rad_s * omega_rad_s /
           fluid.dynamic_viscosity_pa_s;
}

inline double streaming_thrust(double velocity_m_s, const FlexibleFinGeometry& fin, const FluidProperties& fluid,
                               const StreamingCoefficients& coeffs) {
    vibrafin::detail::require_non_negative(velocity_m_s, "U");
    return coeffs.c_f * fluid.density_kg_m3 * velocity_m_s * velocity_m_s * fin.fin_length_m * fin.clamped_width_m;
}

struct ThrustPoint {
    double voltage_v = 0.0;
    double frequency_hz = 0.0;
    OscillationAmplitudes amplitudes;
    double velocity_m_s = 0.0;
    double thrust_n = 0.0;
};

/// Full chain at one supply voltage. No state is carried between calls.
inline ThrustPoint thrust_point(double voltage_v, const RigidPartGeometry& rigid, const FlexibleFinGeometry& fin,
                                const FluidProperties& fluid, const motor::MotorSpec& motor_spec,
                                const StreamingCoefficients& coeffs, const ModalConfig& config = {}) {
    motor_spec.validate();
    coeffs.validate();
    ThrustPoint p;
    p.voltage_v = voltage_v;
    p.frequency_hz = motor::drive_frequency(motor_spec, voltage_v);
    const double omega = motor::angular_velocity(p.frequency_hz);
    const double f0 = motor::centrifugal_amplitude(motor_spec, omega);
    const auto model = modal::build_reduced_model(rigid, fin, fluid, config);
    p.amplitudes = forced_amplitude(model, f0, omega);
    p.velocity_m_s = streaming_velocity(p.amplitudes.a_x3_m, omega, fluid, coeffs);
    p.thrust_n = streaming_thrust(p.velocity_m_s, fin, fluid, coeffs);
    return p;
}

inline double predict_thrust(double voltage_v, const RigidPartGeometry& rigid, const FlexibleFinGeometry& fin,
                             const FluidProperties& fluid, const motor::MotorSpec& motor_spec,
                             const StreamingCoefficients& coeffs, const ModalConfig& config = {}) {
    return thrust_point(voltage_v, rigid, fin, fluid, motor_spec, coeffs, config).thrust_n;
}

struct MarkerAmplitudes {
    double a_1x_m = 0.0;
    double a_1y_m = 0.0;
};

/// Peak rigid-part amplitudes from static and oscillating marker spacings.
inline MarkerAmplitudes amplitude_from_markers(const MarkerMeasurement& meas) {
    vibrafin::detail::require_non_negative(meas.d_x0_m, "d_x0");
    vibrafin::detail::require_non_negative(meas.d_y0_m, "d_y0");
    if (meas.d_x_m < meas.d_x0_m) throw ValidationError("d_x", "oscillating spacing is below the static spacing");
    if (meas.d_y_m < meas.d_y0_m) throw ValidationError("d_y", "oscillating spacing is below the static spacing");
    return {meas.d_x_m - meas.d_x0_m, meas.d_y_m - meas.d_y0_m};
}

}  // namespace vibrafin::thrust
