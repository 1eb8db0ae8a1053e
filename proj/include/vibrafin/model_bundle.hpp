#pragma once

// Everything needed to evaluate the full model chain, plus a registry that
// exposes each tunable coefficient under a stable dotted name so that
// calibration, parameter files and the CLI all address parameters the same
// way.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "vibrafin/erm_motor.hpp"
#include "vibrafin/errors.hpp"
#include "vibrafin/locomotion.hpp"
#include "vibrafin/structural_modal.hpp"
#include "vibrafin/thrust_model.hpp"

namespace vibrafin {

struct LocomotionSettings {
    double duration_s = 30.0;
    double dt_s = 2e-3;
    double window_fraction = 0.3;
    // initial yaw rate of the standard runs; a small value exposes an unstable straight course
    double disturbance_yaw_rate_rad_s = 0.01;

    void validate() const {
        detail::require(duration_s > 2.0, "locomotion.duration_s", "must exceed 2 s");
        detail::require(dt_s > 0.0 && dt_s <= 5e-3, "locomotion.dt_s", "must lie in (0, 5 ms]");
        detail::require(window_fraction > 0.0 && window_fraction <= 1.0, "locomotion.window_fraction",
                        "must lie in (0, 1]");
        detail::require(std::isfinite(disturbance_yaw_rate_rad_s) && std::abs(disturbance_yaw_rate_rad_s) <= 1.0,
                        "locomotion.disturbance_yaw_rate_rad_s", "must lie in [-1, 1] rad/s");
    }
};

struct ModelBundle {
    motor::MotorSpec motor;
    modal::RigidPartGeometry rigid;
    modal::FlexibleFinGeometry fin;
    modal::FluidProperties fluid;
    modal::ModalConfig modal;
    thrust::StreamingCoefficients streaming;
    loco::FishBody body;
    LocomotionSettings locomotion;

    void validate() const {
        motor.validate();
        rigid.validate();
        fin.validate();
        fluid.validate();
        modal.validate();
        streaming.validate();
        body.validate();
        locomotion.validate();
    }
};

struct ParameterInfo {
    std::string name;
    std::string unit;
    double default_lower = 0.0;
    double default_upper = 0.0;
    std::function<double&(ModelBundle&)> ref;

    double get(const ModelBundle& b) const { return ref(const_cast<ModelBundle&>(b)); }
    void set(ModelBundle& b, double v) const { ref(b) = v; }
};

namespace detail {

inline std::vector<ParameterInfo> make_registry() {
    using loco::FinRole;
    std::vector<ParameterInfo> r;
    auto add = [&](std::string name, std::string unit, double lo, double hi, std::function<double&(ModelBundle&)> f) {
        r.push_back({std::move(name), std::move(unit), lo, hi, std::move(f)});
    };
    add("rigid.joint_stiffness_per_area_pa_m", "Pa/m", 1e6, 1e10,
        [](ModelBundle& b) -> double& { return b.rigid.joint_stiffness_per_area_pa_m; });
    add("rigid.rod_elastic_modulus_pa", "Pa", 1e8, 1e11,
        [](ModelBundle& b) -> double& { return b.rigid.rod_elastic_modulus_pa; });
    add("rigid.rigid_part_mass_kg", "kg", 1e-4, 2e-2,
        [](ModelBundle& b) -> double& { return b.rigid.rigid_part_mass_kg; });
    add("modal.added_mass_coefficient", "-", 0.01, 2.0,
        [](ModelBundle& b) -> double& { return b.modal.added_mass_coefficient; });
    add("modal.damping_ratio_x", "-", 1e-3, 0.5, [](ModelBundle& b) -> double& { return b.modal.damping_ratio_x; });
    add("modal.damping_ratio_y", "-", 1e-3, 0.5, [](ModelBundle& b) -> double& { return b.modal.damping_ratio_y; });
    add("modal.fin_damping_ratio", "-", 1e-3, 0.5, [](ModelBundle& b) -> double& { return b.modal.fin_damping_ratio; });
    add("streaming.c_u_m2", "m^2", 1e-14, 1e-2, [](ModelBundle& b) -> double& { return b.streaming.c_u_m2; });
    add("streaming.c_f", "-", 1e-3, 1e3, [](ModelBundle& b) -> double& { return b.streaming.c_f; });
    add("body.added_mass_surge_kg", "kg", 0.0, 3.0 * 0.088,
        [](ModelBundle& b) -> double& { return b.body.added_mass_surge_kg; });
    add("body.added_mass_sway_kg", "kg", 0.0, 5.0 * 0.088,
        [](ModelBundle& b) -> double& { return b.body.added_mass_sway_kg; });
    add("body.added_yaw_inertia_kg_m2", "kg m^2", 0.0, 10.0 * 4.51e-5,
        [](ModelBundle& b) -> double& { return b.body.added_yaw_inertia_kg_m2; });
    add("body.drag_area_surge_m2", "m^2", 5e-4, 3e-3,
        [](ModelBundle& b) -> double& { return b.body.drag_area_surge_m2; });
    add("body.drag_area_sway_m2", "m^2", 1e-6, 5e-2,
        [](ModelBundle& b) -> double& { return b.body.drag_area_sway_m2; });
    add("body.yaw_drag_nms2", "N m s^2", 1e-10, 1e-1, [](ModelBundle& b) -> double& { return b.body.yaw_drag_nms2; });
    add("body.yaw_damping_speed_ns", "N s", 1e-7, 1.0,
        [](ModelBundle& b) -> double& { return b.body.yaw_damping_speed_ns; });
    add("body.fin_thrust_left_n", "N", 3e-4, 5e-2,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::LeftPectoral).thrust_magnitude_n; });
    add("body.fin_thrust_right_n", "N", 3e-4, 5e-2,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::RightPectoral).thrust_magnitude_n; });
    add("body.fin_thrust_caudal_n", "N", 2e-3, 8e-3,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::Caudal).thrust_magnitude_n; });
    add("body.fin_x_left_m", "m", -0.5 * 0.085, 0.5 * 0.085,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::LeftPectoral).x_m; });
    add("body.fin_y_left_m", "m", 0.0, 0.5 * 0.055,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::LeftPectoral).y_m; });
    add("body.fin_x_right_m", "m", -0.5 * 0.085, 0.5 * 0.085,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::RightPectoral).x_m; });
    add("body.fin_y_right_m", "m", -0.5 * 0.055, 0.0,
        [](ModelBundle& b) -> double& { return b.body.fin(FinRole::RightPectoral).y_m; });
    return r;
}

}  // namespace detail

inline const std::vector<ParameterInfo>& parameter_registry() {
    static const std::vector<ParameterInfo> registry = detail::make_registry();
    return registry;
}

inline const ParameterInfo& parameter_info(std::string_view name) {
    const auto& reg = parameter_registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const ParameterInfo& p) { return p.name == name; });
    if (it == reg.end()) throw ConfigurationError("parameters", "unknown parameter '" + std::string(name) + "'");
    return *it;
}

}  // namespace vibrafin
