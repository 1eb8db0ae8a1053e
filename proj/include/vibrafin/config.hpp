#pragma once

// JSON files: toolkit configuration, parameter files, reference datasets
// and scenarios.
//
// Configuration fields carry their unit in the name (rod_length_mm,
// thickness_um, ...) and are converted to SI on load. Unknown fields are
// rejected so a misspelt or wrongly-suffixed key never passes silently.
// Parameter files hold registry parameters by name, in SI.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vibrafin/calibration.hpp"
#include "vibrafin/errors.hpp"
#include "vibrafin/locomotion.hpp"
#include "vibrafin/model_bundle.hpp"

namespace vibrafin::io {

using nlohmann::json;

inline constexpr int kParamsFormatVersion = 1;

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("path", "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigurationError("path", "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("out", "cannot write '" + path.string() + "'");
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

namespace detail {

// A JSON object section whose fields are consumed one by one; leftovers
// are reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigurationError(path_, "must be an object");
    }

    template <typename Fn>
    void number(const char* key, double scale, Fn&& assign) {
        used_.insert(key);
        if (!j_.contains(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigurationError(field(key), "must be a number");
        assign(v.get<double>() * scale);
    }

    void number(const char* key, double scale, double& target) {
        number(key, scale, [&](double v) { target = v; });
    }

    const json* child(const char* key) {
        used_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigurationError(field(it.key().c_str()), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline loco::FinRole parse_role(const std::string& s) {
    if (s == "left_pectoral") return loco::FinRole::LeftPectoral;
    if (s == "right_pectoral") return loco::FinRole::RightPectoral;
    if (s == "caudal") return loco::FinRole::Caudal;
    throw ConfigurationError("body.fins.role", "unknown fin role '" + s + "'");
}

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace detail

// ---------------------------------------------------------------------------
// Toolkit configuration

struct ToolkitConfig {
    ModelBundle bundle;
    // registry names whose values are defaults rather than fitted
    std::vector<std::string> uncalibrated;
};

inline std::vector<std::string> all_parameter_names() {
    std::vector<std::string> out;
    for (const auto& p : parameter_registry()) out.push_back(p.name);
    return out;
}

inline ToolkitConfig config_from_json(const json& j) {
    using detail::Section;
    ToolkitConfig cfg;
    cfg.uncalibrated = all_parameter_names();
    auto& b = cfg.bundle;
    Section root(j, "");

    if (const json* s = root.child("motor")) {
        Section m(*s, "motor");
        m.number("eccentric_mass_g", 1e-3, b.motor.eccentric_mass_kg);
        m.number("eccentricity_mm", 1e-3, b.motor.eccentricity_m);
        m.number("rated_voltage_v", 1.0, b.motor.rated_voltage_v);
        m.number("voltage_min_v", 1.0, b.motor.voltage_min_v);
        m.number("voltage_max_v", 1.0, b.motor.voltage_max_v);
        if (const json* pts = m.child("voltage_frequency_points")) {
            if (!pts->is_array()) throw ConfigurationError("motor.voltage_frequency_points", "must be an array");
            b.motor.voltage_freq_points.clear();
            for (const auto& p : *pts) {
                Section ps(p, "motor.voltage_frequency_points[]");
                motor::VoltageFrequencyPoint vp;
                ps.number("voltage_v", 1.0, vp.voltage_v);
                ps.number("frequency_hz", 1.0, vp.frequency_hz);
                ps.finish();
                b.motor.voltage_freq_points.push_back(vp);
            }
        }
        m.finish();
    }
    if (const json* s = root.child("rigid")) {
        Section r(*s, "rigid");
        r.number("rod_length_mm", 1e-3, b.rigid.rod_length_m);
        r.number("rod_height_mm", 1e-3, b.rigid.rod_height_m);
        r.number("rod_width_mm", 1e-3, b.rigid.rod_width_m);
        r.number("housing_length_mm", 1e-3, b.rigid.housing_length_m);
        r.number("cap_length_mm", 1e-3, b.rigid.cap_length_m);
        r.number("housing_diameter_mm", 1e-3, b.rigid.housing_diameter_m);
        r.number("rod_elastic_modulus_gpa", 1e9, b.rigid.rod_elastic_modulus_pa);
        r.number("rod_density_kg_m3", 1.0, b.rigid.rod_density_kg_m3);
        r.number("rigid_part_mass_g", 1e-3, b.rigid.rigid_part_mass_kg);
        r.number("joint_stiffness_per_area_pa_m", 1.0, b.rigid.joint_stiffness_per_area_pa_m);
        r.finish();
    }
    if (const json* s = root.child("fin")) {
        Section f(*s, "fin");
        f.number("fin_length_mm", 1e-3, b.fin.fin_length_m);
        f.number("thickness_um", 1e-6, b.fin.thickness_m);
        f.number("clamped_width_mm", 1e-3, b.fin.clamped_width_m);
        f.number("elastic_modulus_gpa", 1e9, b.fin.elastic_modulus_pa);
        f.number("density_kg_m3", 1.0, b.fin.density_kg_m3);
        f.number("poisson_ratio", 1.0, b.fin.poisson_ratio);
        f.finish();
    }
    if (const json* s = root.child("fluid")) {
        Section f(*s, "fluid");
        f.number("density_kg_m3", 1.0, b.fluid.density_kg_m3);
        f.number("dynamic_viscosity_pa_s", 1.0, b.fluid.dynamic_viscosity_pa_s);
        f.finish();
    }
    if (const json* s = root.child("modal")) {
        Section m(*s, "modal");
        m.number("rod_mass_participation", 1.0, b.modal.rod_mass_participation);
        m.number("fin_modal_mass_fraction", 1.0, b.modal.fin_modal_mass_fraction);
        m.number("added_mass_coefficient", 1.0, b.modal.added_mass_coefficient);
        m.number("damping_ratio_x", 1.0, b.modal.damping_ratio_x);
        m.number("damping_ratio_y", 1.0, b.modal.damping_ratio_y);
        m.number("fin_damping_ratio", 1.0, b.modal.fin_damping_ratio);
        m.finish();
    }
    if (const json* s = root.child("coefficients")) {
        Section c(*s, "coefficients");
        c.number("c_u_m2", 1.0, b.streaming.c_u_m2);
        c.number("c_f", 1.0, b.streaming.c_f);
        c.finish();
    }
    if (const json* s = root.child("body")) {
        Section f(*s, "body");
        f.number("mass_g", 1e-3, b.body.mass_kg);
        f.number("body_length_mm", 1e-3, b.body.body_length_m);
        f.number("body_width_mm", 1e-3, b.body.body_width_m);
        f.number("added_mass_surge_g", 1e-3, b.body.added_mass_surge_kg);
        f.number("added_mass_sway_g", 1e-3, b.body.added_mass_sway_kg);
        f.number("yaw_inertia_kg_m2", 1.0, b.body.yaw_inertia_kg_m2);
        f.number("added_yaw_inertia_kg_m2", 1.0, b.body.added_yaw_inertia_kg_m2);
        f.number("drag_area_surge_m2", 1.0, b.body.drag_area_surge_m2);
        f.number("drag_area_sway_m2", 1.0, b.body.drag_area_sway_m2);
        f.number("yaw_drag_nms2", 1.0, b.body.yaw_drag_nms2);
        f.number("yaw_damping_speed_ns", 1.0, b.body.yaw_damping_speed_ns);
        f.number("fluid_density_kg_m3", 1.0, b.body.fluid_density_kg_m3);
        f.number("spin_up_time_constant_s", 1.0, b.body.spin_up_time_constant_s);
        if (const json* fins = f.child("fins")) {
            if (!fins->is_array() || fins->size() != loco::kFinCount)
                throw ConfigurationError("body.fins", "must list exactly three fins");
            std::set<loco::FinRole> roles;
            for (const auto& fj : *fins) {
                Section fs(fj, "body.fins[]");
                const json* role = fs.child("role");
                if (!role || !role->is_string()) throw ConfigurationError("body.fins.role", "missing fin role");
                const auto r = detail::parse_role(role->get<std::string>());
                if (!roles.insert(r).second) throw ConfigurationError("body.fins.role", "duplicate fin role");
                auto& mount = b.body.fin(r);
                fs.number("x_mm", 1e-3, mount.x_m);
                fs.number("y_mm", 1e-3, mount.y_m);
                fs.number("thrust_direction_deg", detail::kDeg, mount.thrust_direction_rad);
                fs.number("thrust_magnitude_mn", 1e-3, mount.thrust_magnitude_n);
                fs.finish();
            }
        }
        f.finish();
    }
    if (const json* s = root.child("locomotion")) {
        Section l(*s, "locomotion");
        l.number("duration_s", 1.0, b.locomotion.duration_s);
        l.number("dt_ms", 1e-3, b.locomotion.dt_s);
        l.number("window_fraction", 1.0, b.locomotion.window_fraction);
        l.number("disturbance_yaw_rate_rad_s", 1.0, b.locomotion.disturbance_yaw_rate_rad_s);
        l.finish();
    }
    if (const json* s = root.child("uncalibrated")) {
        if (!s->is_array()) throw ConfigurationError("uncalibrated", "must be an array of parameter names");
        cfg.uncalibrated.clear();
        for (const auto& n : *s) {
            if (!n.is_string()) throw ConfigurationError("uncalibrated", "must be an array of parameter names");
            parameter_info(n.get<std::string>());
            cfg.uncalibrated.push_back(n.get<std::string>());
        }
    }
    root.finish();
    b.validate();
    return cfg;
}

inline json config_to_json(const ToolkitConfig& cfg) {
    const auto& b = cfg.bundle;
    json pts = json::array();
    for (const auto& p : b.motor.voltage_freq_points)
        pts.push_back({{"voltage_v", p.voltage_v}, {"frequency_hz", p.frequency_hz}});
    json fins = json::array();
    for (const auto& f : b.body.fins)
        fins.push_back({{"role", loco::to_string(f.role)},
                        {"x_mm", f.x_m * 1e3},
                        {"y_mm", f.y_m * 1e3},
                        {"thrust_direction_deg", f.thrust_direction_rad / detail::kDeg},
                        {"thrust_magnitude_mn", f.thrust_magnitude_n * 1e3}});
    return {
        {"motor",
         {{"eccentric_mass_g", b.motor.eccentric_mass_kg * 1e3},
          {"eccentricity_mm", b.motor.eccentricity_m * 1e3},
          {"voltage_frequency_points", pts},
          {"rated_voltage_v", b.motor.rated_voltage_v},
          {"voltage_min_v", b.motor.voltage_min_v},
          {"voltage_max_v", b.motor.voltage_max_v}}},
        {"rigid",
         {{"rod_length_mm", b.rigid.rod_length_m * 1e3},
          {"rod_height_mm", b.rigid.rod_height_m * 1e3},
          {"rod_width_mm", b.rigid.rod_width_m * 1e3},
          {"housing_length_mm", b.rigid.housing_length_m * 1e3},
          {"cap_length_mm", b.rigid.cap_length_m * 1e3},
          {"housing_diameter_mm", b.rigid.housing_diameter_m * 1e3},
          {"rod_elastic_modulus_gpa", b.rigid.rod_elastic_modulus_pa * 1e-9},
          {"rod_density_kg_m3", b.rigid.rod_density_kg_m3},
          {"rigid_part_mass_g", b.rigid.rigid_part_mass_kg * 1e3},
          {"joint_stiffness_per_area_pa_m", b.rigid.joint_stiffness_per_area_pa_m}}},
        {"fin",
         {{"fin_length_mm", b.fin.fin_length_m * 1e3},
          {"thickness_um", b.fin.thickness_m * 1e6},
          {"clamped_width_mm", b.fin.clamped_width_m * 1e3},
          {"elastic_modulus_gpa", b.fin.elastic_modulus_pa * 1e-9},
          {"density_kg_m3", b.fin.density_kg_m3},
          {"poisson_ratio", b.fin.poisson_ratio}}},
        {"fluid", {{"density_kg_m3", b.fluid.density_kg_m3}, {"dynamic_viscosity_pa_s", b.fluid.dynamic_viscosity_pa_s}}},
        {"modal",
         {{"rod_mass_participation", b.modal.rod_mass_participation},
          {"fin_modal_mass_fraction", b.modal.fin_modal_mass_fraction},
          {"added_mass_coefficient", b.modal.added_mass_coefficient},
          {"damping_ratio_x", b.modal.damping_ratio_x},
          {"damping_ratio_y", b.modal.damping_ratio_y},
          {"fin_damping_ratio", b.modal.fin_damping_ratio}}},
        {"coefficients", {{"c_u_m2", b.streaming.c_u_m2}, {"c_f", b.streaming.c_f}}},
        {"body",
         {{"mass_g", b.body.mass_kg * 1e3},
          {"body_length_mm", b.body.body_length_m * 1e3},
          {"body_width_mm", b.body.body_width_m * 1e3},
          {"added_mass_surge_g", b.body.added_mass_surge_kg * 1e3},
          {"added_mass_sway_g", b.body.added_mass_sway_kg * 1e3},
          {"yaw_inertia_kg_m2", b.body.yaw_inertia_kg_m2},
          {"added_yaw_inertia_kg_m2", b.body.added_yaw_inertia_kg_m2},
          {"drag_area_surge_m2", b.body.drag_area_surge_m2},
          {"drag_area_sway_m2", b.body.drag_area_sway_m2},
          {"yaw_drag_nms2", b.body.yaw_drag_nms2},
          {"yaw_damping_speed_ns", b.body.yaw_damping_speed_ns},
          {"fluid_density_kg_m3", b.body.fluid_density_kg_m3},
          {"spin_up_time_constant_s", b.body.spin_up_time_constant_s},
          {"fins", fins}}},
        {"locomotion",
         {{"duration_s", b.locomotion.duration_s},
          {"dt_ms", b.locomotion.dt_s * 1e3},
          {"window_fraction", b.locomotion.window_fraction},
          {"disturbance_yaw_rate_rad_s", b.locomotion.disturbance_yaw_rate_rad_s}}},
        {"uncalibrated", cfg.uncalibrated},
    };
}

inline ToolkitConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

// ---------------------------------------------------------------------------
// Parameter files

struct ParamsFile {
    std::vector<std::pair<std::string, double>> parameters;
    json fit;  // optional fit report carried alongside the values
};

inline ParamsFile params_from_json(const json& j) {
    detail::Section root(j, "");
    const json* fmt = root.child("format_version");
    if (!fmt || !fmt->is_number_integer() || fmt->get<int>() != kParamsFormatVersion)
        throw ConfigurationError("format_version", "unsupported parameter file version");
    ParamsFile p;
    const json* params = root.child("parameters");
    if (!params || !params->is_object()) throw ConfigurationError("parameters", "must be an object");
    for (auto it = params->begin(); it != params->end(); ++it) {
        parameter_info(it.key());
        if (!it.value().is_number()) throw ConfigurationError("parameters." + it.key(), "must be a number");
        p.parameters.emplace_back(it.key(), it.value().get<double>());
    }
    if (const json* fit = root.child("fit")) p.fit = *fit;
    root.finish();
    return p;
}

inline json params_to_json(const ParamsFile& p) {
    json params = json::object();
    for (const auto& [name, value] : p.parameters) params[name] = value;
    json j = {{"format_version", kParamsFormatVersion}, {"parameters", params}};
    if (!p.fit.is_null()) j["fit"] = p.fit;
    return j;
}

/// Applies a parameter file to a configuration; applied names are removed
/// from the uncalibrated list.
inline void apply_params(ToolkitConfig& cfg, const ParamsFile& p) {
    for (const auto& [name, value] : p.parameters) {
        parameter_info(name).set(cfg.bundle, value);
        std::erase(cfg.uncalibrated, name);
    }
    cfg.bundle.validate();
}

inline ParamsFile load_params(const std::filesystem::path& path) { return params_from_json(read_json(path)); }

inline json fit_report_json(const FitResult& fit) {
    json errors = json::array();
    for (const auto& e : fit.record_errors)
        errors.push_back({{"dataset", e.dataset},
                          {"label", e.label},
                          {"predicted", e.predicted},
                          {"target", e.target},
                          {"relative_error", e.relative_error},
                          {"tolerance", e.tolerance}});
    return {{"objective", fit.objective},
            {"converged", fit.converged},
            {"iterations", fit.iterations},
            {"evaluations", fit.evaluations},
            {"record_errors", errors}};
}

// ---------------------------------------------------------------------------
// Reference datasets

inline calib::ReferenceDataset dataset_from_json(const json& j) {
    detail::Section root(j, "dataset");
    calib::ReferenceDataset ds;
    const json* name = root.child("name");
    if (!name || !name->is_string()) throw ConfigurationError("dataset.name", "missing");
    ds.name = name->get<std::string>();
    if (const json* c = root.child("citation")) ds.citation = c->get<std::string>();
    const json* records = root.child("records");
    if (!records || !records->is_array()) throw ConfigurationError("dataset.records", "must be an array");
    for (const auto& rj : *records) {
        detail::Section rs(rj, "dataset.records[]");
        calib::DatasetRecord r;
        if (const json* v = rs.child("label")) r.label = v->get<std::string>();
        if (const json* v = rs.child("quantity")) r.quantity = v->get<std::string>();
        if (const json* v = rs.child("unit")) r.unit = v->get<std::string>();
        if (const json* v = rs.child("source")) r.source = v->get<std::string>();
        rs.number("target", 1.0, r.target);
        rs.number("tolerance", 1.0, r.tolerance);
        rs.number("lower", 1.0, [&](double v) { r.lower = v; });
        rs.number("upper", 1.0, [&](double v) { r.upper = v; });
        if (const json* in = rs.child("inputs")) {
            if (!in->is_object()) throw ConfigurationError("dataset.records.inputs", "must be an object");
            for (auto it = in->begin(); it != in->end(); ++it) {
                if (it.value().is_boolean()) {
                    r.inputs[it.key()] = it.value().get<bool>() ? 1.0 : 0.0;
                } else if (it.value().is_number()) {
                    r.inputs[it.key()] = it.value().get<double>();
                } else {
                    throw ConfigurationError("dataset.records.inputs." + it.key(), "must be a number or boolean");
                }
            }
        }
        rs.finish();
        ds.records.push_back(std::move(r));
    }
    root.finish();
    ds.validate();
    return ds;
}

inline json dataset_to_json(const calib::ReferenceDataset& ds) {
    json records = json::array();
    for (const auto& r : ds.records) {
        json inputs = json::object();
        for (const auto& [k, v] : r.inputs) inputs[k] = v;
        json rec{{"label", r.label}, {"quantity", r.quantity}, {"inputs", inputs}};
        if (r.is_bound()) {
            if (r.lower) rec["lower"] = *r.lower;
            if (r.upper) rec["upper"] = *r.upper;
        } else {
            rec["target"] = r.target;
            rec["tolerance"] = r.tolerance;
        }
        rec["unit"] = r.unit;
        rec["source"] = r.source;
        records.push_back(std::move(rec));
    }
    return {{"name", ds.name}, {"citation", ds.citation}, {"records", records}};
}

inline calib::ReferenceDataset load_dataset(const std::filesystem::path& path) {
    return dataset_from_json(read_json(path));
}

/// All *.json datasets in a directory, sorted by file name.
inline std::vector<calib::ReferenceDataset> load_datasets(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<calib::ReferenceDataset> out;
    for (const auto& f : files) out.push_back(load_dataset(f));
    return out;
}

// ---------------------------------------------------------------------------
// Scenarios

inline json fins_to_json(const loco::FinSet& f) { return {{"left", f[0]}, {"right", f[1]}, {"caudal", f[2]}}; }

inline loco::FinSet fins_from_json(const json& j, const std::string& path) {
    detail::Section s(j, path);
    loco::FinSet f = loco::kNoFins;
    const char* keys[] = {"left", "right", "caudal"};
    for (std::size_t i = 0; i < loco::kFinCount; ++i) {
        if (const json* v = s.child(keys[i])) {
            if (!v->is_boolean()) throw ConfigurationError(s.field(keys[i]), "must be a boolean");
            f[i] = v->get<bool>();
        }
    }
    s.finish();
    return f;
}

struct ScenarioFile {
    loco::Scenario scenario;
    json metadata = json::object();
};

inline ScenarioFile scenario_from_json(const json& j) {
    detail::Section root(j, "scenario");
    ScenarioFile out;
    auto& s = out.scenario;
    if (const json* v = root.child("name")) s.name = v->get<std::string>();
    if (const json* v = root.child("description")) s.description = v->get<std::string>();
    root.number("duration_s", 1.0, s.duration_s);
    root.number("dt_ms", 1e-3, s.dt_s);
    root.number("decimation", 1.0, [&](double v) {
        if (!(v >= 1.0) || v != std::floor(v)) throw ConfigurationError("scenario.decimation", "must be a positive integer");
        s.decimation = static_cast<std::size_t>(v);
    });
    if (const json* sched = root.child("schedule")) {
        if (!sched->is_array()) throw ConfigurationError("scenario.schedule", "must be an array");
        for (const auto& ej : *sched) {
            detail::Section es(ej, "scenario.schedule[]");
            loco::ScheduleEntry e;
            es.number("t_start_s", 1.0, e.t_start);
            es.number("t_end_s", 1.0, e.t_end);
            const json* fins = es.child("fins");
            if (!fins) throw ConfigurationError("scenario.schedule.fins", "missing");
            e.fins = fins_from_json(*fins, "scenario.schedule.fins");
            es.finish();
            s.schedule.push_back(e);
        }
    }
    if (const json* obs = root.child("obstacles")) {
        if (!obs->is_array()) throw ConfigurationError("scenario.obstacles", "must be an array");
        for (const auto& oj : *obs) {
            detail::Section os(oj, "scenario.obstacles[]");
            loco::Obstacle o;
            os.number("x_m", 1.0, o.x);
            os.number("y_m", 1.0, o.y);
            os.number("radius_mm", 1e-3, o.radius);
            os.finish();
            s.obstacles.push_back(o);
        }
    }
    if (const json* init = root.child("initial")) {
        detail::Section is(*init, "scenario.initial");
        is.number("t_s", 1.0, s.initial.t);
        is.number("x_m", 1.0, s.initial.x);
        is.number("y_m", 1.0, s.initial.y);
        is.number("theta_rad", 1.0, s.initial.theta);
        is.number("u_mps", 1.0, s.initial.u);
        is.number("v_mps", 1.0, s.initial.v);
        is.number("r_radps", 1.0, s.initial.r);
        is.finish();
    }
    if (const json* meta = root.child("metadata")) out.metadata = *meta;
    root.finish();
    s.validate();
    return out;
}

inline json scenario_to_json(const ScenarioFile& f) {
    const auto& s = f.scenario;
    json sched = json::array();
    for (const auto& e : s.schedule)
        sched.push_back({{"t_start_s", e.t_start}, {"t_end_s", e.t_end}, {"fins", fins_to_json(e.fins)}});
    json obs = json::array();
    for (const auto& o : s.obstacles) obs.push_back({{"x_m", o.x}, {"y_m", o.y}, {"radius_mm", o.radius * 1e3}});
    return {{"name", s.name},
            {"description", s.description},
            {"duration_s", s.duration_s},
            {"dt_ms", s.dt_s * 1e3},
            {"decimation", s.decimation},
            {"schedule", sched},
            {"obstacles", obs},
            {"initial",
             {{"t_s", s.initial.t},
              {"x_m", s.initial.x},
              {"y_m", s.initial.y},
              {"theta_rad", s.initial.theta},
              {"u_mps", s.initial.u},
              {"v_mps", s.initial.v},
              {"r_radps", s.initial.r}}},
            {"metadata", f.metadata}};
}

inline ScenarioFile load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json(path)); }

// ---------------------------------------------------------------------------
// Summary

inline json summary_to_json(const loco::TrajectorySummary& s, double body_length_m, std::size_t events) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
    return {{"steady_speed_m_s", s.steady_speed_m_s},
            {"steady_speed_cm_s", s.steady_speed_m_s * 100.0},
            {"steady_speed_bl_s", s.steady_speed_m_s / body_length_m},
            {"steady_yaw_rate_rad_s", s.steady_yaw_rate_rad_s},
            {"steady_surge_m_s", s.steady_surge_m_s},
            {"turning_radius_m", num(s.turning_radius_m)},
            {"turning_radius_bl", num(s.turning_radius_m / body_length_m)},
            {"kinematic_radius_m", num(s.kinematic_radius_m)},
            {"time_to_steady_s", s.time_to_steady_s},
            {"collision_events", events}};
}

}  // namespace vibrafin::io
