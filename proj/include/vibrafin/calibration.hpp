#pragma once

// Reference datasets and the least-squares fit of model coefficients.
//
// Each record names a model quantity, the inputs needed to evaluate it and
// a target value. The objective is
//
//   sum_i e_i^2  +  w * sum_i max(0, |e_i| - tol_i)^2  +  sum_j h_j^2
//
// with e_i the relative error of record i, w the tolerance weight and h_j
// the margin hinge of thrust-ordering record j:
//
//   h_j = max(0, ((1 + margin) F_bad - F_good) / F_good)
//
// Bound records carry a lower and/or upper limit instead of a target and
// add w * b_k^2, with b_k the violation relative to the limit.
//
// Parameters are searched in a unit box per parameter (logarithmic when the
// bounds span more than two decades) so every trial point respects bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vibrafin/errors.hpp"
#include "vibrafin/locomotion.hpp"
#include "vibrafin/model_bundle.hpp"
#include "vibrafin/optimize.hpp"
#include "vibrafin/parallel.hpp"
#include "vibrafin/structural_modal.hpp"
#include "vibrafin/thrust_model.hpp"

namespace vibrafin::calib {

namespace quantity {
inline constexpr const char* kDriveFrequency = "drive_frequency_hz";
inline constexpr const char* kFirstFrequency = "first_frequency_hz";
inline constexpr const char* kThrustOrdering = "thrust_ordering";
inline constexpr const char* kSteadySpeed = "steady_speed_m_s";
inline constexpr const char* kYawRate = "yaw_rate_rad_s";
inline constexpr const char* kTurningRadius = "turning_radius_m";
inline constexpr const char* kSurgeFraction = "surge_fraction";
}  // namespace quantity

struct DatasetRecord {
    std::string label;
    std::string quantity;
    std::map<std::string, double> inputs;
    double target = 0.0;
    std::string unit;
    double tolerance = 0.15;
    std::string source;
    std::optional<double> lower{};
    std::optional<double> upper{};

    bool is_bound() const { return lower.has_value() || upper.has_value(); }
};

struct ReferenceDataset {
    std::string name;
    std::string citation;
    std::vector<DatasetRecord> records;

    void validate() const {
        vibrafin::detail::require(!name.empty(), "dataset.name", "must not be empty");
        for (const auto& r : records) {
            if (r.source.empty() && citation.empty())
                throw ValidationError("dataset.records", "record '" + r.label + "' in '" + name +
                                                             "' carries no source citation");
            if (!std::isfinite(r.target)) throw ValidationError("dataset.records", "non-finite target in " + r.label);
            if (r.is_bound()) {
                if ((r.lower && !std::isfinite(*r.lower)) || (r.upper && !std::isfinite(*r.upper)) ||
                    (r.lower && r.upper && !(*r.lower <= *r.upper)))
                    throw ValidationError("dataset.records", "bad limits in " + r.label);
                continue;
            }
            if (r.quantity != quantity::kThrustOrdering && r.target == 0.0)
                throw ValidationError("dataset.records", "zero target in " + r.label + " has no relative error");
        }
    }
};

struct FreeParameter {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
};

/// Free parameter with the registry's default bounds.
inline FreeParameter free_parameter(const std::string& name) {
    const auto& info = parameter_info(name);
    return {name, info.default_lower, info.default_upper};
}

struct CalibrationOptions {
    NelderMeadOptions nelder_mead{1e-12, 1e-9, 4000, 0.05, 0.00025, false};
    double tolerance_weight = 100.0;
    double ordering_margin = 0.25;
    // additional simplex restarts from the best point
    int restarts = 2;
};

struct CalibrationResult {
    FitResult fit;
    ModelBundle bundle;
};

namespace detail {

inline double input(const DatasetRecord& r, const std::string& key) {
    const auto it = r.inputs.find(key);
    if (it == r.inputs.end())
        throw ConfigurationError("dataset.inputs", "record '" + r.label + "' lacks input '" + key + "'");
    return it->second;
}

inline double input_or(const DatasetRecord& r, const std::string& key, double fallback) {
    const auto it = r.inputs.find(key);
    return it == r.inputs.end() ? fallback : it->second;
}

inline loco::FinSet fin_set(const DatasetRecord& r) {
    return {input(r, "fin_left") != 0.0, input(r, "fin_right") != 0.0, input(r, "fin_caudal") != 0.0};
}

inline bool is_locomotion(const std::string& q) {
    return q == quantity::kSteadySpeed || q == quantity::kYawRate || q == quantity::kTurningRadius ||
           q == quantity::kSurgeFraction;
}

inline void check_resolvable(const ReferenceDataset& ds) {
    ds.validate();
    for (const auto& r : ds.records) {
        if (r.quantity == quantity::kDriveFrequency) {
            input(r, "voltage_v");
        } else if (r.quantity == quantity::kFirstFrequency) {
            input(r, "rod_length_m");
        } else if (r.quantity == quantity::kThrustOrdering) {
            if (r.is_bound())
                throw ConfigurationError("dataset.records", "record '" + r.label + "' in '" + ds.name +
                                                                "': thrust ordering takes no limits");
            input(r, "voltage_v");
            input(r, "good_fin_length_m");
            input(r, "bad_fin_length_m");
        } else if (is_locomotion(r.quantity)) {
            fin_set(r);
        } else {
            throw ConfigurationError("dataset.records", "record '" + r.label + "' in '" + ds.name +
                                                            "' has unknown quantity '" + r.quantity + "'");
        }
    }
}

inline std::size_t fin_key(const loco::FinSet& f) {
    return (f[0] ? 1u : 0u) | (f[1] ? 2u : 0u) | (f[2] ? 4u : 0u);
}

}  // namespace detail

/// Standard locomotion run used by the locomotion records: start at rest
/// apart from the configured yaw disturbance, hold `fins` on for the
/// configured duration.
inline loco::Scenario standard_scenario(const loco::FinSet& fins, const LocomotionSettings& settings) {
    loco::Scenario s;
    s.name = "standard";
    s.duration_s = settings.duration_s;
    s.dt_s = settings.dt_s;
    s.initial.r = settings.disturbance_yaw_rate_rad_s;
    s.schedule.push_back({0.0, settings.duration_s, fins});
    return s;
}

inline loco::TrajectorySummary run_standard(const loco::FinSet& fins, const ModelBundle& bundle) {
    const auto traj = loco::simulate(standard_scenario(fins, bundle.locomotion), bundle.body);
    return loco::summarize(loco::states_of(traj), bundle.locomotion.window_fraction);
}

inline double thrust_at(const ModelBundle& b, double voltage_v, double fin_length_m) {
    auto fin = b.fin;
    fin.fin_length_m = fin_length_m;
    return thrust::predict_thrust(voltage_v, b.rigid, fin, b.fluid, b.motor, b.streaming, b.modal);
}

struct Evaluation {
    double objective = 0.0;
    std::vector<RecordError> errors;
};

/// Evaluates every record of every dataset against `bundle`. Locomotion
/// runs are shared between records with the same fin set and may execute in
/// parallel; aggregation always follows dataset and record order.
inline Evaluation evaluate(const std::vector<ReferenceDataset>& datasets, const ModelBundle& bundle,
                           const CalibrationOptions& options = {}) {
    std::vector<loco::FinSet> runs;
    std::set<std::size_t> seen;
    for (const auto& ds : datasets)
        for (const auto& r : ds.records)
            if (detail::is_locomotion(r.quantity)) {
                const auto f = detail::fin_set(r);
                if (seen.insert(detail::fin_key(f)).second) runs.push_back(f);
            }
    std::vector<loco::TrajectorySummary> summaries(runs.size());
    parallel_for(runs.size(), [&](std::size_t i) { summaries[i] = run_standard(runs[i], bundle); });
    std::map<std::size_t, const loco::TrajectorySummary*> by_key;
    for (std::size_t i = 0; i < runs.size(); ++i) by_key[detail::fin_key(runs[i])] = &summaries[i];

    std::optional<modal::NaturalFrequencies> cached_modal;
    Evaluation ev;
    for (const auto& ds : datasets) {
        for (const auto& r : ds.records) {
            RecordError e{ds.name, r.label, 0.0, r.target, 0.0, r.tolerance};
            if (r.quantity == quantity::kThrustOrdering) {
                const double v = detail::input(r, "voltage_v");
                const double good = thrust_at(bundle, v, detail::input(r, "good_fin_length_m"));
                const double bad = thrust_at(bundle, v, detail::input(r, "bad_fin_length_m"));
                e.predicted = good;
                e.target = bad;
                e.relative_error = std::max(0.0, (bad - good) / good);
                const double hinge = std::max(0.0, ((1.0 + options.ordering_margin) * bad - good) / good);
                ev.objective += hinge * hinge;
            } else {
                if (r.quantity == quantity::kDriveFrequency) {
                    e.predicted = motor::drive_frequency(bundle.motor, detail::input(r, "voltage_v"));
                } else if (r.quantity == quantity::kFirstFrequency) {
                    auto rigid = bundle.rigid;
                    rigid.rod_length_m = detail::input(r, "rod_length_m");
                    rigid.rod_height_m = detail::input_or(r, "rod_height_m", rigid.rod_height_m);
                    rigid.rod_width_m = detail::input_or(r, "rod_width_m", rigid.rod_width_m);
                    e.predicted = modal::natural_frequencies(
                                      modal::build_reduced_model(rigid, bundle.fin, bundle.fluid, bundle.modal))
                                      .f1_hz;
                } else {
                    const auto& s = *by_key.at(detail::fin_key(detail::fin_set(r)));
                    if (r.quantity == quantity::kSteadySpeed) e.predicted = s.steady_speed_m_s;
                    if (r.quantity == quantity::kYawRate) e.predicted = std::abs(s.steady_yaw_rate_rad_s);
                    if (r.quantity == quantity::kTurningRadius) e.predicted = s.turning_radius_m;
                    if (r.quantity == quantity::kSurgeFraction)
                        e.predicted = s.steady_speed_m_s > 0.0 ? s.steady_surge_m_s / s.steady_speed_m_s : 0.0;
                }
                if (r.is_bound()) {
                    // violation relative to the limit it breaks, zero inside the limits
                    auto rel = [](double excess, double limit) {
                        return excess / std::max(std::abs(limit), 1e-12);
                    };
                    e.tolerance = 0.0;
                    e.target = r.lower ? *r.lower : *r.upper;
                    if (r.lower && e.predicted < *r.lower) {
                        e.relative_error = rel(e.predicted - *r.lower, *r.lower);
                    } else if (r.upper && e.predicted > *r.upper) {
                        e.target = *r.upper;
                        e.relative_error = rel(e.predicted - *r.upper, *r.upper);
                    }
                    if (!std::isfinite(e.relative_error)) e.relative_error = 1e6;
                    ev.objective += options.tolerance_weight * e.relative_error * e.relative_error;
                    ev.errors.push_back(e);
                    continue;
                }
                e.relative_error = (e.predicted - r.target) / r.target;
                if (!std::isfinite(e.relative_error)) e.relative_error = 1e6;
                const double excess = std::max(0.0, std::abs(e.relative_error) - r.tolerance);
                ev.objective += e.relative_error * e.relative_error + options.tolerance_weight * excess * excess;
            }
            ev.errors.push_back(e);
        }
    }
    return ev;
}

namespace detail {

struct UnitMap {
    double lower, upper;
    bool log;

    double to_unit(double v) const {
        const double s = log ? (std::log(v) - std::log(lower)) / (std::log(upper) - std::log(lower))
                             : (v - lower) / (upper - lower);
        return std::clamp(s, 0.0, 1.0);
    }
    double from_unit(double s) const {
        s = std::clamp(s, 0.0, 1.0);
        return log ? std::exp(std::log(lower) + s * (std::log(upper) - std::log(lower))) : lower + s * (upper - lower);
    }
};

}  // namespace detail

/// Fits the free parameters of `bundle` to the datasets with Nelder-Mead.
/// Throws ConfigurationError before any evaluation if a record cannot be
/// resolved or a parameter is unknown or badly bounded.
inline CalibrationResult fit_model_coefficients(const std::vector<ReferenceDataset>& datasets,
                                                const std::vector<FreeParameter>& free, const ModelBundle& bundle,
                                                const CalibrationOptions& options = {}) {
    for (const auto& ds : datasets) detail::check_resolvable(ds);
    bundle.validate();

    std::vector<const ParameterInfo*> infos;
    std::vector<detail::UnitMap> maps;
    for (const auto& p : free) {
        infos.push_back(&parameter_info(p.name));
        if (!(p.lower < p.upper))
            throw ConfigurationError("free_parameters", "bounds of '" + p.name + "' must satisfy lower < upper");
        const bool log = p.lower > 0.0 && p.upper / p.lower > 100.0;
        maps.push_back({p.lower, p.upper, log});
    }

    auto apply = [&](std::span<const double> s) {
        ModelBundle b = bundle;
        for (std::size_t i = 0; i < s.size(); ++i) infos[i]->set(b, maps[i].from_unit(s[i]));
        return b;
    };

    CalibrationResult out;
    for (const auto& p : free) out.fit.names.push_back(p.name);

    std::vector<double> s0;
    for (std::size_t i = 0; i < free.size(); ++i) s0.push_back(maps[i].to_unit(infos[i]->get(bundle)));

    if (free.empty()) {
        const auto ev = evaluate(datasets, bundle, options);
        out.bundle = bundle;
        out.fit.objective = ev.objective;
        out.fit.record_errors = ev.errors;
        out.fit.converged = true;
        out.fit.evaluations = 1;
        out.fit.best_history.push_back(ev.objective);
        return out;
    }

    const Objective objective = [&](std::span<const double> s) {
        try {
            return evaluate(datasets, apply(s), options).objective;
        } catch (const ValidationError&) {
            return 1e12;
        } catch (const SingularityError&) {
            return 1e12;
        }
    };

    FitResult fit = nelder_mead(objective, s0, options.nelder_mead);
    for (int k = 0; k < options.restarts; ++k) {
        FitResult next = nelder_mead(objective, fit.parameters, options.nelder_mead);
        const bool improved = next.objective < fit.objective;
        next.iterations += fit.iterations;
        next.evaluations += fit.evaluations;
        next.best_history.insert(next.best_history.begin(), fit.best_history.begin(), fit.best_history.end());
        for (auto& h : next.best_history) h = std::min(h, fit.objective);
        if (options.nelder_mead.record_probes)
            next.probes.insert(next.probes.begin(), fit.probes.begin(), fit.probes.end());
        if (!improved) {
            next.parameters = fit.parameters;
            next.objective = fit.objective;
        }
        fit = std::move(next);
        if (!improved) break;
    }

    out.bundle = apply(fit.parameters);
    const auto ev = evaluate(datasets, out.bundle, options);
    out.fit.objective = ev.objective;
    out.fit.record_errors = ev.errors;
    out.fit.converged = fit.converged;
    out.fit.iterations = fit.iterations;
    out.fit.evaluations = fit.evaluations + 1;
    out.fit.best_history = std::move(fit.best_history);
    out.fit.probes = std::move(fit.probes);
    for (std::size_t i = 0; i < free.size(); ++i) out.fit.parameters.push_back(infos[i]->get(out.bundle));
    return out;
}

/// Sets C_U so that the thrust model at (voltage, fin length) equals the
/// caudal fin thrust used by the locomotion model.
inline void tie_streaming_to_caudal(ModelBundle& b, double voltage_v, double fin_length_m) {
    const double target = b.body.fin(loco::FinRole::Caudal).thrust_magnitude_n;
    const double current = thrust_at(b, voltage_v, fin_length_m);
    if (!(current > 0.0)) throw NumericalError("thrust model predicts no thrust at the tie point");
    // F scales with C_U^2
    b.streaming.c_u_m2 *= std::sqrt(target / current);
}

struct Stage {
    std::string name;
    std::vector<std::string> datasets;
    std::vector<FreeParameter> free;
};

/// Bundled calibration: the rigid-part joint stiffness against the
/// resonance target, the fin added-mass and damping against the thrust
/// ordering, then the body coefficients against the locomotion targets
/// within the plausibility limits (forward swimming, straight all-fins run).
/// The stages share no parameters, so their order does not matter.
inline std::vector<Stage> default_stages() {
    auto fp = [](std::initializer_list<const char*> names) {
        std::vector<FreeParameter> out;
        for (const char* n : names) out.push_back(free_parameter(n));
        return out;
    };
    return {
        {"modal", {"voltage_frequency", "resonance_target"}, fp({"rigid.joint_stiffness_per_area_pa_m"})},
        {"thrust", {"thrust_ordering"}, fp({"modal.added_mass_coefficient", "modal.fin_damping_ratio"})},
        {"locomotion",
         {"locomotion_targets", "locomotion_plausibility"},
         fp({"body.fin_thrust_left_n", "body.fin_thrust_right_n", "body.fin_thrust_caudal_n",
             "body.drag_area_surge_m2", "body.drag_area_sway_m2", "body.yaw_drag_nms2", "body.yaw_damping_speed_ns",
             "body.added_mass_surge_kg", "body.added_mass_sway_kg", "body.added_yaw_inertia_kg_m2",
             "body.fin_x_left_m", "body.fin_y_left_m", "body.fin_x_right_m", "body.fin_y_right_m"})},
    };
}

inline std::vector<ReferenceDataset> select(const std::vector<ReferenceDataset>& all,
                                            const std::vector<std::string>& names) {
    std::vector<ReferenceDataset> out;
    for (const auto& n : names) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const ReferenceDataset& d) { return d.name == n; });
        if (it == all.end()) throw ConfigurationError("datasets", "dataset '" + n + "' not found");
        out.push_back(*it);
    }
    return out;
}

inline double max_abs_error(const std::vector<RecordError>& errors, const std::string& dataset) {
    double m = 0.0;
    for (const auto& e : errors)
        if (e.dataset == dataset) m = std::max(m, std::abs(e.relative_error));
    return m;
}

}  // namespace vibrafin::calib
