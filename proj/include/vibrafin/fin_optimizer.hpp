#pragma once

// Fin geometry design: rod length for resonance matching and fin length for
// maximum thrust.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vibrafin/errors.hpp"
#include "vibrafin/model_bundle.hpp"
#include "vibrafin/optimize.hpp"
#include "vibrafin/parallel.hpp"
#include "vibrafin/structural_modal.hpp"
#include "vibrafin/thrust_model.hpp"

namespace vibrafin::design {

/// ((f1 - target) / target)^2 for the rigid-part first mode.
inline double resonance_mismatch(const modal::RigidPartGeometry& rigid, const modal::FlexibleFinGeometry& fin,
                                 const std::optional<modal::FluidProperties>& fluid, double target_hz,
                                 const modal::ModalConfig& config = {}) {
    detail::require_positive(target_hz, "target_freq");
    const double f1 = modal::natural_frequencies(modal::build_reduced_model(rigid, fin, fluid, config)).f1_hz;
    const double rel = (f1 - target_hz) / target_hz;
    return rel * rel;
}

enum class SearchMethod { GoldenSection, GridRefine };

inline const char* to_string(SearchMethod m) {
    return m == SearchMethod::GoldenSection ? "golden_section" : "grid_refine";
}

struct RodLengthResult {
    double rod_length_m = 0.0;
    double mismatch = 0.0;
    double f1_hz = 0.0;
    bool at_boundary = false;
    SearchMethod method = SearchMethod::GoldenSection;
    std::vector<Probe> probes;
};

struct RodLengthOptions {
    double x_tol_m = 1e-5;
    // points used to check that f1 decreases with L
    int monotone_probes = 9;
    int fallback_grid = 201;
};

/// Rod length in [lower, upper] whose first mode best matches `target_hz`.
/// Golden-section search when f1 is monotone in L over the bounds (checked
/// on a probe grid), otherwise a dense grid plus golden-section refinement
/// around the best grid cell.
inline RodLengthResult optimize_rod_length(double lower_m, double upper_m, const ModelBundle& bundle,
                                           double target_hz, const RodLengthOptions& options = {}) {
    if (!(lower_m <= upper_m)) throw ValidationError("bounds", "lower bound must not exceed upper bound");
    detail::require_positive(lower_m, "bounds.lower");
    auto f1_at = [&](double L) {
        auto rigid = bundle.rigid;
        rigid.rod_length_m = L;
        return modal::natural_frequencies(modal::build_reduced_model(rigid, bundle.fin, bundle.fluid, bundle.modal))
            .f1_hz;
    };
    auto mismatch = [&](double L) {
        const double rel = (f1_at(L) - target_hz) / target_hz;
        return rel * rel;
    };
    detail::require_positive(target_hz, "target_freq");

    RodLengthResult out;
    bool monotone = true;
    if (upper_m > lower_m) {
        double prev = f1_at(lower_m);
        for (int i = 1; i < options.monotone_probes; ++i) {
            const double L = lower_m + (upper_m - lower_m) * i / (options.monotone_probes - 1);
            const double f = f1_at(L);
            if (!(f < prev)) monotone = false;
            prev = f;
        }
    }

    if (monotone) {
        const auto gs = golden_section(mismatch, lower_m, upper_m, options.x_tol_m);
        out.rod_length_m = gs.x;
        out.mismatch = gs.value;
        out.at_boundary = gs.at_boundary;
        out.probes = gs.probes;
    } else {
        out.method = SearchMethod::GridRefine;
        const int n = options.fallback_grid;
        double best_x = lower_m, best_v = mismatch(lower_m);
        out.probes.push_back({{best_x}, best_v});
        for (int i = 1; i < n; ++i) {
            const double L = lower_m + (upper_m - lower_m) * i / (n - 1);
            const double v = mismatch(L);
            out.probes.push_back({{L}, v});
            if (v < best_v) best_x = L, best_v = v;
        }
        const double h = (upper_m - lower_m) / (n - 1);
        const auto gs = golden_section(mismatch, std::max(lower_m, best_x - h), std::min(upper_m, best_x + h),
                                       options.x_tol_m);
        out.probes.insert(out.probes.end(), gs.probes.begin(), gs.probes.end());
        const auto best = std::min_element(out.probes.begin(), out.probes.end(),
                                           [](const Probe& p, const Probe& q) { return p.value < q.value; });
        out.rod_length_m = best->x[0];
        out.mismatch = best->value;
        out.at_boundary = out.rod_length_m - lower_m <= options.x_tol_m || upper_m - out.rod_length_m <= options.x_tol_m;
    }
    out.f1_hz = f1_at(out.rod_length_m);
    return out;
}

struct FinLengthResult {
    double fin_length_m = 0.0;
    double thrust_n = 0.0;
    double best_grid_thrust_n = 0.0;
    std::vector<Probe> probes;
};

inline double thrust_for_fin_length(const ModelBundle& b, double voltage_v, double fin_length_m) {
    auto fin = b.fin;
    fin.fin_length_m = fin_length_m;
    return thrust::predict_thrust(voltage_v, b.rigid, fin, b.fluid, b.motor, b.streaming, b.modal);
}

/// Fin length in [lower, upper] maximizing predicted thrust at `voltage_v`:
/// a 64-point grid scan, then Nelder-Mead from the best grid point with the
/// search clamped to the bounds. Probes hold negated thrust (minimized).
inline FinLengthResult optimize_fin_length(double lower_m, double upper_m, double voltage_v,
                                           const ModelBundle& bundle) {
    if (!(lower_m <= upper_m)) throw ValidationError("bounds", "lower bound must not exceed upper bound");
    detail::require_positive(lower_m, "bounds.lower");
    motor::drive_frequency(bundle.motor, voltage_v);

    FinLengthResult out;
    if (upper_m == lower_m) {
        out.fin_length_m = lower_m;
        out.thrust_n = out.best_grid_thrust_n = thrust_for_fin_length(bundle, voltage_v, lower_m);
        out.probes.push_back({{lower_m}, -out.thrust_n});
        return out;
    }

    constexpr std::size_t kGrid = 64;
    std::vector<double> grid(kGrid), thrust(kGrid);
    for (std::size_t i = 0; i < kGrid; ++i)
        grid[i] = lower_m + (upper_m - lower_m) * static_cast<double>(i) / static_cast<double>(kGrid - 1);
    parallel_for(kGrid, [&](std::size_t i) { thrust[i] = thrust_for_fin_length(bundle, voltage_v, grid[i]); });
    for (std::size_t i = 0; i < kGrid; ++i) out.probes.push_back({{grid[i]}, -thrust[i]});
    const auto best = static_cast<std::size_t>(std::max_element(thrust.begin(), thrust.end()) - thrust.begin());
    out.best_grid_thrust_n = thrust[best];

    // refine in millimetres so the simplex steps are well scaled
    const Objective neg = [&](std::span<const double> x) {
        const double L = std::clamp(x[0] * 1e-3, lower_m, upper_m);
        return -thrust_for_fin_length(bundle, voltage_v, L);
    };
    NelderMeadOptions nm;
    nm.f_tol = 1e-18;
    nm.x_tol = 1e-7;
    nm.initial_step = 0.01;
    nm.record_probes = true;
    const auto fit = nelder_mead(neg, {grid[best] * 1e3}, nm);
    for (const auto& p : fit.probes) out.probes.push_back({{std::clamp(p.x[0] * 1e-3, lower_m, upper_m)}, p.value});

    const auto it = std::min_element(out.probes.begin(), out.probes.end(),
                                     [](const Probe& p, const Probe& q) { return p.value < q.value; });
    out.fin_length_m = it->x[0];
    out.thrust_n = -it->value;
    return out;
}

struct DesignReport {
    double rod_length_m = 0.0;
    double rod_height_m = 0.0;
    double rod_width_m = 0.0;
    double fin_length_m = 0.0;
    double voltage_v = 0.0;
    double target_frequency_hz = 0.0;
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    modal::ModeAxis mode_axis = modal::ModeAxis::X;
    double gap_ratio = 0.0;
    double assembly_f1_hz = 0.0;
    double drive_frequency_hz = 0.0;
    thrust::OscillationAmplitudes amplitudes;
    double streaming_velocity_m_s = 0.0;
    double thrust_n = 0.0;
    double resonance_mismatch = 0.0;
};

inline DesignReport design_report(const ModelBundle& b, double voltage_v, double target_hz) {
    b.validate();
    DesignReport r;
    r.rod_length_m = b.rigid.rod_length_m;
    r.rod_height_m = b.rigid.rod_height_m;
    r.rod_width_m = b.rigid.rod_width_m;
    r.fin_length_m = b.fin.fin_length_m;
    r.voltage_v = voltage_v;
    r.target_frequency_hz = target_hz;
    const auto model = modal::build_reduced_model(b.rigid, b.fin, b.fluid, b.modal);
    const auto nf = modal::natural_frequencies(model);
    r.f1_hz = nf.f1_hz;
    r.f2_hz = nf.f2_hz;
    r.mode_axis = nf.axis1;
    r.gap_ratio = nf.gap_ratio();
    r.assembly_f1_hz = modal::assembly_frequencies(model).f1_hz;
    const auto tp = thrust::thrust_point(voltage_v, b.rigid, b.fin, b.fluid, b.motor, b.streaming, b.modal);
    r.drive_frequency_hz = tp.frequency_hz;
    r.amplitudes = tp.amplitudes;
    r.streaming_velocity_m_s = tp.velocity_m_s;
    r.thrust_n = tp.thrust_n;
    r.resonance_mismatch = resonance_mismatch(b.rigid, b.fin, b.fluid, target_hz, b.modal);
    return r;
}

}  // namespace vibrafin::design
