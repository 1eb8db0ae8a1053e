#pragma once

// Reduced-order modal models of the fin assembly.
//
// Rigid part (rod + housing + motor) on a compliant mount:
//   per-axis stiffness = series(rod tip bending 3EI/L^3, silicone joint k_j)
//   k_j = joint_stiffness_per_area * H * W   (isotropic, area proportional)
//   I_x = H W^3 / 12 (bending along x, the fin-normal direction)
//   I_y = W H^3 / 12
// Flexible fin: uniform clamped-free strip, first bending mode, optionally
// loaded by an added fluid mass. The full assembly is a two-mass chain:
// mount spring -> rigid mass -> fin modal spring -> fin modal mass.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vibrafin/errors.hpp"
#include "vibrafin/parallel.hpp"

namespace vibrafin::modal {

struct RigidPartGeometry {
    double rod_length_m = 10e-3;
    double rod_height_m = 7.5e-3;
    double rod_width_m = 3e-3;
    double housing_length_m = 15.5e-3;
    double cap_length_m = 5e-3;
    double housing_diameter_m = 11e-3;
    double rod_elastic_modulus_pa = 2.0e9;
    double rod_density_kg_m3 = 1200.0;
    double rigid_part_mass_kg = 2.5e-3;
    double joint_stiffness_per_area_pa_m = 8.6e7;

    void validate() const {
        detail::require_positive(rod_length_m, "rod_length");
        detail::require_positive(rod_height_m, "rod_height");
        detail::require_positive(rod_width_m, "rod_width");
        detail::require_positive(housing_length_m, "housing_length");
        detail::require_positive(cap_length_m, "cap_length");
        detail::require_positive(housing_diameter_m, "housing_diameter");
        detail::require_positive(rod_elastic_modulus_pa, "rod_elastic_modulus");
        detail::require_non_negative(rod_density_kg_m3, "rod_density");
        detail::require_positive(rigid_part_mass_kg, "rigid_part_mass");
        detail::require_positive(joint_stiffness_per_area_pa_m, "joint_stiffness_per_area");
    }

    double rod_mass_kg() const { return rod_density_kg_m3 * rod_length_m * rod_height_m * rod_width_m; }
};

struct FlexibleFinGeometry {
    double fin_length_m = 12e-3;
    double thickness_m = 200e-6;
    double clamped_width_m = 11e-3;
    double elastic_modulus_pa = 2.5e9;
    double density_kg_m3 = 1420.0;
    double poisson_ratio = 0.34;

    void validate() const {
        detail::require_positive(fin_length_m, "fin_length");
        detail::require_positive(thickness_m, "fin_thickness");
        detail::require_positive(clamped_width_m, "fin_clamped_width");
        detail::require_positive(elastic_modulus_pa, "fin_elastic_modulus");
        detail::require_positive(density_kg_m3, "fin_density");
        detail::require(poisson_ratio >= 0.0 && poisson_ratio < 0.5, "fin_poisson_ratio", "must lie in [0, 0.5)");
    }

    double mass_kg() const { return density_kg_m3 * thickness_m * clamped_width_m * fin_length_m; }
};

struct FluidProperties {
    double density_kg_m3 = 1000.0;
    double dynamic_viscosity_pa_s = 1.0e-3;

    void validate() const {
        detail::require_positive(density_kg_m3, "fluid_density");
        detail::require_positive(dynamic_viscosity_pa_s, "fluid_viscosity");
    }
};

struct ModalConfig {
    double rod_mass_participation = 0.24;
    double fin_modal_mass_fraction = 0.25;
    double added_mass_coefficient = std::numbers::pi / 4.0;
    double damping_ratio_x = 0.05;
    double damping_ratio_y = 0.05;
    double fin_damping_ratio = 0.1;

    void validate() const {
        detail::require_non_negative(rod_mass_participation, "rod_mass_participation");
        detail::require_positive(fin_modal_mass_fraction, "fin_modal_mass_fraction");
        detail::require_non_negative(added_mass_coefficient, "added_mass_coefficient");
        detail::require_non_negative(damping_ratio_x, "damping_ratio_x");
        detail::require_non_negative(damping_ratio_y, "damping_ratio_y");
        detail::require_non_negative(fin_damping_ratio, "fin_damping_ratio");
    }
};

struct ReducedOrderModel {
    double effective_mass_x_kg = 0.0;
    double effective_mass_y_kg = 0.0;
    double stiffness_x_n_m = 0.0;
    double stiffness_y_n_m = 0.0;
    double damping_x_ns_m = 0.0;
    double damping_y_ns_m = 0.0;
    double fin_modal_mass_kg = 0.0;
    double fin_modal_stiffness_n_m = 0.0;
    double fin_modal_damping_ns_m = 0.0;

    void validate() const {
        detail::require_positive(effective_mass_x_kg, "effective_mass_x");
        detail::require_positive(effective_mass_y_kg, "effective_mass_y");
        detail::require_positive(stiffness_x_n_m, "stiffness_x");
        detail::require_positive(stiffness_y_n_m, "stiffness_y");
        detail::require_non_negative(damping_x_ns_m, "damping_x");
        detail::require_non_negative(damping_y_ns_m, "damping_y");
        detail::require_positive(fin_modal_mass_kg, "fin_modal_mass");
        detail::require_positive(fin_modal_stiffness_n_m, "fin_modal_stiffness");
        detail::require_non_negative(fin_modal_damping_ns_m, "fin_modal_damping");
    }
};

// First clamped-free root of cos(l)cosh(l) = -1.
inline constexpr double kClampedFreeLambda1 = 1.8751040687119611;

inline double series(double a, double b) { return a * b / (a + b); }

struct RodStiffness {
    double x_n_m = 0.0;
    double y_n_m = 0.0;
};

/// Cantilever tip stiffness 3EI/L^3 of the connecting rod about each axis.
inline RodStiffness rod_stiffness(const RigidPartGeometry& g) {
    const double h = g.rod_height_m, w = g.rod_width_m, l3 = std::pow(g.rod_length_m, 3);
    const double ix = h * w * w * w / 12.0;
    const double iy = w * h * h * h / 12.0;
    return {3.0 * g.rod_elastic_modulus_pa * ix / l3, 3.0 * g.rod_elastic_modulus_pa * iy / l3};
}

inline double joint_stiffness(const RigidPartGeometry& g) {
    return g.joint_stiffness_per_area_pa_m * g.rod_height_m * g.rod_width_m;
}

/// Ratio of added fluid mass to structural mass per unit fin length.
inline double fin_added_mass_ratio(const FlexibleFinGeometry& fin, const FluidProperties& fluid,
                                   double added_mass_coefficient) {
    return added_mass_coefficient * fluid.density_kg_m3 * fin.clamped_width_m / (fin.density_kg_m3 * fin.thickness_m);
}

/// First bending frequency [Hz] of the clamped-free fin; in vacuum when
/// `fluid` is empty, otherwise reduced by the added-mass factor.
inline double fin_first_frequency(const FlexibleFinGeometry& fin, const std::optional<FluidProperties>& fluid,
                                  const ModalConfig& config = {}) {
    fin.validate();
    const double t = fin.thickness_m, nu = fin.poisson_ratio;
    const double lam2 = kClampedFreeLambda1 * kClampedFreeLambda1;
    const double f_vac = lam2 / (2.0 * std::numbers::pi) / (fin.fin_length_m * fin.fin_length_m) *
                         std::sqrt(fin.elastic_modulus_pa * t * t / (12.0 * fin.density_kg_m3 * (1.0 - nu * nu)));
    if (!fluid) return f_vac;
    return f_vac / std::sqrt(1.0 + fin_added_mass_ratio(fin, *fluid, config.added_mass_coefficient));
}

inline ReducedOrderModel build_reduced_model(const RigidPartGeometry& rigid, const FlexibleFinGeometry& fin,
                                             const std::optional<FluidProperties>& fluid,
                                             const ModalConfig& config = {}) {
    rigid.validate();
    fin.validate();
    config.validate();
    if (fluid) fluid->validate();

    const auto rod = rod_stiffness(rigid);
    const double kj = joint_stiffness(rigid);

    ReducedOrderModel m;
    m.stiffness_x_n_m = series(rod.x_n_m, kj);
    m.stiffness_y_n_m = series(rod.y_n_m, kj);
    m.effective_mass_x_kg = rigid.rigid_part_mass_kg + config.rod_mass_participation * rigid.rod_mass_kg();
    m.effective_mass_y_kg = m.effective_mass_x_kg;
    m.damping_x_ns_m = 2.0 * config.damping_ratio_x * std::sqrt(m.stiffness_x_n_m * m.effective_mass_x_kg);
    m.damping_y_ns_m = 2.0 * config.damping_ratio_y * std::sqrt(m.stiffness_y_n_m * m.effective_mass_y_kg);

    const double gamma = fluid ? fin_added_mass_ratio(fin, *fluid, config.added_mass_coefficient) : 0.0;
    const double omega_fin = 2.0 * std::numbers::pi * fin_first_frequency(fin, fluid, config);
    m.fin_modal_mass_kg = config.fin_modal_mass_fraction * fin.mass_kg() * (1.0 + gamma);
    m.fin_modal_stiffness_n_m = m.fin_modal_mass_kg * omega_fin * omega_fin;
    m.fin_modal_damping_ns_m =
        2.0 * config.fin_damping_ratio * std::sqrt(m.fin_modal_stiffness_n_m * m.fin_modal_mass_kg);
    return m;
}

enum class ModeAxis { X, Y };

inline const char* to_string(ModeAxis a) { return a == ModeAxis::X ? "x" : "y"; }

struct NaturalFrequencies {
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    ModeAxis axis1 = ModeAxis::X;
    ModeAxis axis2 = ModeAxis::Y;

    double gap_ratio() const { return (f2_hz - f1_hz) / f1_hz; }
};

/// Rigid-part modes; ties put x first.
inline NaturalFrequencies natural_frequencies(const ReducedOrderModel& model) {
    const double fx = std::sqrt(model.stiffness_x_n_m / model.effective_mass_x_kg) / (2.0 * std::numbers::pi);
    const double fy = std::sqrt(model.stiffness_y_n_m / model.effective_mass_y_kg) / (2.0 * std::numbers::pi);
    if (fx <= fy) return {fx, fy, ModeAxis::X, ModeAxis::Y};
    return {fy, fx, ModeAxis::Y, ModeAxis::X};
}

struct ChainFrequencies {
    double f1_hz = 0.0;
    double f2_hz = 0.0;
};

/// Undamped eigenfrequencies of ground -k1- m1 -k2- m2.
inline ChainFrequencies chain_frequencies(double k1, double m1, double k2, double m2) {
    // m1 m2 l^2 - (m1 k2 + m2 (k1 + k2)) l + k1 k2 = 0
    const double a = m1 * m2;
    const double b = m1 * k2 + m2 * (k1 + k2);
    const double c = k1 * k2;
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
    const double lam_hi = (b + disc) / (2.0 * a);
    const double lam_lo = c / (a * lam_hi);
    const double two_pi = 2.0 * std::numbers::pi;
    return {std::sqrt(lam_lo) / two_pi, std::sqrt(lam_hi) / two_pi};
}

inline ChainFrequencies assembly_frequencies(const ReducedOrderModel& m) {
    return chain_frequencies(m.stiffness_x_n_m, m.effective_mass_x_kg, m.fin_modal_stiffness_n_m,
                             m.fin_modal_mass_kg);
}

inline double assembly_first_frequency(const RigidPartGeometry& rigid, const FlexibleFinGeometry& fin,
                                       const std::optional<FluidProperties>& fluid, const ModalConfig& config = {}) {
    return assembly_frequencies(build_reduced_model(rigid, fin, fluid, config)).f1_hz;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { RodLength, AspectRatio, FinLength };

inline const char* column_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::RodLength: return "rod_length_mm";
        case SweepAxis::AspectRatio: return "aspect_ratio_h_over_w";
        case SweepAxis::FinLength: return "fin_length_mm";
    }
    return "?";
}

struct GridAxis {
    SweepAxis axis = SweepAxis::RodLength;
    // SI metres for lengths, dimensionless for the aspect ratio
    std::vector<double> values;
};

struct SweepRow {
    std::vector<double> coordinates;
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    double gap_ratio = 0.0;
};

struct SweepTable {
    std::vector<SweepAxis> axes;
    std::vector<SweepRow> rows;
};

struct SweepBase {
    RigidPartGeometry rigid;
    FlexibleFinGeometry fin;
    std::optional<FluidProperties> fluid = FluidProperties{};
    ModalConfig config;
};

/// Applies one grid coordinate to a geometry copy. Aspect ratio keeps the
/// rod cross-section area H*W of the base geometry.
inline void apply_coordinate(SweepAxis axis, double value, RigidPartGeometry& rigid, FlexibleFinGeometry& fin,
                             double base_area) {
    switch (axis) {
        case SweepAxis::RodLength: rigid.rod_length_m = value; break;
        case SweepAxis::FinLength: fin.fin_length_m = value; break;
        case SweepAxis::AspectRatio:
            rigid.rod_height_m = std::sqrt(base_area * value);
            rigid.rod_width_m = std::sqrt(base_area / value);
            break;
    }
}

/// Grid sweep over the given axes, rows in lexicographic order (first axis
/// slowest). Without a fin-length axis the rows hold rigid-part modes;
/// with one they hold the two assembly-chain frequencies.
inline SweepTable modal_sweep(const std::vector<GridAxis>& grid, const SweepBase& base) {
    if (grid.empty()) throw ValidationError("grid", "at least one axis is required");
    std::size_t total = 1;
    bool assembly = false;
    for (const auto& g : grid) {
        if (g.values.empty()) throw ValidationError(column_name(g.axis), "grid axis has no values");
        total *= g.values.size();
        assembly = assembly || g.axis == SweepAxis::FinLength;
    }

    SweepTable table;
    for (const auto& g : grid) table.axes.push_back(g.axis);
    table.rows.resize(total);
    const double base_area = base.rigid.rod_height_m * base.rigid.rod_width_m;

    parallel_for(total, [&](std::size_t index) {
        SweepRow row;
        row.coordinates.resize(grid.size());
        std::size_t rem = index;
        for (std::size_t a = grid.size(); a-- > 0;) {
            row.coordinates[a] = grid[a].values[rem % grid[a].values.size()];
            rem /= grid[a].values.size();
        }
        auto rigid = base.rigid;
        auto fin = base.fin;
        for (std::size_t a = 0; a < grid.size(); ++a)
            apply_coordinate(grid[a].axis, row.coordinates[a], rigid, fin, base_area);
        const auto model = build_reduced_model(rigid, fin, base.fluid, base.config);
        if (assembly) {
            const auto f = assembly_frequencies(model);
            row.f1_hz = f.f1_hz;
            row.f2_hz = f.f2_hz;
        } else {
            const auto f = natural_frequencies(model);
            row.f1_hz = f.f1_hz;
            row.f2_hz = f.f2_hz;
        }
        row.gap_ratio = (row.f2_hz - row.f1_hz) / row.f1_hz;
        table.rows[index] = std::move(row);
    });
    return table;
}

}  // namespace vibrafin::modal
