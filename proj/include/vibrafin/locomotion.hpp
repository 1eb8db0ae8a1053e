#pragma once

// Planar 3-DOF rigid-body model of the three-fin fish.
//
// Body frame: x forward, y to the left, yaw r positive counter-clockwise.
// With M_u = m + a_u, M_v = m + a_v, I = I_z + I_a:
//
//   M_u du/dt = sum Fx + M_v v r - 1/2 rho CdA_u |u| u
//   M_v dv/dt = sum Fy - M_u u r - 1/2 rho CdA_v |v| v
//   I   dr/dt = sum Mz - C_dr |r| r - C_ru |u| r + (M_u - M_v) u v
//
// The (M_u - M_v) u v term is the Munk moment; it makes the added-mass
// coupling in surge/sway energy neutral, so a coasting body only loses
// kinetic energy. C_ru is the yaw damping that grows with forward speed
// (tail-fin / lifting-body damping). Each fin pushes with
// level * thrust_magnitude along its mounting direction; the level follows
// the on/off command with a first-order spin-up lag.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vibrafin/errors.hpp"

namespace vibrafin::loco {

enum class FinRole : std::size_t { LeftPectoral = 0, RightPectoral = 1, Caudal = 2 };

inline constexpr std::size_t kFinCount = 3;

inline const char* to_string(FinRole role) {
    switch (role) {
        case FinRole::LeftPectoral: return "left_pectoral";
        case FinRole::RightPectoral: return "right_pectoral";
        case FinRole::Caudal: return "caudal";
    }
    return "?";
}

// left, right, caudal
using FinSet = std::array<bool, kFinCount>;

inline constexpr FinSet kNoFins{false, false, false};

struct FinMount {
    FinRole role = FinRole::Caudal;
    double x_m = 0.0;
    double y_m = 0.0;
    double thrust_direction_rad = 0.0;
    double thrust_magnitude_n = 0.0;
};

inline constexpr double kPectoralAngle = std::numbers::pi / 6.0;

struct FishBody {
    double mass_kg = 0.088;
    double body_length_m = 0.085;
    double body_width_m = 0.055;
    double added_mass_surge_kg = 0.2 * 0.088;
    double added_mass_sway_kg = 0.8 * 0.088;
    // prolate spheroid, semi-axes BL/2 and width/2
    double yaw_inertia_kg_m2 = 0.088 * (0.0425 * 0.0425 + 0.0275 * 0.0275) / 5.0;
    double added_yaw_inertia_kg_m2 = 0.3 * 0.088 * (0.0425 * 0.0425 + 0.0275 * 0.0275) / 5.0;
    double drag_area_surge_m2 = 1.1e-3;
    double drag_area_sway_m2 = 5.0e-3;
    double yaw_drag_nms2 = 1.0e-6;
    double yaw_damping_speed_ns = 1.0e-3;
    double fluid_density_kg_m3 = 1000.0;
    double spin_up_time_constant_s = 0.2;
    std::array<FinMount, kFinCount> fins{{
        {FinRole::LeftPectoral, -0.1 * 0.085, 0.25 * 0.085, kPectoralAngle, 0.0015},
        {FinRole::RightPectoral, -0.1 * 0.085, -0.25 * 0.085, -kPectoralAngle, 0.0015},
        {FinRole::Caudal, -0.5 * 0.085, 0.0, 0.0, 0.004},
    }};

    const FinMount& fin(FinRole role) const { return fins[static_cast<std::size_t>(role)]; }
    FinMount& fin(FinRole role) { return fins[static_cast<std::size_t>(role)]; }

    double surge_mass() const { return mass_kg + added_mass_surge_kg; }
    double sway_mass() const { return mass_kg + added_mass_sway_kg; }
    double yaw_inertia_total() const { return yaw_inertia_kg_m2 + added_yaw_inertia_kg_m2; }
    double collision_radius_m() const { return 0.35 * body_length_m; }

    void validate() const {
        detail::require_positive(mass_kg, "mass");
        detail::require_positive(body_length_m, "body_length");
        detail::require_positive(body_width_m, "body_width");
        detail::require_non_negative(added_mass_surge_kg, "added_mass_surge");
        detail::require_non_negative(added_mass_sway_kg, "added_mass_sway");
        detail::require_positive(yaw_inertia_kg_m2, "yaw_inertia");
        detail::require_non_negative(added_yaw_inertia_kg_m2, "added_yaw_inertia");
        detail::require_non_negative(drag_area_surge_m2, "drag_area_surge");
        detail::require_non_negative(drag_area_sway_m2, "drag_area_sway");
        detail::require_non_negative(yaw_drag_nms2, "yaw_drag");
        detail::require_non_negative(yaw_damping_speed_ns, "yaw_damping_speed");
        detail::require_positive(fluid_density_kg_m3, "fluid_density");
        detail::require_positive(spin_up_time_constant_s, "spin_up_time_constant");
        for (std::size_t i = 0; i < kFinCount; ++i) {
            const auto& f = fins[i];
            detail::require(static_cast<std::size_t>(f.role) == i, "fins", "fins must be ordered left, right, caudal");
            detail::require(std::hypot(f.x_m, f.y_m) <= body_length_m, "fins", "mount position outside one body length");
            detail::require_non_negative(f.thrust_magnitude_n, "fins.thrust_magnitude");
        }
        constexpr double eps = 1e-9;
        detail::require(std::abs(fin(FinRole::Caudal).thrust_direction_rad) < eps, "fins.caudal",
                        "caudal thrust must point along +x");
        detail::require(std::abs(std::abs(fin(FinRole::LeftPectoral).thrust_direction_rad) - kPectoralAngle) < eps &&
                            std::abs(std::abs(fin(FinRole::RightPectoral).thrust_direction_rad) - kPectoralAngle) < eps,
                        "fins.pectoral", "pectoral thrust must be at +-30 degrees");
    }
};

/// Reflection of `body` through its centreline: the pectoral mounts swap
/// roles with y and thrust direction negated.
inline FishBody mirrored(const FishBody& body) {
    FishBody m = body;
    auto reflect = [](FinMount f, FinRole role) {
        f.role = role;
        f.y_m = -f.y_m;
        f.thrust_direction_rad = -f.thrust_direction_rad;
        return f;
    };
    m.fin(FinRole::LeftPectoral) = reflect(body.fin(FinRole::RightPectoral), FinRole::LeftPectoral);
    m.fin(FinRole::RightPectoral) = reflect(body.fin(FinRole::LeftPectoral), FinRole::RightPectoral);
    m.fin(FinRole::Caudal) = reflect(body.fin(FinRole::Caudal), FinRole::Caudal);
    return m;
}

struct SimState {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // unwrapped
    double u = 0.0;
    double v = 0.0;
    double r = 0.0;
    // spin-up level of each fin motor in [0, 1]
    std::array<double, kFinCount> fin_level{0.0, 0.0, 0.0};
};

struct Obstacle {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
};

struct CollisionEvent {
    double t = 0.0;
    std::size_t obstacle = 0;
    double contact_x = 0.0;
    double contact_y = 0.0;
};

inline double kinetic_energy(const SimState& s, const FishBody& body) {
    return 0.5 * (body.surge_mass() * s.u * s.u + body.sway_mass() * s.v * s.v + body.yaw_inertia_total() * s.r * s.r);
}

namespace detail {

struct Rates {
    double x, y, theta, u, v, r;
    std::array<double, kFinCount> level;
};

// Fin forces are summed in role order so left/right runs mirror exactly.
inline Rates rates(const SimState& s, const FishBody& b, const FinSet& active) {
    double fx = 0.0, fy = 0.0, mz = 0.0;
    Rates d{};
    for (std::size_t i = 0; i < kFinCount; ++i) {
        const auto& fin = b.fins[i];
        const double thrust = s.fin_level[i] * fin.thrust_magnitude_n;
        const double fxi = thrust * std::cos(fin.thrust_direction_rad);
        const double fyi = thrust * std::sin(fin.thrust_direction_rad);
        fx += fxi;
        fy += fyi;
        mz += fin.x_m * fyi - fin.y_m * fxi;
        d.level[i] = ((active[i] ? 1.0 : 0.0) - s.fin_level[i]) / b.spin_up_time_constant_s;
    }
    const double mu = b.surge_mass(), mv = b.sway_mass(), iz = b.yaw_inertia_total();
    const double half_rho = 0.5 * b.fluid_density_kg_m3;
    d.u = (fx + mv * s.v * s.r - half_rho * b.drag_area_surge_m2 * std::abs(s.u) * s.u) / mu;
    d.v = (fy - mu * s.u * s.r - half_rho * b.drag_area_sway_m2 * std::abs(s.v) * s.v) / mv;
    d.r = (mz - b.yaw_drag_nms2 * std::abs(s.r) * s.r - b.yaw_damping_speed_ns * std::abs(s.u) * s.r +
           (mu - mv) * s.u * s.v) /
          iz;
    const double c = std::cos(s.theta), sn = std::sin(s.theta);
    d.x = s.u * c - s.v * sn;
    d.y = s.u * sn + s.v * c;
    d.theta = s.r;
    return d;
}

inline SimState advance(const SimState& s, const Rates& d, double h) {
    SimState o = s;
    o.x += h * d.x;
    o.y += h * d.y;
    o.theta += h * d.theta;
    o.u += h * d.u;
    o.v += h * d.v;
    o.r += h * d.r;
    for (std::size_t i = 0; i < kFinCount; ++i) o.fin_level[i] += h * d.level[i];
    return o;
}

inline void check_finite(const SimState& s) {
    const std::pair<const char*, double> fields[] = {{"x", s.x}, {"y", s.y}, {"theta", s.theta},
                                                     {"u", s.u}, {"v", s.v}, {"r", s.r}};
    for (const auto& [name, value] : fields)
        if (!std::isfinite(value))
            throw IntegrationError(name, s.t, std::string("non-finite state component '") + name + "' at t=" +
                                                  std::to_string(s.t) + " s");
}

}  // namespace detail

/// One classical RK4 step of length dt (0 < dt <= 5 ms) with the fin
/// command held constant over the step.
inline SimState step(const SimState& state, const FishBody& body, const FinSet& active, double dt) {
    if (!(dt > 0.0 && dt <= 5e-3)) throw ValidationError("dt", "must lie in (0, 5 ms]");
    using detail::advance;
    using detail::rates;
    const auto k1 = rates(state, body, active);
    const auto k2 = rates(advance(state, k1, 0.5 * dt), body, active);
    const auto k3 = rates(advance(state, k2, 0.5 * dt), body, active);
    const auto k4 = rates(advance(state, k3, dt), body, active);

    SimState out = state;
    const double w = dt / 6.0;
    out.x += w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    out.y += w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    out.theta += w * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
    out.u += w * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    out.v += w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    out.r += w * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    for (std::size_t i = 0; i < kFinCount; ++i)
        out.fin_level[i] += w * (k1.level[i] + 2.0 * k2.level[i] + 2.0 * k3.level[i] + k4.level[i]);
    out.t = state.t + dt;
    detail::check_finite(out);
    return out;
}

/// Disc-vs-disc contact. On overlap with an approaching obstacle the
/// normal part of the world-frame velocity is removed (tangential motion is
/// kept) and an event is recorded. Mutates `state` velocities only.
inline std::vector<CollisionEvent> check_collision(SimState& state, const FishBody& body,
                                                   const std::vector<Obstacle>& obstacles) {
    std::vector<CollisionEvent> events;
    const double rf = body.collision_radius_m();
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const auto& ob = obstacles[i];
        if (!(ob.radius > 0.0)) throw ValidationError("obstacles", "radius must be positive");
        const double dx = state.x - ob.x, dy = state.y - ob.y;
        const double dist = std::hypot(dx, dy);
        if (dist >= rf + ob.radius || dist == 0.0) continue;
        const double nx = dx / dist, ny = dy / dist;
        const double c = std::cos(state.theta), s = std::sin(state.theta);
        double vx = state.u * c - state.v * s;
        double vy = state.u * s + state.v * c;
        const double vn = vx * nx + vy * ny;
        if (vn >= 0.0) continue;
        vx -= vn * nx;
        vy -= vn * ny;
        state.u = vx * c + vy * s;
        state.v = -vx * s + vy * c;
        events.push_back({state.t, i, ob.x + nx * ob.radius, ob.y + ny * ob.radius});
    }
    return events;
}

// ---------------------------------------------------------------------------
// Scenarios

struct ScheduleEntry {
    double t_start = 0.0;
    double t_end = 0.0;
    FinSet fins = kNoFins;
};

struct Scenario {
    std::string name;
    std::string description;
    double duration_s = 0.0;
    double dt_s = 1e-3;
    std::vector<ScheduleEntry> schedule;
    std::vector<Obstacle> obstacles;
    SimState initial;
    // keep every n-th step in the output trajectory
    std::size_t decimation = 1;

    void validate() const {
        vibrafin::detail::require_non_negative(duration_s, "duration");
        vibrafin::detail::require(dt_s > 0.0 && dt_s <= 5e-3, "dt", "must lie in (0, 5 ms]");
        vibrafin::detail::require(decimation >= 1, "decimation", "must be at least 1");
        for (const auto& e : schedule) {
            vibrafin::detail::require(e.t_start >= 0.0 && e.t_end <= duration_s && e.t_start <= e.t_end, "schedule",
                                      "interval must lie within [0, duration]");
        }
        for (std::size_t a = 0; a < schedule.size(); ++a)
            for (std::size_t b = a + 1; b < schedule.size(); ++b)
                for (std::size_t f = 0; f < kFinCount; ++f) {
                    const auto& p = schedule[a];
                    const auto& q = schedule[b];
                    if (p.fins[f] && q.fins[f] && p.t_start < q.t_end && q.t_start < p.t_end)
                        throw ValidationError("schedule", std::string("overlapping intervals for fin ") +
                                                              to_string(static_cast<FinRole>(f)));
                }
        for (const auto& o : obstacles) vibrafin::detail::require_positive(o.radius, "obstacles.radius");
    }

    FinSet command_at(double t) const {
        FinSet out = kNoFins;
        for (const auto& e : schedule)
            if (t >= e.t_start && t < e.t_end)
                for (std::size_t f = 0; f < kFinCount; ++f) out[f] = out[f] || e.fins[f];
        return out;
    }
};

struct TrajectorySample {
    SimState state;
    FinSet fins = kNoFins;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<CollisionEvent> events;
};

/// Fixed-step integrator that owns one simulation. Both the batch
/// simulate() and the interactive server drive the physics through this.
class Simulator {
public:
    Simulator(FishBody body, std::vector<Obstacle> obstacles, double dt, SimState initial = {})
        : body_(std::move(body)), obstacles_(std::move(obstacles)), dt_(dt), state_(initial), t0_(initial.t) {
        body_.validate();
        if (!(dt_ > 0.0 && dt_ <= 5e-3)) throw ValidationError("dt", "must lie in (0, 5 ms]");
    }

    /// Advances one tick with `fins` commanded; returns collision events.
    std::vector<CollisionEvent> tick(const FinSet& fins) {
        try {
            state_ = step(state_, body_, fins, dt_);
        } catch (const IntegrationError& e) {
            throw IntegrationError(e.component(), state_.t, std::string(e.what()) + " (step starting at t=" +
                                                               std::to_string(state_.t) + " s)");
        }
        ++ticks_;
        // time from the tick counter so long runs do not accumulate drift
        state_.t = t0_ + static_cast<double>(ticks_) * dt_;
        fins_ = fins;
        return check_collision(state_, body_, obstacles_);
    }

    const SimState& state() const { return state_; }
    const FinSet& fins() const { return fins_; }
    const FishBody& body() const { return body_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    std::uint64_t ticks() const { return ticks_; }
    double dt() const { return dt_; }

private:
    FishBody body_;
    std::vector<Obstacle> obstacles_;
    double dt_;
    SimState state_;
    double t0_;
    std::uint64_t ticks_ = 0;
    FinSet fins_ = kNoFins;
};

inline std::size_t step_count(const Scenario& scenario) {
    return static_cast<std::size_t>(std::llround(scenario.duration_s / scenario.dt_s));
}

inline Trajectory simulate(const Scenario& scenario, const FishBody& body) {
    scenario.validate();
    Simulator sim(body, scenario.obstacles, scenario.dt_s, scenario.initial);
    Trajectory traj;
    const std::size_t n = step_count(scenario);
    traj.samples.reserve(n / scenario.decimation + 2);
    traj.samples.push_back({sim.state(), scenario.command_at(scenario.initial.t)});
    for (std::size_t i = 0; i < n; ++i) {
        const FinSet cmd = scenario.command_at(sim.state().t);
        auto events = sim.tick(cmd);
        traj.events.insert(traj.events.end(), events.begin(), events.end());
        if ((i + 1) % scenario.decimation == 0 || i + 1 == n) traj.samples.push_back({sim.state(), cmd});
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Metrics

struct TrajectorySummary {
    double steady_speed_m_s = 0.0;
    double steady_yaw_rate_rad_s = 0.0;
    // mean body-frame forward velocity u over the window
    double steady_surge_m_s = 0.0;
    double turning_radius_m = std::numeric_limits<double>::infinity();
    // |speed / yaw rate|, reported alongside the fitted radius
    double kinematic_radius_m = std::numeric_limits<double>::infinity();
    double time_to_steady_s = 0.0;
    std::vector<SimState> path;
};

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
};

/// Algebraic least-squares circle through the points (Kasa fit on
/// centred coordinates).
inline Circle fit_circle(const std::vector<std::array<double, 2>>& pts) {
    if (pts.size() < 3) throw ValidationError("path", "circle fit needs at least three points");
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p[0];
        my += p[1];
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    // minimise sum (x^2 + y^2 + D x + E y + F)^2 in centred coordinates
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sz = 0, szx = 0, szy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
        const double x = p[0] - mx, y = p[1] - my, z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        sz += z;
        szx += z * x;
        szy += z * y;
    }
    // normal equations A [D E F]^T = b
    const double a[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
    const double b[3] = {-szx, -szy, -sz};
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double det = det3(a);
    if (!(std::abs(det) > 0.0)) throw NumericalError("circle fit is degenerate (collinear points)");
    double sol[3];
    for (int k = 0; k < 3; ++k) {
        double m[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = j == k ? b[i] : a[i][j];
        sol[k] = det3(m) / det;
    }
    Circle c;
    c.cx = mx - sol[0] / 2.0;
    c.cy = my - sol[1] / 2.0;
    c.radius = std::sqrt(std::max(0.0, sol[0] * sol[0] / 4.0 + sol[1] * sol[1] / 4.0 - sol[2]));
    return c;
}

/// Steady-state metrics over the final `window_fraction` of the run.
inline TrajectorySummary summarize(const std::vector<SimState>& path, double window_fraction = 0.3) {
    if (path.size() < 2 || !(path.back().t - path.front().t > 2.0))
        throw ValidationError("trajectory", "must span more than 2 s of simulated time");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw ValidationError("window_fraction", "must lie in (0, 1]");
    const double t_end = path.back().t;
    const double t_window = t_end - window_fraction * (t_end - path.front().t);
    const auto first =
        std::lower_bound(path.begin(), path.end(), t_window, [](const SimState& s, double t) { return s.t < t; });
    const auto count = static_cast<std::size_t>(std::distance(first, path.end()));
    if (count < 3) throw ValidationError("window", "steady window holds fewer than three samples");

    TrajectorySummary sum;
    double speed = 0.0, yaw = 0.0, surge = 0.0;
    std::vector<std::array<double, 2>> pts;
    pts.reserve(count);
    for (auto it = first; it != path.end(); ++it) {
        speed += std::hypot(it->u, it->v);
        yaw += it->r;
        surge += it->u;
        pts.push_back({it->x, it->y});
    }
    sum.steady_speed_m_s = speed / static_cast<double>(count);
    sum.steady_yaw_rate_rad_s = yaw / static_cast<double>(count);
    sum.steady_surge_m_s = surge / static_cast<double>(count);
    if (std::abs(sum.steady_yaw_rate_rad_s) >= 1e-3) {
        sum.turning_radius_m = fit_circle(pts).radius;
        sum.kinematic_radius_m = sum.steady_speed_m_s / std::abs(sum.steady_yaw_rate_rad_s);
    } else {
        sum.steady_yaw_rate_rad_s = std::abs(sum.steady_yaw_rate_rad_s) == 0.0 ? 0.0 : sum.steady_yaw_rate_rad_s;
    }

    const double band = 0.02 * sum.steady_speed_m_s;
    sum.time_to_steady_s = path.front().t;
    for (std::size_t i = path.size(); i-- > 0;) {
        if (std::abs(std::hypot(path[i].u, path[i].v) - sum.steady_speed_m_s) > band) {
            sum.time_to_steady_s = i + 1 < path.size() ? path[i + 1].t : path[i].t;
            break;
        }
    }
    sum.path = path;
    return sum;
}

inline std::vector<SimState> states_of(const Trajectory& traj) {
    std::vector<SimState> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) out.push_back(s.state);
    return out;
}

}  // namespace vibrafin::loco
