#pragma once

// Derivative-free minimizers and the least-squares line used across the
// toolkit. Every minimizer can keep a probe log so callers can check that
// the returned point is no worse than anything the search looked at.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vibrafin/errors.hpp"

namespace vibrafin {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(double x) const { return intercept + slope * x; }
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Ordinary least-squares line through `points`. Exact through two points.
inline LinearFit fit_linear(std::span<const Point2> points) {
    if (points.size() < 2) throw ValidationError("points", "at least two points are required");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("points", "all x values are equal; slope is undefined");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

struct Probe {
    std::vector<double> x;
    double value = 0.0;
};

struct RecordError {
    std::string dataset;
    std::string label;
    double predicted = 0.0;
    double target = 0.0;
    double relative_error = 0.0;
    double tolerance = 0.0;
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> parameters;
    double objective = 0.0;
    std::vector<RecordError> record_errors;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    // best objective after each iteration; non-increasing
    std::vector<double> best_history;
    std::vector<Probe> probes;
};

struct NelderMeadOptions {
    double f_tol = 1e-10;
    double x_tol = 1e-8;
    int max_iter = 2000;
    // relative perturbation for non-zero coordinates of the start point
    double initial_step = 0.05;
    double zero_step = 0.00025;
    bool record_probes = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex minimization with the textbook coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
///
/// Stops when the spread of function values over the simplex drops below
/// `f_tol`, when the simplex diameter (max-norm, measured from the best
/// vertex) drops below `x_tol`, or after `max_iter` iterations. Throws
/// NonFiniteObjectiveError carrying the point if the objective ever
/// returns NaN or infinity.
inline FitResult nelder_mead(const Objective& objective, std::vector<double> x0,
                             const NelderMeadOptions& options = {}) {
    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    const std::size_t n = x0.size();
    if (n == 0) throw ValidationError("x0", "dimension must be at least 1");

    FitResult result;
    auto eval = [&](const std::vector<double>& x) {
        const double f = objective(std::span<const double>(x));
        ++result.evaluations;
        if (!std::isfinite(f)) throw NonFiniteObjectiveError(x, "objective returned a non-finite value");
        if (options.record_probes) result.probes.push_back({x, f});
        return f;
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        double& xi = simplex[i + 1][i];
        xi = xi != 0.0 ? xi * (1.0 + options.initial_step) : options.zero_step;
    }
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s(n + 1);
        std::vector<double> v(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s[i] = std::move(simplex[order[i]]);
            v[i] = values[order[i]];
        }
        simplex = std::move(s);
        values = std::move(v);
    };

    auto affine = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = from[j] + t * (to[j] - from[j]);
        return out;
    };

    std::vector<double> centroid(n);
    int iter = 0;
    for (;; ++iter) {
        sort_simplex();
        result.best_history.push_back(values[0]);

        const double spread = values[n] - values[0];
        double size = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(simplex[i][j] - simplex[0][j]));
        if (spread < options.f_tol || size < options.x_tol) {
            result.converged = true;
            break;
        }
        if (iter >= options.max_iter) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        const auto reflected = affine(centroid, simplex[n], -kReflect);
        const double fr = eval(reflected);
        if (fr < values[0]) {
            const auto expanded = affine(centroid, reflected, kExpand);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }

        bool accepted = false;
        if (fr < values[n]) {
            const auto outside = affine(centroid, reflected, kContract);
            const double fc = eval(outside);
            if (fc <= fr) {
                simplex[n] = outside;
                values[n] = fc;
                accepted = true;
            }
        } else {
            const auto inside = affine(centroid, simplex[n], kContract);
            const double fc = eval(inside);
            if (fc < values[n]) {
                simplex[n] = inside;
                values[n] = fc;
                accepted = true;
            }
        }
        if (!accepted) {
            for (std::size_t i = 1; i <= n; ++i) {
                simplex[i] = affine(simplex[0], simplex[i], kShrink);
                values[i] = eval(simplex[i]);
            }
        }
    }

    result.parameters = simplex[0];
    result.objective = values[0];
    result.iterations = iter;
    return result;
}

struct GoldenSectionResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    // true when the minimizer sits on (within x_tol of) either bound
    bool at_boundary = false;
    std::vector<Probe> probes;
};

/// Golden-section search for the minimum of a unimodal `f` on [a, b].
/// The bounds themselves are probed, and the best probe is returned.
inline GoldenSectionResult golden_section(const std::function<double(double)>& f, double a, double b,
                                          double x_tol) {
    if (!(a <= b)) throw ValidationError("bounds", "lower bound must not exceed upper bound");
    if (!(x_tol > 0.0)) throw ValidationError("x_tol", "must be positive");
    const double lo = a, hi = b;

    GoldenSectionResult result;
    auto eval = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) throw NonFiniteObjectiveError({x}, "objective returned a non-finite value");
        result.probes.push_back({{x}, v});
        return v;
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    eval(a);
    if (b > a) {
        eval(b);
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = eval(c);
        double fd = eval(d);
        while (b - a > x_tol) {
            ++result.iterations;
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = eval(d);
            }
        }
    }

    const auto best = std::min_element(result.probes.begin(), result.probes.end(),
                                       [](const Probe& p, const Probe& q) { return p.value < q.value; });
    result.x = best->x[0];
    result.value = best->value;
    result.at_boundary = (result.x - lo) <= x_tol || (hi - result.x) <= x_tol;
    return result;
}

}  // namespace vibrafin
