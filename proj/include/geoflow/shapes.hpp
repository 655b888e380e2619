#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "geoflow/errors.hpp"
#include "geoflow/level_set.hpp"

namespace geoflow {

struct Sphere {
    Vec3 center{};
    double radius = 0.5;
};

/// Algebraic level function sum(x_i^2/a_i^2) - 1; the canonical non-distance input.
struct Ellipsoid {
    double a = 0.5, b = 0.5, c = 0.5;
};

/// Axis-z torus, signed distance form.
struct Torus {
    double major = 0.5;  // center-of-tube radius
    double minor = 0.2;  // tube radius
};

enum class Multiplier { TwoPlusX, ExpX };

struct Perturbed {
    std::variant<Sphere, Ellipsoid, Torus> base;
    Multiplier mult = Multiplier::TwoPlusX;
};

using AnalyticShape = std::variant<Sphere, Ellipsoid, Torus, Perturbed>;

struct SurfaceSample {
    Vec3 point;
    Vec3 normal;
    double H = 0.0;
    double G = 0.0;
};

namespace detail {

inline double multiplier_value(Multiplier m, const Vec3& p) {
    switch (m) {
        case Multiplier::TwoPlusX: return 2.0 + p.x;
        case Multiplier::ExpX: return std::exp(p.x);
    }
    return 1.0;
}

/// H = k1 + k2 and G for the implicit ellipsoid at a surface point.
inline void ellipsoid_curvatures(const Ellipsoid& e, const Vec3& p, double& H, double& G) {
    double a2 = e.a * e.a, b2 = e.b * e.b, c2 = e.c * e.c;
    double w = p.x * p.x / (a2 * a2) + p.y * p.y / (b2 * b2) + p.z * p.z / (c2 * c2);
    double v = p.x * p.x / (a2 * a2 * a2) + p.y * p.y / (b2 * b2 * b2) +
               p.z * p.z / (c2 * c2 * c2);
    double S = 1.0 / a2 + 1.0 / b2 + 1.0 / c2;
    H = (w * S - v) / (w * std::sqrt(w));
    double abc = e.a * e.b * e.c;
    G = 1.0 / (abc * abc * w * w);
}

}  // namespace detail

inline double exact_phi(const AnalyticShape& shape, const Vec3& p) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return norm(p - s.center) - s.radius;
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                return p.x * p.x / (s.a * s.a) + p.y * p.y / (s.b * s.b) +
                       p.z * p.z / (s.c * s.c) - 1.0;
            } else if constexpr (std::is_same_v<T, Torus>) {
                double rho = std::hypot(p.x, p.y);
                return std::hypot(rho - s.major, p.z) - s.minor;
            } else {
                AnalyticShape base = std::visit(
                    [](const auto& b) -> AnalyticShape { return b; }, s.base);
                return exact_phi(base, p) * detail::multiplier_value(s.mult, p);
            }
        },
        shape);
}

inline bool is_signed_distance(const AnalyticShape& shape) {
    return std::holds_alternative<Sphere>(shape) || std::holds_alternative<Torus>(shape);
}

/// Axis-aligned bounds of the surface itself (not the enclosing volume).
inline void shape_bounds(const AnalyticShape& shape, Vec3& lo, Vec3& hi) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                lo = s.center - Vec3{s.radius, s.radius, s.radius};
                hi = s.center + Vec3{s.radius, s.radius, s.radius};
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                lo = {-s.a, -s.b, -s.c};
                hi = {s.a, s.b, s.c};
            } else if constexpr (std::is_same_v<T, Torus>) {
                double r = s.major + s.minor;
                lo = {-r, -r, -s.minor};
                hi = {r, r, s.minor};
            } else {
                AnalyticShape base = std::visit(
                    [](const auto& b) -> AnalyticShape { return b; }, s.base);
                shape_bounds(base, lo, hi);
            }
        },
        shape);
}

inline std::optional<double> exact_area(const AnalyticShape& shape) {
    using std::numbers::pi;
    if (const auto* s = std::get_if<Sphere>(&shape)) return 4.0 * pi * s->radius * s->radius;
    if (const auto* t = std::get_if<Torus>(&shape)) return 4.0 * pi * pi * t->major * t->minor;
    if (const auto* p = std::get_if<Perturbed>(&shape)) {
        AnalyticShape base = std::visit([](const auto& b) -> AnalyticShape { return b; }, p->base);
        return exact_area(base);
    }
    return std::nullopt;  // ellipsoid: no elementary closed form
}

/// Total Gaussian curvature = 2*pi*chi.
inline double exact_total_gauss(const AnalyticShape& shape) {
    using std::numbers::pi;
    if (std::holds_alternative<Torus>(shape)) return 0.0;
    if (const auto* p = std::get_if<Perturbed>(&shape))
        if (std::holds_alternative<Torus>(p->base)) return 0.0;
    return 4.0 * pi;
}

/// Deterministic quasi-uniform surface points with exact normal and curvatures.
inline std::vector<SurfaceSample> surface_samples(const AnalyticShape& shape, int count) {
    using std::numbers::pi;
    if (count < 1) throw std::invalid_argument("surface_samples: count must be >= 1");
    std::vector<SurfaceSample> out;
    out.reserve(count);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;

    auto fib_dir = [&](int i) -> Vec3 {  // Fibonacci sphere direction
        double z = (count == 1) ? 0.0 : 1.0 - 2.0 * (i + 0.5) / count;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = 2.0 * pi * i / golden;
        return {r * std::cos(th), r * std::sin(th), z};
    };

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                for (int i = 0; i < count; ++i) {
                    Vec3 d = fib_dir(i);
                    out.push_back({s.center + s.radius * d, d, 2.0 / s.radius,
                                   1.0 / (s.radius * s.radius)});
                }
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                for (int i = 0; i < count; ++i) {
                    Vec3 d = fib_dir(i);
                    Vec3 p{s.a * d.x, s.b * d.y, s.c * d.z};
                    Vec3 g{2.0 * p.x / (s.a * s.a), 2.0 * p.y / (s.b * s.b),
                           2.0 * p.z / (s.c * s.c)};
                    double H, G;
                    detail::ellipsoid_curvatures(s, p, H, G);
                    out.push_back({p, g / norm(g), H, G});
                }
            } else if constexpr (std::is_same_v<T, Torus>) {
                // golden-angle lattice on the (tube, axis) angles
                for (int i = 0; i < count; ++i) {
                    double theta = 2.0 * pi * ((i + 0.5) / count);          // around tube
                    double psi = std::fmod(2.0 * pi * i / golden, 2.0 * pi);  // around axis
                    double ct = std::cos(theta), st = std::sin(theta);
                    double rho = s.major + s.minor * ct;
                    Vec3 p{rho * std::cos(psi), rho * std::sin(psi), s.minor * st};
                    Vec3 n{ct * std::cos(psi), ct * std::sin(psi), st};
                    double k_tube = 1.0 / s.minor;
                    double k_axis = ct / rho;
                    out.push_back({p, n, k_tube + k_axis, k_tube * k_axis});
                }
            } else {
                AnalyticShape base = std::visit(
                    [](const auto& b) -> AnalyticShape { return b; }, s.base);
                out = surface_samples(base, count);  // same zero set, same geometry
            }
        },
        shape);
    return out;
}

/// Samples phi on the grid. Requires the surface to stay at least `margin`
/// away from every box face.
inline LevelSet sample_level_set(const AnalyticShape& shape, const GridSpec& spec,
                                 double band_width, double margin = -1.0) {
    if (margin < 0.0) margin = band_width;
    Vec3 lo, hi;
    shape_bounds(shape, lo, hi);
    Vec3 bmax = spec.box_max();
    for (int d = 0; d < 3; ++d) {
        if (lo[d] - spec.origin[d] < margin || bmax[d] - hi[d] < margin)
            throw ShapeTouchesBoundary("shape must keep margin " + std::to_string(margin) +
                                       " from the box faces");
    }
    ScalarField3 phi = sample_scalar(spec, [&](const Vec3& p) { return exact_phi(shape, p); });
    return make_level_set(std::move(phi), band_width, is_signed_distance(shape));
}

}  // namespace geoflow
