#pragma once

#include <functional>
#include <utility>
#include <variant>

#include "geoflow/quadrature.hpp"

namespace geoflow {

struct AreaFunctional {};

/// Surface tension f(n) with f positively 1-homogeneous; grad_f is its
/// gradient as a map R^3 -> R^3.
struct AnisotropicFunctional {
    std::function<double(const Vec3&)> f;
    std::function<Vec3(const Vec3&)> grad_f;
};

/// Energy density A(H) with derivative A'.
struct MeanCurvatureFunctional {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

/// Energy density F(H, G) with partial derivatives F_H and F_G.
struct GaussMeanFunctional {
    std::function<double(double, double)> value;
    std::function<double(double, double)> d_h;
    std::function<double(double, double)> d_g;
};

using FunctionalSpec =
    std::variant<AreaFunctional, AnisotropicFunctional, MeanCurvatureFunctional,
                 GaussMeanFunctional>;

namespace detail {

inline std::vector<Vec3> validation_directions() {
    std::vector<Vec3> dirs;
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const int count = 24;
    for (int i = 0; i < count; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / count;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = 2.0 * std::numbers::pi * i / golden;
        dirs.push_back({r * std::cos(th), r * std::sin(th), z});
    }
    return dirs;
}

}  // namespace detail

/// Checks positive 1-homogeneity and the Euler identity grad f(m) . m = f(m)
/// on sampled unit directions.
inline void validate_anisotropic(const AnisotropicFunctional& spec) {
    for (const Vec3& m : detail::validation_directions()) {
        double fm = spec.f(m);
        for (double t : {0.5, 2.0}) {
            if (std::abs(spec.f(t * m) - t * fm) > 1e-10 * std::max(1.0, std::abs(fm)))
                throw std::invalid_argument(
                    "AnisotropicFunctional: f is not positively 1-homogeneous");
        }
        if (std::abs(dot(spec.grad_f(m), m) - fm) > 1e-8)
            throw std::invalid_argument(
                "AnisotropicFunctional: Euler identity grad f(m).m = f(m) fails");
    }
}

/// Checks F_H and F_G against central finite differences of F.
inline void validate_gauss_mean(const GaussMeanFunctional& spec) {
    const double hs[] = {-4.0, -1.0, 0.0, 0.5, 3.0, 6.0};
    const double gs[] = {-2.0, 0.0, 1.0, 4.0, 9.0};
    for (double H : hs)
        for (double G : gs) {
            double dh = 1e-4 * (1.0 + std::abs(H));
            double dg = 1e-4 * (1.0 + std::abs(G));
            double fd_h = (spec.value(H + dh, G) - spec.value(H - dh, G)) / (2.0 * dh);
            double fd_g = (spec.value(H, G + dg) - spec.value(H, G - dg)) / (2.0 * dg);
            double eh = std::abs(fd_h - spec.d_h(H, G)) / (std::abs(fd_h) + 1e-6);
            double eg = std::abs(fd_g - spec.d_g(H, G)) / (std::abs(fd_g) + 1e-6);
            if (eh > 1e-6 || eg > 1e-6)
                throw std::invalid_argument(
                    "GaussMeanFunctional: supplied partials disagree with finite differences");
        }
}

inline FunctionalSpec make_area() { return AreaFunctional{}; }

inline FunctionalSpec make_anisotropic(std::function<double(const Vec3&)> f,
                                       std::function<Vec3(const Vec3&)> grad_f) {
    AnisotropicFunctional spec{std::move(f), std::move(grad_f)};
    validate_anisotropic(spec);
    return spec;
}

inline FunctionalSpec make_mean_curvature(std::function<double(double)> A,
                                          std::function<double(double)> A_prime) {
    return MeanCurvatureFunctional{std::move(A), std::move(A_prime)};
}

inline FunctionalSpec make_gauss_mean(std::function<double(double, double)> F,
                                      std::function<double(double, double)> F_H,
                                      std::function<double(double, double)> F_G) {
    GaussMeanFunctional spec{std::move(F), std::move(F_H), std::move(F_G)};
    validate_gauss_mean(spec);
    return spec;
}

inline bool functional_requires_distance(const FunctionalSpec& spec) {
    return std::holds_alternative<GaussMeanFunctional>(spec);
}

/// Pointwise energy density of the functional: 1, f(n), A(H) or F(H,G).
inline ScalarField3 energy_density(const GeometryBundle& bundle, const FunctionalSpec& spec) {
    const GridSpec& gs = bundle.spec();
    return std::visit(
        [&](const auto& s) -> ScalarField3 {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AreaFunctional>) {
                return map_points(gs, [](std::size_t) { return 1.0; });
            } else if constexpr (std::is_same_v<T, AnisotropicFunctional>) {
                ScalarField3 out(gs);
                parallel_for(gs.num_points(), [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t idx = lo; idx < hi; ++idx)
                        out.data[idx] = s.f(bundle.n.get(idx));
                });
                return out;
            } else if constexpr (std::is_same_v<T, MeanCurvatureFunctional>) {
                ScalarField3 out(gs);
                parallel_for(gs.num_points(), [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t idx = lo; idx < hi; ++idx)
                        out.data[idx] = s.value(bundle.H.data[idx]);
                });
                return out;
            } else {
                ScalarField3 out(gs);
                parallel_for(gs.num_points(), [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t idx = lo; idx < hi; ++idx)
                        out.data[idx] = s.value(bundle.H.data[idx], bundle.G.data[idx]);
                });
                return out;
            }
        },
        spec);
}

inline double energy(const LevelSet& ls, const GeometryBundle& bundle,
                     const FunctionalSpec& spec, const SmearKernel& kernel) {
    return surface_integral(ls, energy_density(bundle, spec), kernel, bundle.norm_grad_phi);
}

inline double energy(const LevelSet& ls, const FunctionalSpec& spec, const SmearKernel& kernel) {
    return energy(ls, geometry_bundle(ls), spec, kernel);
}

/// Scalar density d such that dJ = int d (u.n) dsigma.
struct ShapeGradient {
    ScalarField3 field;
    bool requires_distance = false;
};

inline ShapeGradient grad_area(const GeometryBundle& bundle) {
    return {bundle.H, false};
}

/// Anisotropic gradient: primary density div_S(grad f(n)); the projected
/// variant f(n) H + div_S((I-n(x)n) grad f(n)) is kept as a diagnostic along
/// with the max band discrepancy between the two.
struct AnisotropicGradient {
    ShapeGradient gradient;
    ScalarField3 projected_density;
    double max_band_discrepancy = 0.0;
};

inline AnisotropicGradient grad_anisotropic(const GeometryBundle& bundle,
                                            const AnisotropicFunctional& spec) {
    const GridSpec& gs = bundle.spec();
    const std::size_t n = gs.num_points();

    VectorField3 nf(gs);   // grad f(n)
    VectorField3 nfp(gs);  // projected
    ScalarField3 fval(gs);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Vec3 nv = bundle.n.get(idx);
            Vec3 w = spec.grad_f(nv);
            nf.set(idx, w);
            nfp.set(idx, w - dot(w, nv) * nv);
            fval.data[idx] = spec.f(nv);
        }
    });

    ScalarField3 primary = tangential_divergence(nf, bundle);
    ScalarField3 td_proj = tangential_divergence(nfp, bundle);
    ScalarField3 projected = map_points(gs, [&](std::size_t idx) {
        return fval.data[idx] * bundle.H.data[idx] + td_proj.data[idx];
    });

    double disc = reduce_max(gs, [&](std::size_t idx) {
        if (!bundle.band[idx]) return -1.0;
        return std::abs(primary.data[idx] - projected.data[idx]);
    });

    return {{std::move(primary), false}, std::move(projected), std::max(disc, 0.0)};
}

/// Willmore-type gradient: A(H) H - lap_S(A'(H)) - A'(H)(H^2 - 2G).
inline ShapeGradient grad_mean_curvature(const GeometryBundle& bundle,
                                         const MeanCurvatureFunctional& spec) {
    const GridSpec& gs = bundle.spec();
    ScalarField3 aprime = map_points(gs, [&](std::size_t idx) {
        return spec.deriv(bundle.H.data[idx]);
    });
    ScalarField3 lb = laplace_beltrami(aprime, bundle);
    ScalarField3 density = map_points(gs, [&](std::size_t idx) {
        double h = bundle.H.data[idx], g = bundle.G.data[idx];
        return spec.value(h) * h - lb.data[idx] - aprime.data[idx] * (h * h - 2.0 * g);
    });
    return {std::move(density), false};
}

/// Gaussian-curvature gradient on a distance function. Primary density:
///   F H - F_H (H^2-2G) - lap_S F_H - F_G G H - H lap_S F_G
///   + [grad_S n] : grad_S(grad_S F_G)
/// The pre-Gauss-Bonnet variant replaces -F_G G H by +F_G grad G . n.
struct GaussMeanGradient {
    ShapeGradient gradient;
    ScalarField3 pre_gauss_bonnet_density;
};

inline GaussMeanGradient grad_gauss_mean(const GeometryBundle& bundle,
                                         const GaussMeanFunctional& spec, const LevelSet& ls) {
    if (!ls.is_distance)
        throw NotDistanceFunction("grad_gauss_mean requires a distance function; redistance first");
    const GridSpec& gs = bundle.spec();
    const std::size_t n = gs.num_points();

    ScalarField3 fh(gs), fg(gs), fval(gs);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            double h = bundle.H.data[idx], g = bundle.G.data[idx];
            fval.data[idx] = spec.value(h, g);
            fh.data[idx] = spec.d_h(h, g);
            fg.data[idx] = spec.d_g(h, g);
        }
    });

    ScalarField3 lb_fh = laplace_beltrami(fh, bundle);
    ScalarField3 lb_fg = laplace_beltrami(fg, bundle);

    // [grad_S n] : grad_S(grad_S F_G)
    VectorField3 tg_fg = tangential_gradient(fg, bundle.n);
    MatrixField3 grad_tg = vector_gradient(tg_fg);
    ScalarField3 contraction = map_points(gs, [&](std::size_t idx) {
        Vec3 nv = bundle.n.get(idx);
        Mat3 P = Mat3::identity() - outer(nv, nv);
        Mat3 Tn = bundle.grad_n.get(idx).matmul(P);
        Mat3 Tf = grad_tg.get(idx).matmul(P);
        return frobenius_dot(Tn, Tf);
    });

    VectorField3 grad_G = gradient(bundle.G);

    ScalarField3 density(gs), pre_gb(gs);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            double h = bundle.H.data[idx], g = bundle.G.data[idx];
            double common = fval.data[idx] * h - fh.data[idx] * (h * h - 2.0 * g) -
                            lb_fh.data[idx] - h * lb_fg.data[idx] + contraction.data[idx];
            density.data[idx] = common - fg.data[idx] * g * h;
            pre_gb.data[idx] = common + fg.data[idx] * dot(grad_G.get(idx), bundle.n.get(idx));
        }
    });
    return {{std::move(density), true}, std::move(pre_gb)};
}

/// alpha = F_H + H F_G and beta = -F_G: the coefficients of
/// [grad g]([grad n]) = alpha I + beta [grad n]^T for g(w) = F(Tr w, TrCof w).
inline std::pair<ScalarField3, ScalarField3> alpha_beta_fields(const GeometryBundle& bundle,
                                                               const GaussMeanFunctional& spec) {
    const GridSpec& gs = bundle.spec();
    ScalarField3 alpha(gs), beta(gs);
    parallel_for(gs.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            double h = bundle.H.data[idx], g = bundle.G.data[idx];
            alpha.data[idx] = spec.d_h(h, g) + h * spec.d_g(h, g);
            beta.data[idx] = -spec.d_g(h, g);
        }
    });
    return {std::move(alpha), std::move(beta)};
}

/// Dispatch to the density of any catalog functional.
inline ShapeGradient shape_gradient(const LevelSet& ls, const GeometryBundle& bundle,
                                    const FunctionalSpec& spec) {
    return std::visit(
        [&](const auto& s) -> ShapeGradient {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AreaFunctional>)
                return grad_area(bundle);
            else if constexpr (std::is_same_v<T, AnisotropicFunctional>)
                return grad_anisotropic(bundle, s).gradient;
            else if constexpr (std::is_same_v<T, MeanCurvatureFunctional>)
                return grad_mean_curvature(bundle, s);
            else
                return grad_gauss_mean(bundle, s, ls).gradient;
        },
        spec);
}

/// Normalized residual of grad G . n = -G H on the interface:
/// int |grad G . n + G H| dsigma / (int |G H| dsigma + 1).
inline double gauss_bonnet_normal_derivative_check(const LevelSet& ls, const SmearKernel& kernel) {
    if (!ls.is_distance)
        throw NotDistanceFunction("gauss_bonnet_normal_derivative_check requires a distance function");
    GeometryBundle bundle = geometry_bundle(ls);
    VectorField3 grad_G = gradient(bundle.G);
    ScalarField3 num = map_points(ls.spec(), [&](std::size_t idx) {
        return std::abs(dot(grad_G.get(idx), bundle.n.get(idx)) +
                        bundle.G.data[idx] * bundle.H.data[idx]);
    });
    ScalarField3 den = map_points(ls.spec(), [&](std::size_t idx) {
        return std::abs(bundle.G.data[idx] * bundle.H.data[idx]);
    });
    double in = surface_integral(ls, num, kernel, bundle.norm_grad_phi);
    double id = surface_integral(ls, den, kernel, bundle.norm_grad_phi);
    return in / (id + 1.0);
}

// ---- Named presets (shared by the CLI and tests) ----

inline FunctionalSpec preset_area() { return make_area(); }

inline FunctionalSpec preset_willmore() {
    return make_mean_curvature([](double h) { return h * h; }, [](double h) { return 2.0 * h; });
}

inline FunctionalSpec preset_helfrich(double c0) {
    return make_mean_curvature(
        [c0](double h) { return (h - c0) * (h - c0); },
        [c0](double h) { return 2.0 * (h - c0); });
}

inline FunctionalSpec preset_total_mean() {
    return make_mean_curvature([](double h) { return h; }, [](double) { return 1.0; });
}

inline FunctionalSpec preset_gauss() {
    return make_gauss_mean([](double, double g) { return g; },
                           [](double, double) { return 0.0; },
                           [](double, double) { return 1.0; });
}

inline FunctionalSpec preset_h2_plus_g() {
    return make_gauss_mean([](double h, double g) { return h * h + g; },
                           [](double h, double) { return 2.0 * h; },
                           [](double, double) { return 1.0; });
}

inline FunctionalSpec preset_aniso_diag(double m1, double m2, double m3) {
    Vec3 w{m1, m2, m3};
    return make_anisotropic(
        [w](const Vec3& m) {
            return std::sqrt(w.x * m.x * m.x + w.y * m.y * m.y + w.z * m.z * m.z);
        },
        [w](const Vec3& m) {
            double f = std::sqrt(w.x * m.x * m.x + w.y * m.y * m.y + w.z * m.z * m.z);
            return Vec3{w.x * m.x / f, w.y * m.y / f, w.z * m.z / f};
        });
}

}  // namespace geoflow
