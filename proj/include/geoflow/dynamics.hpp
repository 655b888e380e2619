#pragma once

#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "geoflow/functionals.hpp"

namespace geoflow {

/// Interface velocity: either a scalar normal speed (u = s n) or a full
/// vector field.
struct NormalSpeed {
    ScalarField3 speed;
};
struct FullVector {
    VectorField3 u;
};
using VelocitySpec = std::variant<NormalSpeed, FullVector>;

namespace detail {

inline double sum_abs_components_max(const VectorField3& u) {
    return reduce_max(u.spec, [&](std::size_t idx) {
        Vec3 v = u.get(idx);
        return std::abs(v.x) + std::abs(v.y) + std::abs(v.z);
    });
}

/// One-sided first differences with clamping at the faces.
struct UpwindDiffs {
    double minus = 0.0, plus = 0.0;
};

inline UpwindDiffs one_sided(const double* phi, std::size_t c, int m, int n, std::ptrdiff_t s,
                             double inv_h) {
    UpwindDiffs d;
    d.minus = (m > 0) ? (phi[c] - phi[c - s]) * inv_h : (phi[c + s] - phi[c]) * inv_h;
    d.plus = (m < n - 1) ? (phi[c + s] - phi[c]) * inv_h : (phi[c] - phi[c - s]) * inv_h;
    return d;
}

}  // namespace detail

/// Explicit Euler transport step for phi_t + u . grad phi = 0.
/// FullVector: component-wise first-order upwinding. NormalSpeed: Godunov
/// gradient norm. Clears is_distance. Throws CflViolation when dt exceeds the
/// advective stability bound of the frozen velocity field; callers moving
/// with curvature-dependent speeds must restrict dt to the parabolic rule
/// themselves (gradient_flow does).
inline LevelSet transport_step(const LevelSet& ls, const VelocitySpec& vel, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("transport_step: dt must be positive");
    const GridSpec& spec = ls.spec();
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    const double inv_h = 1.0 / spec.h;
    const double* phi = ls.phi.data.data();
    ScalarField3 out(spec);

    if (const auto* fv = std::get_if<FullVector>(&vel)) {
        double scale = detail::sum_abs_components_max(fv->u);
        if (dt * scale > spec.h)
            throw CflViolation("transport_step: dt exceeds h / max(sum |u_i|)");
        const std::ptrdiff_t sx = 1, sy = nx, sz = static_cast<std::ptrdiff_t>(nx) * ny;
        parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k)
                for (int j = 0; j < ny; ++j) {
                    std::size_t row = spec.index(0, j, static_cast<int>(k));
                    for (int i = 0; i < nx; ++i) {
                        std::size_t c = row + i;
                        Vec3 u = fv->u.get(c);
                        auto dx = detail::one_sided(phi, c, i, nx, sx, inv_h);
                        auto dy = detail::one_sided(phi, c, j, ny, sy, inv_h);
                        auto dz = detail::one_sided(phi, c, static_cast<int>(k), nz, sz, inv_h);
                        double adv = u.x * (u.x > 0.0 ? dx.minus : dx.plus) +
                                     u.y * (u.y > 0.0 ? dy.minus : dy.plus) +
                                     u.z * (u.z > 0.0 ? dz.minus : dz.plus);
                        out.data[c] = phi[c] - dt * adv;
                    }
                }
        });
    } else {
        const auto& sp = std::get<NormalSpeed>(vel).speed;
        double smax = reduce_max(spec, [&](std::size_t idx) { return std::abs(sp.data[idx]); });
        if (dt * std::sqrt(3.0) * smax > spec.h)
            throw CflViolation("transport_step: dt exceeds h / (sqrt(3) max |speed|)");
        const std::ptrdiff_t sx = 1, sy = nx, sz = static_cast<std::ptrdiff_t>(nx) * ny;
        parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k)
                for (int j = 0; j < ny; ++j) {
                    std::size_t row = spec.index(0, j, static_cast<int>(k));
                    for (int i = 0; i < nx; ++i) {
                        std::size_t c = row + i;
                        double s = sp.data[c];
                        auto dx = detail::one_sided(phi, c, i, nx, sx, inv_h);
                        auto dy = detail::one_sided(phi, c, j, ny, sy, inv_h);
                        auto dz = detail::one_sided(phi, c, static_cast<int>(k), nz, sz, inv_h);
                        double g2;
                        if (s > 0.0) {
                            auto sq = [](double v) { return v * v; };
                            g2 = sq(std::max(dx.minus, 0.0)) + sq(std::min(dx.plus, 0.0)) +
                                 sq(std::max(dy.minus, 0.0)) + sq(std::min(dy.plus, 0.0)) +
                                 sq(std::max(dz.minus, 0.0)) + sq(std::min(dz.plus, 0.0));
                        } else {
                            auto sq = [](double v) { return v * v; };
                            g2 = sq(std::min(dx.minus, 0.0)) + sq(std::max(dx.plus, 0.0)) +
                                 sq(std::min(dy.minus, 0.0)) + sq(std::max(dy.plus, 0.0)) +
                                 sq(std::min(dz.minus, 0.0)) + sq(std::max(dz.plus, 0.0));
                        }
                        out.data[c] = phi[c] - dt * s * std::sqrt(g2);
                    }
                }
        });
    }
    return make_level_set(std::move(out), ls.band_width, false);
}

/// Single second-order central advection step (no upwind bias); used by the
/// finite-difference energy-derivative oracle where dt may be signed.
inline LevelSet central_advect(const LevelSet& ls, const VelocitySpec& vel, double dt) {
    const GridSpec& spec = ls.spec();
    double scale;
    ScalarField3 rate(spec);
    if (const auto* fv = std::get_if<FullVector>(&vel)) {
        scale = detail::sum_abs_components_max(fv->u);
        VectorField3 g = gradient(ls.phi);
        rate = map_points(spec, [&](std::size_t idx) {
            return dot(fv->u.get(idx), g.get(idx));
        });
    } else {
        const auto& sp = std::get<NormalSpeed>(vel).speed;
        scale = std::sqrt(3.0) *
                reduce_max(spec, [&](std::size_t idx) { return std::abs(sp.data[idx]); });
        VectorField3 g = gradient(ls.phi);
        rate = map_points(spec, [&](std::size_t idx) {
            return sp.data[idx] * norm(g.get(idx));
        });
    }
    if (std::abs(dt) * scale > spec.h)
        throw CflViolation("central_advect: |dt| exceeds the advective bound");
    ScalarField3 out = map_points(spec, [&](std::size_t idx) {
        return ls.phi.data[idx] - dt * rate.data[idx];
    });
    return make_level_set(std::move(out), ls.band_width, false);
}

/// Rebuilds a signed distance function from the zero set of phi.
///
/// Near the interface the eikonal |grad d| = 1 is solved by damped smooth
/// Near-interface strategy for redistance().
///
/// Smooth: damped normalization passes phi <- phi (1/2 + 1/(2 |grad phi|))
/// build the band; each pass multiplies phi by a positive factor, so the
/// zero set never moves, the gradient deviation contracts quadratically, and
/// the band stays smooth enough for the nested curvature stencils
/// downstream. Preferred for analysis on a freshly sampled level set.
///
/// Monotone: pure Godunov sweeps from subcell edge-crossing distances.
/// First-order kinks make second derivatives of the band noisy, but the
/// scheme is unconditionally stable under repetition, which is what the
/// flow loop needs.
enum class RedistanceMode { Smooth, Monotone };

inline LevelSet redistance(const LevelSet& ls, RedistanceMode mode = RedistanceMode::Smooth) {
    const GridSpec& spec = ls.spec();
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    const double h = spec.h;
    const std::size_t npts = spec.num_points();
    const double INF = std::numeric_limits<double>::infinity();

    {
        bool has_neg = false, has_pos = false;
        for (double v : ls.phi.data) {
            has_neg = has_neg || v < 0.0;
            has_pos = has_pos || v >= 0.0;
        }
        if (!has_neg || !has_pos) throw NoInterface("redistance: phi has uniform sign");
    }

    const std::ptrdiff_t strides[3] = {1, nx, static_cast<std::ptrdiff_t>(nx) * ny};
    std::vector<double> dist(npts, INF);
    std::vector<std::uint8_t> frozen(npts, 0);

    if (mode == RedistanceMode::Smooth) {
        Vec3 ext = spec.box_max() - spec.origin;
        const double clamp_mag = norm(ext);  // box diagonal bounds any distance

        ScalarField3 work = ls.phi;
        for (int pass = 0; pass < 4; ++pass) {
            VectorField3 gw = gradient(work);
            parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t idx = lo; idx < hi; ++idx) {
                    double m = norm(gw.get(idx));
                    double f = pass == 0
                                   ? 1.0 / std::max(m, kGradMin)
                                   : std::clamp(0.5 + 0.5 / std::max(m, 0.2), 0.75, 1.33);
                    work.data[idx] = std::clamp(work.data[idx] * f, -clamp_mag, clamp_mag);
                }
            });
        }

        // Freeze the normalized band (plus the halo the smeared integrands'
        // stencils reach); the sweeps fill everything else. Cells near box
        // faces are never frozen so the far field always comes from the
        // sweeps.
        const double freeze_radius = ls.band_width + 2.0 * h;
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    std::size_t idx = spec.index(i, j, k);
                    bool shell = i < 3 || j < 3 || k < 3 || i >= nx - 3 || j >= ny - 3 ||
                                 k >= nz - 3;
                    double t = std::abs(work.data[idx]);
                    if (!shell && t <= freeze_radius) {
                        dist[idx] = t;
                        frozen[idx] = 1;
                    }
                }
    }

    // Subcell distances on sign-change edges seed the sweeps (and are the
    // whole near-field in Monotone mode).
    const double* phi_in = ls.phi.data.data();
    bool any_crossing = false;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::size_t c = spec.index(i, j, k);
                int here[3] = {i, j, k};
                for (int d = 0; d < 3; ++d) {
                    if (here[d] + 1 >= spec.dims[d]) continue;
                    std::size_t q = c + strides[d];
                    double a = phi_in[c], b = phi_in[q];
                    if ((a < 0.0) == (b < 0.0)) continue;
                    any_crossing = true;
                    if (mode == RedistanceMode::Smooth) continue;  // band frozen already
                    double denom = std::abs(a - b);
                    if (denom < 1e-300) continue;
                    double da = h * std::abs(a) / denom;
                    double db = h * std::abs(b) / denom;
                    if (da < dist[c]) dist[c] = da;
                    if (db < dist[q]) dist[q] = db;
                    frozen[c] = frozen[q] = 1;
                }
            }
    if (!any_crossing) throw NoInterface("redistance: no sign-change edges");

    // 8 sweep orderings; repeat until the update is negligible
    auto solve_point = [&](std::size_t c, int i, int j, int k) {
        double a[3];
        for (int d = 0; d < 3; ++d) {
            int m = (d == 0) ? i : (d == 1) ? j : k;
            double lo = (m > 0) ? dist[c - strides[d]] : INF;
            double hi2 = (m < spec.dims[d] - 1) ? dist[c + strides[d]] : INF;
            a[d] = std::min(lo, hi2);
        }
        std::sort(a, a + 3);
        if (a[0] == INF) return;
        double d_new = a[0] + h;
        if (d_new > a[1]) {
            double s = a[0] + a[1];
            double disc = 2.0 * h * h - (a[0] - a[1]) * (a[0] - a[1]);
            d_new = 0.5 * (s + std::sqrt(std::max(disc, 0.0)));
            if (d_new > a[2]) {
                double t = a[0] + a[1] + a[2];
                double q = t * t - 3.0 * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] - h * h);
                d_new = (t + std::sqrt(std::max(q, 0.0))) / 3.0;
            }
        }
        if (d_new < dist[c]) dist[c] = d_new;
    };

    for (int round = 0; round < 3; ++round) {
        double max_change = 0.0;
        for (int sweep = 0; sweep < 8; ++sweep) {
            int di = (sweep & 1) ? -1 : 1;
            int dj = (sweep & 2) ? -1 : 1;
            int dk = (sweep & 4) ? -1 : 1;
            int i0 = di > 0 ? 0 : nx - 1, i1 = di > 0 ? nx : -1;
            int j0 = dj > 0 ? 0 : ny - 1, j1 = dj > 0 ? ny : -1;
            int k0 = dk > 0 ? 0 : nz - 1, k1 = dk > 0 ? nz : -1;
            for (int k = k0; k != k1; k += dk)
                for (int j = j0; j != j1; j += dj)
                    for (int i = i0; i != i1; i += di) {
                        std::size_t c = spec.index(i, j, k);
                        if (frozen[c]) continue;
                        double before = dist[c];
                        solve_point(c, i, j, k);
                        if (before != dist[c])
                            max_change = std::max(max_change, before == INF ? INF
                                                                            : before - dist[c]);
                    }
        }
        if (max_change < 1e-3 * h) break;
    }

    ScalarField3 out(spec);
    parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx)
            out.data[idx] = (ls.phi.data[idx] < 0.0 ? -1.0 : 1.0) * dist[idx];
    });

    // certify |grad phi'| = 1 on the band
    VectorField3 g2 = gradient(out);
    double dev = reduce_max(spec, [&](std::size_t idx) {
        double m = norm(g2.get(idx));
        if (!in_band_point(out.data[idx], m, ls.band_width)) return 0.0;
        return std::abs(m - 1.0);
    });
    return LevelSet{std::move(out), dev <= kDistTol, ls.band_width};
}

/// Central finite difference of the smeared energy along the transport flow:
/// [E(phi advected by +delta) - E(phi advected by -delta)] / (2 delta).
/// This is the ground-truth oracle every closed-form shape gradient is
/// checked against.
inline double fd_energy_derivative(const LevelSet& ls, const FunctionalSpec& spec,
                                   const VelocitySpec& vel, const SmearKernel& kernel,
                                   double delta_t) {
    if (!(delta_t > 0.0))
        throw std::invalid_argument("fd_energy_derivative: delta_t must be positive");
    LevelSet plus = central_advect(ls, vel, delta_t);
    LevelSet minus = central_advect(ls, vel, -delta_t);
    double ep = energy(plus, spec, kernel);
    double em = energy(minus, spec, kernel);
    return (ep - em) / (2.0 * delta_t);
}

/// Default oracle step: small enough that transport stays CFL-safe and the
/// central difference sits well inside its asymptotic range.
inline double default_fd_delta(const LevelSet& ls, const VelocitySpec& vel) {
    double scale;
    if (const auto* ns = std::get_if<NormalSpeed>(&vel))
        scale = reduce_max(ls.spec(), [&](std::size_t idx) {
            return std::abs(ns->speed.data[idx]);
        });
    else
        scale = detail::sum_abs_components_max(std::get<FullVector>(vel).u);
    double h = ls.spec().h;
    return 0.1 * h * h / std::max(scale, 1e-12);
}

struct FdDerivative {
    double value = 0.0;
    double delta = 0.0;
    double richardson_gap = 0.0;  // |D(delta) - D(delta/2)| of the accepted pair
};

/// Picks delta by a 3-point Richardson consistency check: halves delta until
/// two consecutive estimates agree.
inline FdDerivative fd_energy_derivative_auto(const LevelSet& ls, const FunctionalSpec& spec,
                                              const VelocitySpec& vel, const SmearKernel& kernel,
                                              double delta0 = 0.0) {
    double d = delta0 > 0.0 ? delta0 : default_fd_delta(ls, vel);
    double prev = fd_energy_derivative(ls, spec, vel, kernel, d);
    for (int it = 0; it < 3; ++it) {
        double cur = fd_energy_derivative(ls, spec, vel, kernel, d / 2.0);
        double gap = std::abs(cur - prev);
        if (gap <= 1e-3 * (std::abs(cur) + 1.0)) return {cur, d / 2.0, gap};
        prev = cur;
        d /= 2.0;
    }
    return {prev, d, std::abs(prev)};
}

/// Closed-form derivative: int density (u.n) dsigma with the catalog density.
inline double predicted_energy_derivative(const LevelSet& ls, const GeometryBundle& bundle,
                                          const FunctionalSpec& spec, const VelocitySpec& vel,
                                          const SmearKernel& kernel) {
    ShapeGradient grad = shape_gradient(ls, bundle, spec);
    ScalarField3 integrand(ls.spec());
    if (const auto* ns = std::get_if<NormalSpeed>(&vel)) {
        integrand = map_points(ls.spec(), [&](std::size_t idx) {
            return grad.field.data[idx] * ns->speed.data[idx];
        });
    } else {
        const auto& u = std::get<FullVector>(vel).u;
        integrand = map_points(ls.spec(), [&](std::size_t idx) {
            return grad.field.data[idx] * dot(u.get(idx), bundle.n.get(idx));
        });
    }
    return surface_integral(ls, integrand, kernel, bundle.norm_grad_phi);
}

inline double predicted_energy_derivative(const LevelSet& ls, const FunctionalSpec& spec,
                                          const VelocitySpec& vel, const SmearKernel& kernel) {
    return predicted_energy_derivative(ls, geometry_bundle(ls), spec, vel, kernel);
}

struct FlowConfig {
    double dt_safety = 0.5;       // in (0, 1]
    int redistance_every = 1;     // steps between redistancing; >= 1
    int max_steps = 100;
    double stop_grad_norm = 0.0;  // stop when sqrt(int density^2) drops below
    double dt_cap = std::numeric_limits<double>::infinity();  // absolute step cap
};

enum class FlowStatus { MaxSteps, Converged, NonMonotoneEnergy };

struct FlowSample {
    int step = 0;
    double time = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
};

struct FlowResult {
    std::vector<FlowSample> trajectory;
    LevelSet final_state;
    FlowStatus status = FlowStatus::MaxSteps;
};

/// Gradient descent u.n = -density: repeats { redistance if scheduled;
/// compute density; step with NormalSpeed }. The speed is tapered to zero
/// beyond the trusted band so far-field curvature singularities cannot
/// contaminate the transport. dt per step: dt_safety * h^2 / max band
/// |density|, capped by dt_cap and the advective bound. Aborts with
/// NonMonotoneEnergy after 3 consecutive energy increases above mono_tol.
using FlowObserver = std::function<void(const FlowSample&, const LevelSet&, const GeometryBundle&)>;

inline FlowResult gradient_flow(LevelSet ls, const FunctionalSpec& spec, const SmearKernel& kernel,
                                const FlowConfig& cfg, const FlowObserver& observer = {}) {
    if (!(cfg.dt_safety > 0.0 && cfg.dt_safety <= 1.0))
        throw std::invalid_argument("FlowConfig: dt_safety must be in (0, 1]");
    if (cfg.redistance_every < 1)
        throw std::invalid_argument("FlowConfig: redistance_every must be >= 1");
    if (functional_requires_distance(spec) && cfg.redistance_every != 1)
        throw std::invalid_argument("gradient_flow: Gaussian functionals need redistance_every=1");

    const double h = ls.spec().h;
    FlowResult result;
    double time = 0.0;
    double mono_tol = 0.0;
    int rises = 0;
    double prev_energy = 0.0;

    for (int step = 0;; ++step) {
        if (step % cfg.redistance_every == 0) ls = redistance(ls, RedistanceMode::Monotone);

        GeometryBundle bundle = geometry_bundle(ls);
        ShapeGradient grad = shape_gradient(ls, bundle, spec);

        ScalarField3 density_sq = map_points(ls.spec(), [&](std::size_t idx) {
            return grad.field.data[idx] * grad.field.data[idx];
        });
        double e = energy(ls, bundle, spec, kernel);
        double gn = std::sqrt(std::max(0.0, surface_integral(ls, density_sq, kernel,
                                                             bundle.norm_grad_phi)));
        result.trajectory.push_back({step, time, e, gn});
        if (observer) observer(result.trajectory.back(), ls, bundle);

        if (step == 0) {
            mono_tol = 1e-3 * std::abs(e);
            prev_energy = e;
        } else {
            if (e > prev_energy + mono_tol) {
                if (++rises >= 3) {
                    result.status = FlowStatus::NonMonotoneEnergy;
                    break;
                }
            } else {
                rises = 0;
            }
            prev_energy = e;
        }

        if (step >= cfg.max_steps) {
            result.status = FlowStatus::MaxSteps;
            break;
        }
        if (cfg.stop_grad_norm > 0.0 && gn < cfg.stop_grad_norm) {
            result.status = FlowStatus::Converged;
            break;
        }

        // The time step is governed by the density on the support of the
        // smeared integrand; farther out (e.g. near the inner skeleton of a
        // thin shape) the curvature fields are not trusted and the speed is
        // tapered to zero anyway.
        double max_support_speed = reduce_max(ls.spec(), [&](std::size_t idx) {
            return std::abs(ls.phi.data[idx]) <= kernel.epsilon
                       ? std::abs(grad.field.data[idx])
                       : 0.0;
        });
        if (max_support_speed <= 1e-300) {
            result.status = FlowStatus::Converged;
            break;
        }

        // Taper the speed to zero at the support edge: cells beyond it (in
        // particular any inner-skeleton cells of thin shapes) are never
        // transported, so redistancing keeps them smooth.
        const double w0 = std::max(kernel.epsilon - h, 0.5 * kernel.epsilon);
        const double w1 = kernel.epsilon;
        ScalarField3 speed = map_points(ls.spec(), [&](std::size_t idx) {
            double t = std::abs(ls.phi.data[idx]);
            double c;
            if (t <= w0)
                c = 1.0;
            else if (t >= w1)
                c = 0.0;
            else
                c = 0.5 * (1.0 + std::cos(std::numbers::pi * (t - w0) / (w1 - w0)));
            return -grad.field.data[idx] * c;
        });
        double max_tapered = reduce_max(ls.spec(), [&](std::size_t idx) {
            return std::abs(speed.data[idx]);
        });

        double dt = cfg.dt_safety * h * h / max_support_speed;
        dt = std::min(dt, cfg.dt_cap);
        dt = std::min(dt, 0.9 * h / (std::sqrt(3.0) * max_tapered));
        ls = transport_step(ls, NormalSpeed{std::move(speed)}, dt);
        time += dt;
    }
    result.final_state = std::move(ls);
    return result;
}

}  // namespace geoflow
