#pragma once

#include <numbers>
#include <vector>

#include "geoflow/geometry.hpp"

namespace geoflow {

enum class SmearProfile { Cosine, Hat };

/// Compactly supported cut-off zeta on [-1,1] with unit mass, defining the
/// co-area surface quadrature of width epsilon.
struct SmearKernel {
    double epsilon = 0.0;
    SmearProfile profile = SmearProfile::Cosine;

    SmearKernel() = default;
    explicit SmearKernel(double eps, SmearProfile prof = SmearProfile::Cosine)
        : epsilon(eps), profile(prof) {
        if (!(eps > 0.0)) throw std::invalid_argument("SmearKernel: epsilon must be positive");
    }

    double value(double r) const {
        if (std::abs(r) >= 1.0) return 0.0;
        if (profile == SmearProfile::Cosine)
            return 0.5 * (1.0 + std::cos(std::numbers::pi * r));
        return 1.0 - std::abs(r);
    }

    /// Exact antiderivative with Z(-1) = 0; Z(1) - Z(-1) is the mass.
    double antiderivative(double r) const {
        r = std::clamp(r, -1.0, 1.0);
        if (profile == SmearProfile::Cosine)
            return 0.5 * (r + 1.0) + std::sin(std::numbers::pi * r) / (2.0 * std::numbers::pi);
        return r < 0.0 ? 0.5 * (1.0 + r) * (1.0 + r) : 0.5 + r - 0.5 * r * r;
    }

    double mass() const { return antiderivative(1.0) - antiderivative(-1.0); }
};

namespace detail {

/// Throws if the smeared band reaches the outer two grid layers of any face.
inline void check_interface_margin(const LevelSet& ls, const SmearKernel& kernel) {
    const GridSpec& s = ls.spec();
    const int nx = s.dims[0], ny = s.dims[1], nz = s.dims[2];
    auto near_face = [&](int i, int j, int k) {
        return i < 2 || j < 2 || k < 2 || i >= nx - 2 || j >= ny - 2 || k >= nz - 2;
    };
    for (int k = 0; k < nz; ++k) {
        bool face_k = k < 2 || k >= nz - 2;
        for (int j = 0; j < ny; ++j) {
            bool face_jk = face_k || j < 2 || j >= ny - 2;
            for (int i = 0; i < nx; ++i) {
                if (!face_jk && !near_face(i, j, k)) {
                    i = nx - 3;  // interior run; only the last two columns remain
                    continue;
                }
                if (std::abs(ls.phi.at(i, j, k)) < kernel.epsilon)
                    throw InterfaceTooCloseToBoundary(
                        "smear kernel support reaches a box face; enlarge the box");
            }
        }
    }
}

}  // namespace detail

/// Co-area quadrature: sum of density * |grad phi| * zeta(phi/eps)/eps * h^3.
inline double surface_integral(const LevelSet& ls, const ScalarField3& density,
                               const SmearKernel& kernel, const ScalarField3& norm_grad_phi) {
    if (kernel.epsilon < 2.0 * ls.spec().h)
        throw std::invalid_argument("surface_integral: epsilon must be >= 2h");
    detail::check_interface_margin(ls, kernel);
    const double inv_eps = 1.0 / kernel.epsilon;
    const double cell = ls.spec().h * ls.spec().h * ls.spec().h;
    double s = reduce_sum(ls.spec(), [&](std::size_t idx) {
        double z = kernel.value(ls.phi.data[idx] * inv_eps);
        if (z == 0.0) return 0.0;
        return density.data[idx] * norm_grad_phi.data[idx] * z * inv_eps;
    });
    return s * cell;
}

inline double surface_integral(const LevelSet& ls, const ScalarField3& density,
                               const SmearKernel& kernel) {
    VectorField3 g = gradient(ls.phi);
    ScalarField3 ngp = map_points(ls.spec(), [&](std::size_t idx) { return norm(g.get(idx)); });
    return surface_integral(ls, density, kernel, ngp);
}

/// Smeared area: density = 1.
inline double surface_area(const LevelSet& ls, const SmearKernel& kernel) {
    ScalarField3 one = map_points(ls.spec(), [](std::size_t) { return 1.0; });
    return surface_integral(ls, one, kernel);
}

struct ConvergenceRow {
    double epsilon = 0.0;
    double value = 0.0;
    double error = 0.0;
};

inline std::vector<ConvergenceRow> convergence_study(const LevelSet& ls,
                                                     const ScalarField3& density,
                                                     const std::vector<double>& eps_list,
                                                     double exact) {
    VectorField3 g = gradient(ls.phi);
    ScalarField3 ngp = map_points(ls.spec(), [&](std::size_t idx) { return norm(g.get(idx)); });
    std::vector<ConvergenceRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        double v = surface_integral(ls, density, SmearKernel(eps), ngp);
        rows.push_back({eps, v, std::abs(v - exact)});
    }
    return rows;
}

/// Surface integration by parts: int grad_S f . v = -int f div_S v + int H f v.n.
struct IbpSurfaceResult {
    double lhs = 0.0;       // int grad_S f . v
    double rhs_div = 0.0;   // -int f div_S v
    double rhs_curv = 0.0;  // int H f v.n
    double residual() const { return std::abs(lhs - rhs_div - rhs_curv); }
    double dominant() const {
        return std::max({std::abs(lhs), std::abs(rhs_div), std::abs(rhs_curv)});
    }
};

inline IbpSurfaceResult ibp_surface_residual(const LevelSet& ls, const GeometryBundle& bundle,
                                             const ScalarField3& f, const VectorField3& v,
                                             const SmearKernel& kernel) {
    const GridSpec& spec = ls.spec();
    VectorField3 tgf = tangential_gradient(f, bundle.n);
    ScalarField3 d1 = map_points(spec, [&](std::size_t idx) {
        return dot(tgf.get(idx), v.get(idx));
    });
    ScalarField3 tdv = tangential_divergence(v, bundle);
    ScalarField3 d2 = map_points(spec, [&](std::size_t idx) {
        return f.data[idx] * tdv.data[idx];
    });
    ScalarField3 d3 = map_points(spec, [&](std::size_t idx) {
        return bundle.H.data[idx] * f.data[idx] * dot(v.get(idx), bundle.n.get(idx));
    });
    IbpSurfaceResult r;
    r.lhs = surface_integral(ls, d1, kernel, bundle.norm_grad_phi);
    r.rhs_div = -surface_integral(ls, d2, kernel, bundle.norm_grad_phi);
    r.rhs_curv = surface_integral(ls, d3, kernel, bundle.norm_grad_phi);
    return r;
}

inline IbpSurfaceResult ibp_surface_residual(const LevelSet& ls, const ScalarField3& f,
                                             const VectorField3& v, const SmearKernel& kernel) {
    return ibp_surface_residual(ls, geometry_bundle(ls), f, v, kernel);
}

/// Symmetry of the surface laplacian: int f lap_S g = int g lap_S f.
struct IbpSymmetryResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual() const { return std::abs(lhs - rhs); }
    double dominant() const { return std::max(std::abs(lhs), std::abs(rhs)); }
};

inline IbpSymmetryResult ibp_laplacian_symmetry(const LevelSet& ls, const GeometryBundle& bundle,
                                                const ScalarField3& f, const ScalarField3& g,
                                                const SmearKernel& kernel) {
    ScalarField3 lbg = laplace_beltrami(g, bundle);
    ScalarField3 lbf = laplace_beltrami(f, bundle);
    ScalarField3 d1 = map_points(ls.spec(), [&](std::size_t idx) {
        return f.data[idx] * lbg.data[idx];
    });
    ScalarField3 d2 = map_points(ls.spec(), [&](std::size_t idx) {
        return g.data[idx] * lbf.data[idx];
    });
    IbpSymmetryResult r;
    r.lhs = surface_integral(ls, d1, kernel, bundle.norm_grad_phi);
    r.rhs = surface_integral(ls, d2, kernel, bundle.norm_grad_phi);
    return r;
}

inline IbpSymmetryResult ibp_laplacian_symmetry(const LevelSet& ls, const ScalarField3& f,
                                                const ScalarField3& g, const SmearKernel& kernel) {
    return ibp_laplacian_symmetry(ls, geometry_bundle(ls), f, g, kernel);
}

/// Volume integration by parts for shape operators over the whole box Q:
/// int f div_S v + int grad_S f . v - int div(n (x) n) . v f = 0
/// for fields vanishing on the box faces (caller applies a bump).
struct IbpVolumeResult {
    double term_div = 0.0;   // int f div_S v
    double term_grad = 0.0;  // int grad_S f . v
    double term_nn = 0.0;    // int div(n (x) n) . v f
    double residual() const { return std::abs(term_div + term_grad - term_nn); }
    double dominant() const {
        return std::max({std::abs(term_div), std::abs(term_grad), std::abs(term_nn)});
    }
};

inline IbpVolumeResult ibp_volume_residual(const ScalarField3& f, const VectorField3& v,
                                           const GeometryBundle& bundle) {
    const GridSpec& spec = f.spec;
    const double cell = spec.h * spec.h * spec.h;
    ScalarField3 tdv = tangential_divergence(v, bundle);
    VectorField3 tgf = tangential_gradient(f, bundle.n);

    MatrixField3 nn(spec);
    parallel_for(spec.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Vec3 n = bundle.n.get(idx);
            nn.set(idx, outer(n, n));
        }
    });
    VectorField3 div_nn = matrix_divergence(nn);

    IbpVolumeResult r;
    r.term_div = cell * reduce_sum(spec, [&](std::size_t idx) {
        return f.data[idx] * tdv.data[idx];
    });
    r.term_grad = cell * reduce_sum(spec, [&](std::size_t idx) {
        return dot(tgf.get(idx), v.get(idx));
    });
    r.term_nn = cell * reduce_sum(spec, [&](std::size_t idx) {
        return dot(div_nn.get(idx), v.get(idx)) * f.data[idx];
    });
    return r;
}

/// C2 polynomial bump (1-s^2)^3 per axis, scaled to the box; vanishes on all
/// box faces together with its first two derivatives.
inline ScalarField3 make_box_bump(const GridSpec& spec) {
    Vec3 bmax = spec.box_max();
    return sample_scalar(spec, [&](const Vec3& p) {
        double b = 1.0;
        for (int d = 0; d < 3; ++d) {
            double lo = spec.origin[d], hi = bmax[d];
            double s = 2.0 * (p[d] - lo) / (hi - lo) - 1.0;
            double q = 1.0 - s * s;
            b *= q * q * q;
        }
        return b;
    });
}

}  // namespace geoflow
