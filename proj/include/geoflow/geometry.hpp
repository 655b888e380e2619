#pragma once

#include <cstdint>

#include "geoflow/level_set.hpp"

namespace geoflow {

/// Pointwise differential geometry of a level set: unit normal n, the full
/// shape-operator extension [grad n], mean curvature H = k1 + k2 and Gaussian
/// curvature G = k1 k2 computed from the projected matrix
/// [grad n](I - n (x) n), plus |grad phi| and the trusted-band mask.
struct GeometryBundle {
    VectorField3 n;
    MatrixField3 grad_n;
    ScalarField3 H;
    ScalarField3 G;
    ScalarField3 norm_grad_phi;
    std::vector<std::uint8_t> band;
    double band_width = 0.0;

    const GridSpec& spec() const { return n.spec; }
};

/// n = grad phi / |grad phi|. Off the band the value is still computed (with a
/// clamped denominator) but is untrusted.
inline VectorField3 normal(const LevelSet& ls) {
    VectorField3 g = gradient(ls.phi);
    const std::size_t n = ls.spec().num_points();
    double worst = reduce_max(ls.spec(), [&](std::size_t idx) {
        double ngp = norm(g.get(idx));
        if (!in_band_point(ls.phi.data[idx], ngp, ls.band_width)) return -1.0;
        return ngp < kGradMin ? 1.0 : -1.0;
    });
    if (worst > 0.0)
        throw DegenerateGradient("normal: |grad phi| < g_min inside the band; redistance first");
    VectorField3 out(ls.spec());
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Vec3 v = g.get(idx);
            out.set(idx, v / std::max(norm(v), kGradMin));
        }
    });
    return out;
}

inline GeometryBundle geometry_bundle(const LevelSet& ls) {
    const GridSpec& spec = ls.spec();
    const std::size_t npts = spec.num_points();

    VectorField3 g = gradient(ls.phi);
    ScalarField3 ngp(spec);
    VectorField3 nrm(spec);
    parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Vec3 v = g.get(idx);
            double m = norm(v);
            ngp.data[idx] = m;
            nrm.set(idx, v / std::max(m, kGradMin));
        }
    });

    double worst = reduce_max(spec, [&](std::size_t idx) {
        if (!in_band_point(ls.phi.data[idx], ngp.data[idx], ls.band_width)) return -1.0;
        return ngp.data[idx] < kGradMin ? 1.0 : -1.0;
    });
    if (worst > 0.0)
        throw DegenerateGradient("geometry_bundle: |grad phi| < g_min inside the band");

    MatrixField3 grad_n = vector_gradient(nrm);

    // Curvatures from the projected gradient [grad n](I - n(x)n); for the
    // unit extension n = grad phi/|grad phi| this agrees with Tr/TrCof of the
    // full [grad n] up to the (vp) residual.
    ScalarField3 H(spec), G(spec);
    parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Mat3 A = grad_n.get(idx);
            Vec3 n = nrm.get(idx);
            Vec3 An = A.mul(n);
            double h = trace(A) - dot(An, n);
            Mat3 T = A - outer(An, n);
            H.data[idx] = h;
            G.data[idx] = trace_cof(T);
        }
    });

    GeometryBundle b{std::move(nrm), std::move(grad_n), std::move(H), std::move(G),
                     std::move(ngp), {}, ls.band_width};
    b.band = band_mask(ls.phi, b.norm_grad_phi, ls.band_width);
    return b;
}

/// Tangential gradient (I - n(x)n) grad f; exactly orthogonal to n pointwise.
inline VectorField3 tangential_gradient(const ScalarField3& f, const VectorField3& n) {
    VectorField3 g = gradient(f);
    VectorField3 out(f.spec);
    parallel_for(f.spec.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Vec3 gv = g.get(idx);
            Vec3 nv = n.get(idx);
            out.set(idx, gv - dot(gv, nv) * nv);
        }
    });
    return out;
}

/// div_S(v) = div(v) - ([grad v] n) . n. Applied to the bundle's own normal
/// this reproduces the H field through the same arithmetic.
inline ScalarField3 tangential_divergence(const VectorField3& v, const GeometryBundle& bundle) {
    MatrixField3 B = vector_gradient(v);
    ScalarField3 out(v.spec);
    parallel_for(v.spec.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            Mat3 A = B.get(idx);
            Vec3 n = bundle.n.get(idx);
            Vec3 An = A.mul(n);
            out.data[idx] = trace(A) - dot(An, n);
        }
    });
    return out;
}

inline ScalarField3 laplace_beltrami(const ScalarField3& f, const GeometryBundle& bundle) {
    return tangential_divergence(tangential_gradient(f, bundle.n), bundle);
}

struct BandStats {
    double max = 0.0;
    double mean = 0.0;
};

inline BandStats band_stats(const ScalarField3& f, const std::vector<std::uint8_t>& band) {
    double mx = reduce_max(f.spec, [&](std::size_t idx) {
        return band[idx] ? std::abs(f.data[idx]) : -1.0;
    });
    double sum = reduce_sum(f.spec, [&](std::size_t idx) {
        return band[idx] ? std::abs(f.data[idx]) : 0.0;
    });
    double cnt = reduce_sum(f.spec, [&](std::size_t idx) { return band[idx] ? 1.0 : 0.0; });
    return {std::max(mx, 0.0), cnt > 0 ? sum / cnt : 0.0};
}

/// Pointwise residuals of the three curvature lemmas and the (vp) pair.
///   lemma1: div([grad n] n) - grad H . n - (H^2 - 2G)
///   lemma2: (grad(grad_S f) n) . n + grad f . ([grad n] n)   for a test scalar f
///   lemma3: (grad([grad n] n) n) . n + ([grad n] n) . ([grad n] n)
///   vp_left:  |[grad n]^T n|        vp_right: |([grad n] n) . n|
struct LemmaResiduals {
    ScalarField3 lemma1, lemma2, lemma3, vp_left, vp_right;
    BandStats s1, s2, s3, svl, svr;
};

inline ScalarField3 default_lemma_test_scalar(const GridSpec& spec) {
    return sample_scalar(spec, [](const Vec3& p) { return std::sin(p.x) * std::cos(p.y) + p.z; });
}

inline LemmaResiduals lemma_residuals(const LevelSet& ls, const GeometryBundle& bundle,
                                      const ScalarField3* test_scalar = nullptr) {
    const GridSpec& spec = ls.spec();
    const std::size_t npts = spec.num_points();

    VectorField3 w(spec);  // [grad n] n
    parallel_for(npts, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx)
            w.set(idx, bundle.grad_n.get(idx).mul(bundle.n.get(idx)));
    });

    ScalarField3 div_w = divergence(w);
    VectorField3 grad_H = gradient(bundle.H);
    ScalarField3 r1 = map_points(spec, [&](std::size_t idx) {
        double h = bundle.H.data[idx], g = bundle.G.data[idx];
        return std::abs(div_w.data[idx] - dot(grad_H.get(idx), bundle.n.get(idx)) -
                        (h * h - 2.0 * g));
    });

    ScalarField3 fallback;
    if (!test_scalar) {
        fallback = default_lemma_test_scalar(spec);
        test_scalar = &fallback;
    }
    VectorField3 tg = tangential_gradient(*test_scalar, bundle.n);
    MatrixField3 grad_tg = vector_gradient(tg);
    VectorField3 grad_f = gradient(*test_scalar);
    ScalarField3 r2 = map_points(spec, [&](std::size_t idx) {
        Vec3 n = bundle.n.get(idx);
        return std::abs(dot(grad_tg.get(idx).mul(n), n) + dot(grad_f.get(idx), w.get(idx)));
    });

    MatrixField3 grad_w = vector_gradient(w);
    ScalarField3 r3 = map_points(spec, [&](std::size_t idx) {
        Vec3 n = bundle.n.get(idx);
        Vec3 wv = w.get(idx);
        return std::abs(dot(grad_w.get(idx).mul(n), n) + dot(wv, wv));
    });

    ScalarField3 vpl = map_points(spec, [&](std::size_t idx) {
        return norm(bundle.grad_n.get(idx).mul_transpose(bundle.n.get(idx)));
    });
    ScalarField3 vpr = map_points(spec, [&](std::size_t idx) {
        return std::abs(dot(w.get(idx), bundle.n.get(idx)));
    });

    LemmaResiduals out{std::move(r1), std::move(r2), std::move(r3), std::move(vpl),
                       std::move(vpr), {}, {}, {}, {}, {}};
    out.s1 = band_stats(out.lemma1, bundle.band);
    out.s2 = band_stats(out.lemma2, bundle.band);
    out.s3 = band_stats(out.lemma3, bundle.band);
    out.svl = band_stats(out.vp_left, bundle.band);
    out.svr = band_stats(out.vp_right, bundle.band);
    return out;
}

/// Residual of [grad n] n = grad_S |grad phi| / |grad phi| (identity for any
/// unit extension), plus |[grad n] n| itself, which must vanish for distance
/// functions.
struct NsnuCheck {
    ScalarField3 residual;
    ScalarField3 radial_norm;  // |[grad n] n|
    BandStats residual_stats;
    BandStats radial_stats;
};

inline NsnuCheck nsnu_check(const LevelSet& ls, const GeometryBundle& bundle) {
    const GridSpec& spec = ls.spec();
    VectorField3 tg = tangential_gradient(bundle.norm_grad_phi, bundle.n);
    ScalarField3 res = map_points(spec, [&](std::size_t idx) {
        Vec3 w = bundle.grad_n.get(idx).mul(bundle.n.get(idx));
        double m = std::max(bundle.norm_grad_phi.data[idx], kGradMin);
        return norm(w - tg.get(idx) / m);
    });
    ScalarField3 rn = map_points(spec, [&](std::size_t idx) {
        return norm(bundle.grad_n.get(idx).mul(bundle.n.get(idx)));
    });
    NsnuCheck out{std::move(res), std::move(rn), {}, {}};
    out.residual_stats = band_stats(out.residual, bundle.band);
    out.radial_stats = band_stats(out.radial_norm, bundle.band);
    return out;
}

}  // namespace geoflow
