#pragma once

#include <cstdint>
#include <utility>

#include "geoflow/errors.hpp"
#include "geoflow/stencils.hpp"

namespace geoflow {

/// Gradient-degeneracy floor: far below any legitimate |grad phi| on a
/// redistanced field.
inline constexpr double kGradMin = 1e-6;

/// Tolerance for certifying |grad phi| = 1 on the band.
inline constexpr double kDistTol = 0.05;

/// Scalar field whose zero isosurface is the tracked surface; negative inside.
struct LevelSet {
    ScalarField3 phi;
    bool is_distance = false;
    double band_width = 0.0;  // trusted distance from {phi = 0}

    const GridSpec& spec() const { return phi.spec; }
};

/// Band membership for one point, from |phi| and |grad phi|: first-order
/// distance estimate |phi| / |grad phi| <= band_width.
inline bool in_band_point(double phi, double ngp, double band_width) {
    return std::abs(phi) <= band_width * std::max(ngp, kGradMin);
}

/// 1 = within band_width of the interface (estimated via |phi|/|grad phi|).
inline std::vector<std::uint8_t> band_mask(const ScalarField3& phi, const ScalarField3& ngp,
                                           double band_width) {
    std::vector<std::uint8_t> mask(phi.spec.num_points(), 0);
    parallel_for(mask.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx)
            mask[idx] = in_band_point(phi.data[idx], ngp.data[idx], band_width) ? 1 : 0;
    });
    return mask;
}

/// Validates and wraps a level-set field. Checks the gradient floor on the
/// band, and the |grad phi| = 1 certificate when is_distance is requested.
inline LevelSet make_level_set(ScalarField3 phi, double band_width, bool is_distance = false) {
    if (!(band_width > 0.0)) throw std::invalid_argument("LevelSet: band_width must be positive");
    if (!all_finite(phi)) throw std::invalid_argument("LevelSet: phi must be finite");

    VectorField3 g = gradient(phi);
    const std::size_t n = phi.spec.num_points();
    ScalarField3 ngp(phi.spec);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) ngp.data[idx] = norm(g.get(idx));
    });

    double worst = reduce_max(phi.spec, [&](std::size_t idx) {
        if (!in_band_point(phi.data[idx], ngp.data[idx], band_width)) return -1.0;
        return ngp.data[idx] < kGradMin ? 1.0 : -1.0;
    });
    if (worst > 0.0)
        throw DegenerateGradient("level set has |grad phi| < g_min inside the band; redistance");

    if (is_distance) {
        double dev = reduce_max(phi.spec, [&](std::size_t idx) {
            if (!in_band_point(phi.data[idx], ngp.data[idx], band_width)) return 0.0;
            return std::abs(ngp.data[idx] - 1.0);
        });
        if (dev > kDistTol)
            throw std::invalid_argument(
                "LevelSet: is_distance requested but max band ||grad phi|-1| = " +
                std::to_string(dev) + " exceeds dist_tol");
    }
    return LevelSet{std::move(phi), is_distance, band_width};
}

}  // namespace geoflow
