#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "geoflow/core.hpp"
#include "geoflow/parallel.hpp"

namespace geoflow {

/// Uniform cartesian box: dims points per axis, one spacing h for all axes.
struct GridSpec {
    std::array<int, 3> dims{};
    Vec3 origin{};
    double h = 0.0;

    GridSpec() = default;
    GridSpec(std::array<int, 3> dims_, Vec3 origin_, double h_)
        : dims(dims_), origin(origin_), h(h_) {
        for (int d = 0; d < 3; ++d)
            if (dims[d] < 8) throw std::invalid_argument("GridSpec: dims must be >= 8 per axis");
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("GridSpec: spacing must be positive and finite");
        if (!std::isfinite(origin.x) || !std::isfinite(origin.y) || !std::isfinite(origin.z))
            throw std::invalid_argument("GridSpec: origin must be finite");
    }

    std::size_t num_points() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    // x-fastest linear layout
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                    static_cast<std::size_t>(dims[1]) * k);
    }

    std::array<int, 3> unpack(std::size_t idx) const {
        int i = static_cast<int>(idx % dims[0]);
        std::size_t r = idx / dims[0];
        int j = static_cast<int>(r % dims[1]);
        int k = static_cast<int>(r / dims[1]);
        return {i, j, k};
    }

    Vec3 point(int i, int j, int k) const {
        return {origin.x + h * i, origin.y + h * j, origin.z + h * k};
    }

    Vec3 box_max() const {
        return {origin.x + h * (dims[0] - 1), origin.y + h * (dims[1] - 1),
                origin.z + h * (dims[2] - 1)};
    }

    std::size_t stride(int axis) const {
        if (axis == 0) return 1;
        if (axis == 1) return static_cast<std::size_t>(dims[0]);
        return static_cast<std::size_t>(dims[0]) * dims[1];
    }

    bool operator==(const GridSpec& o) const {
        return dims == o.dims && h == o.h && origin.x == o.origin.x && origin.y == o.origin.y &&
               origin.z == o.origin.z;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

/// Symmetric cube [-half, half]^3 with n points per axis.
inline GridSpec make_cube_grid(int n, double half_width) {
    double h = 2.0 * half_width / (n - 1);
    return GridSpec({n, n, n}, {-half_width, -half_width, -half_width}, h);
}

struct ScalarField3 {
    GridSpec spec;
    std::vector<double> data;

    ScalarField3() = default;
    explicit ScalarField3(const GridSpec& s) : spec(s), data(s.num_points(), 0.0) {}

    double& operator[](std::size_t idx) { return data[idx]; }
    double operator[](std::size_t idx) const { return data[idx]; }
    double& at(int i, int j, int k) { return data[spec.index(i, j, k)]; }
    double at(int i, int j, int k) const { return data[spec.index(i, j, k)]; }
};

struct VectorField3 {
    GridSpec spec;
    std::vector<double> data;  // 3 per point

    VectorField3() = default;
    explicit VectorField3(const GridSpec& s) : spec(s), data(3 * s.num_points(), 0.0) {}

    Vec3 get(std::size_t idx) const {
        return {data[3 * idx], data[3 * idx + 1], data[3 * idx + 2]};
    }
    void set(std::size_t idx, const Vec3& v) {
        data[3 * idx] = v.x;
        data[3 * idx + 1] = v.y;
        data[3 * idx + 2] = v.z;
    }
};

struct MatrixField3 {
    GridSpec spec;
    std::vector<double> data;  // 9 per point, row-major

    MatrixField3() = default;
    explicit MatrixField3(const GridSpec& s) : spec(s), data(9 * s.num_points(), 0.0) {}

    Mat3 get(std::size_t idx) const {
        Mat3 a;
        for (int c = 0; c < 9; ++c) a.m[c] = data[9 * idx + c];
        return a;
    }
    void set(std::size_t idx, const Mat3& a) {
        for (int c = 0; c < 9; ++c) data[9 * idx + c] = a.m[c];
    }
};

template <typename Field>
bool all_finite(const Field& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Samples fn(x) at every grid point.
template <typename F>
ScalarField3 sample_scalar(const GridSpec& spec, F&& fn) {
    ScalarField3 out(spec);
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    std::size_t idx = spec.index(i, j, static_cast<int>(k));
                    out.data[idx] = fn(spec.point(i, j, static_cast<int>(k)));
                }
    });
    return out;
}

template <typename F>
VectorField3 sample_vector(const GridSpec& spec, F&& fn) {
    VectorField3 out(spec);
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    std::size_t idx = spec.index(i, j, static_cast<int>(k));
                    out.set(idx, fn(spec.point(i, j, static_cast<int>(k))));
                }
    });
    return out;
}

/// Pointwise map over one or more same-spec fields; out[i] = fn(i).
template <typename F>
ScalarField3 map_points(const GridSpec& spec, F&& fn) {
    ScalarField3 out(spec);
    parallel_for(spec.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) out.data[idx] = fn(idx);
    });
    return out;
}

/// Deterministic full-grid reduction: per-z-plane Kahan partials combined in
/// plane order, so the result does not depend on the thread count.
template <typename F>
double reduce_sum(const GridSpec& spec, F&& per_point) {
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    std::vector<double> plane(static_cast<std::size_t>(nz), 0.0);
    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            KahanSum acc;
            std::size_t base = spec.index(0, 0, static_cast<int>(k));
            for (std::size_t idx = base; idx < base + static_cast<std::size_t>(nx) * ny; ++idx)
                acc.add(per_point(idx));
            plane[k] = acc.value();
        }
    });
    KahanSum total;
    for (double p : plane) total.add(p);
    return total.value();
}

/// Deterministic max over the grid of per_point(idx).
template <typename F>
double reduce_max(const GridSpec& spec, F&& per_point) {
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    std::vector<double> plane(static_cast<std::size_t>(nz), -std::numeric_limits<double>::infinity());
    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            double m = -std::numeric_limits<double>::infinity();
            std::size_t base = spec.index(0, 0, static_cast<int>(k));
            for (std::size_t idx = base; idx < base + static_cast<std::size_t>(nx) * ny; ++idx)
                m = std::max(m, per_point(idx));
            plane[k] = m;
        }
    });
    double m = -std::numeric_limits<double>::infinity();
    for (double p : plane) m = std::max(m, p);
    return m;
}

/// Trilinear interpolation of a scalar field at an arbitrary point inside the box.
inline double interpolate(const ScalarField3& f, const Vec3& p) {
    const GridSpec& s = f.spec;
    double fx = (p.x - s.origin.x) / s.h;
    double fy = (p.y - s.origin.y) / s.h;
    double fz = (p.z - s.origin.z) / s.h;
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    int k = static_cast<int>(std::floor(fz));
    i = std::max(0, std::min(i, s.dims[0] - 2));
    j = std::max(0, std::min(j, s.dims[1] - 2));
    k = std::max(0, std::min(k, s.dims[2] - 2));
    double ax = fx - i, ay = fy - j, az = fz - k;
    double c00 = f.at(i, j, k) * (1 - ax) + f.at(i + 1, j, k) * ax;
    double c10 = f.at(i, j + 1, k) * (1 - ax) + f.at(i + 1, j + 1, k) * ax;
    double c01 = f.at(i, j, k + 1) * (1 - ax) + f.at(i + 1, j, k + 1) * ax;
    double c11 = f.at(i, j + 1, k + 1) * (1 - ax) + f.at(i + 1, j + 1, k + 1) * ax;
    double c0 = c00 * (1 - ay) + c10 * ay;
    double c1 = c01 * (1 - ay) + c11 * ay;
    return c0 * (1 - az) + c1 * az;
}

}  // namespace geoflow
