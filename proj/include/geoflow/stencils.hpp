#pragma once

#include "geoflow/grid.hpp"

namespace geoflow {

namespace detail {

/// d/dx_axis of src into dst: second-order central in the interior,
/// second-order one-sided at the two box faces of that axis.
inline void axis_derivative(const GridSpec& spec, const double* src, double* dst, int axis) {
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    const int n = spec.dims[axis];
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(spec.stride(axis));
    const double inv2h = 1.0 / (2.0 * spec.h);

    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k)
            for (int j = 0; j < ny; ++j) {
                std::size_t row = spec.index(0, j, static_cast<int>(k));
                for (int i = 0; i < nx; ++i) {
                    std::size_t c = row + i;
                    int m = (axis == 0) ? i : (axis == 1) ? j : static_cast<int>(k);
                    double v;
                    if (m == 0)
                        v = (-3.0 * src[c] + 4.0 * src[c + s] - src[c + 2 * s]) * inv2h;
                    else if (m == n - 1)
                        v = (3.0 * src[c] - 4.0 * src[c - s] + src[c - 2 * s]) * inv2h;
                    else
                        v = (src[c + s] - src[c - s]) * inv2h;
                    dst[c] = v;
                }
            }
    });
}

/// d2/dx_axis^2, 3-point interior, 4-point one-sided at faces.
inline void axis_second_derivative(const GridSpec& spec, const double* src, double* dst, int axis) {
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    const int n = spec.dims[axis];
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(spec.stride(axis));
    const double invh2 = 1.0 / (spec.h * spec.h);

    parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k)
            for (int j = 0; j < ny; ++j) {
                std::size_t row = spec.index(0, j, static_cast<int>(k));
                for (int i = 0; i < nx; ++i) {
                    std::size_t c = row + i;
                    int m = (axis == 0) ? i : (axis == 1) ? j : static_cast<int>(k);
                    double v;
                    if (m == 0)
                        v = (2.0 * src[c] - 5.0 * src[c + s] + 4.0 * src[c + 2 * s] -
                             src[c + 3 * s]) * invh2;
                    else if (m == n - 1)
                        v = (2.0 * src[c] - 5.0 * src[c - s] + 4.0 * src[c - 2 * s] -
                             src[c - 3 * s]) * invh2;
                    else
                        v = (src[c + s] - 2.0 * src[c] + src[c - s]) * invh2;
                    dst[c] = v;
                }
            }
    });
}

}  // namespace detail

/// Scalar derivative along one axis (exposed for the transport schemes).
inline ScalarField3 derivative(const ScalarField3& f, int axis) {
    ScalarField3 out(f.spec);
    detail::axis_derivative(f.spec, f.data.data(), out.data.data(), axis);
    return out;
}

inline VectorField3 gradient(const ScalarField3& f) {
    VectorField3 out(f.spec);
    ScalarField3 tmp(f.spec);
    for (int axis = 0; axis < 3; ++axis) {
        detail::axis_derivative(f.spec, f.data.data(), tmp.data.data(), axis);
        parallel_for(f.spec.num_points(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) out.data[3 * idx + axis] = tmp.data[idx];
        });
    }
    return out;
}

/// Symmetric Hessian: diagonal entries from 3-point second-derivative
/// stencils, mixed entries by composing first-derivative stencils (the
/// interior reduces to the 4-point cross); H(b,a) mirrors H(a,b).
inline MatrixField3 hessian(const ScalarField3& f) {
    MatrixField3 out(f.spec);
    const std::size_t n = f.spec.num_points();
    ScalarField3 tmp(f.spec), tmp2(f.spec);
    for (int a = 0; a < 3; ++a) {
        detail::axis_second_derivative(f.spec, f.data.data(), tmp.data.data(), a);
        parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) out.data[9 * idx + 3 * a + a] = tmp.data[idx];
        });
    }
    for (int a = 0; a < 3; ++a) {
        detail::axis_derivative(f.spec, f.data.data(), tmp.data.data(), a);
        for (int b = a + 1; b < 3; ++b) {
            detail::axis_derivative(f.spec, tmp.data.data(), tmp2.data.data(), b);
            parallel_for(n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t idx = lo; idx < hi; ++idx) {
                    double v = tmp2.data[idx];
                    out.data[9 * idx + 3 * a + b] = v;
                    out.data[9 * idx + 3 * b + a] = v;
                }
            });
        }
    }
    return out;
}

inline ScalarField3 divergence(const VectorField3& v) {
    ScalarField3 out(v.spec);
    const std::size_t n = v.spec.num_points();
    ScalarField3 comp(v.spec), tmp(v.spec);
    for (int axis = 0; axis < 3; ++axis) {
        parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) comp.data[idx] = v.data[3 * idx + axis];
        });
        detail::axis_derivative(v.spec, comp.data.data(), tmp.data.data(), axis);
        parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) out.data[idx] += tmp.data[idx];
        });
    }
    return out;
}

/// Full gradient of a vector field: row i holds the gradient of component i,
/// i.e. out(i,j) = d v_i / d x_j.
inline MatrixField3 vector_gradient(const VectorField3& v) {
    MatrixField3 out(v.spec);
    const std::size_t n = v.spec.num_points();
    ScalarField3 comp(v.spec), tmp(v.spec);
    for (int i = 0; i < 3; ++i) {
        parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) comp.data[idx] = v.data[3 * idx + i];
        });
        for (int j = 0; j < 3; ++j) {
            detail::axis_derivative(v.spec, comp.data.data(), tmp.data.data(), j);
            parallel_for(n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t idx = lo; idx < hi; ++idx)
                    out.data[9 * idx + 3 * i + j] = tmp.data[idx];
            });
        }
    }
    return out;
}

/// Row-wise divergence of a matrix field: out_i = sum_j d M(i,j) / d x_j.
inline VectorField3 matrix_divergence(const MatrixField3& M) {
    VectorField3 out(M.spec);
    const std::size_t n = M.spec.num_points();
    ScalarField3 comp(M.spec), tmp(M.spec);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            parallel_for(n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t idx = lo; idx < hi; ++idx)
                    comp.data[idx] = M.data[9 * idx + 3 * i + j];
            });
            detail::axis_derivative(M.spec, comp.data.data(), tmp.data.data(), j);
            parallel_for(n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t idx = lo; idx < hi; ++idx) out.data[3 * idx + i] += tmp.data[idx];
            });
        }
    return out;
}

}  // namespace geoflow
