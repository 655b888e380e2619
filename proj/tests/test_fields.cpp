#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "geoflow/grid.hpp"
#include "geoflow/stencils.hpp"

using namespace geoflow;

namespace {

bool interior(const GridSpec& s, int i, int j, int k, int halo = 1) {
    return i >= halo && j >= halo && k >= halo && i < s.dims[0] - halo && j < s.dims[1] - halo &&
           k < s.dims[2] - halo;
}

template <typename F>
double max_interior_error(const GridSpec& s, F&& err, int halo = 1) {
    double m = 0.0;
    for (int k = 0; k < s.dims[2]; ++k)
        for (int j = 0; j < s.dims[1]; ++j)
            for (int i = 0; i < s.dims[0]; ++i)
                if (interior(s, i, j, k, halo)) m = std::max(m, err(i, j, k));
    return m;
}

}  // namespace

TEST_CASE("gradient of a constant vanishes") {
    GridSpec spec = make_cube_grid(16, 1.0);
    ScalarField3 f = sample_scalar(spec, [](const Vec3&) { return 4.2; });
    VectorField3 g = gradient(f);
    double m = 0.0;
    for (double v : g.data) m = std::max(m, std::abs(v));
    REQUIRE(m < 1e-12);
}

TEST_CASE("gradient is exact for linear fields") {
    GridSpec spec = make_cube_grid(16, 1.0);
    ScalarField3 f = sample_scalar(spec, [](const Vec3& p) {
        return 2.0 * p.x + 3.0 * p.y - p.z;
    });
    VectorField3 g = gradient(f);
    double m = max_interior_error(spec, [&](int i, int j, int k) {
        Vec3 v = g.get(spec.index(i, j, k));
        return std::max({std::abs(v.x - 2.0), std::abs(v.y - 3.0), std::abs(v.z + 1.0)});
    });
    REQUIRE(m < 1e-12);
}

TEST_CASE("gradient of x^2 at x = 0.3 on an h = 0.05 grid") {
    GridSpec spec({16, 16, 16}, {0.0, 0.0, 0.0}, 0.05);
    ScalarField3 f = sample_scalar(spec, [](const Vec3& p) { return p.x * p.x; });
    VectorField3 g = gradient(f);
    // x = 0.3 is the i = 6 grid line; central differences are exact for quadratics
    Vec3 v = g.get(spec.index(6, 7, 7));
    REQUIRE(std::abs(v.x - 0.6) < 1e-10);
}

TEST_CASE("hessian of a linear field vanishes") {
    GridSpec spec = make_cube_grid(12, 1.0);
    ScalarField3 f = sample_scalar(spec, [](const Vec3& p) { return p.x - 2.0 * p.z; });
    MatrixField3 h = hessian(f);
    double m = 0.0;
    for (double v : h.data) m = std::max(m, std::abs(v));
    REQUIRE(m < 1e-10);
}

TEST_CASE("hessian mixed entry of f = xy") {
    GridSpec spec = make_cube_grid(16, 1.0);
    ScalarField3 f = sample_scalar(spec, [](const Vec3& p) { return p.x * p.y; });
    MatrixField3 h = hessian(f);
    double m = max_interior_error(spec, [&](int i, int j, int k) {
        return std::abs(h.get(spec.index(i, j, k))(0, 1) - 1.0);
    });
    REQUIRE(m < 1e-10);
}

TEST_CASE("hessian is symmetric to rounding") {
    GridSpec spec = make_cube_grid(16, 1.0);
    ScalarField3 f = sample_scalar(spec, [](const Vec3& p) {
        return std::sin(p.x) * std::cos(2.0 * p.y) + std::exp(0.3 * p.z) * p.x;
    });
    MatrixField3 h = hessian(f);
    double m = 0.0;
    for (std::size_t idx = 0; idx < spec.num_points(); ++idx) {
        Mat3 a = h.get(idx);
        m = std::max(m, max_abs_entry(a - a.transpose()));
    }
    REQUIRE(m < 1e-12);
}

TEST_CASE("divergence examples") {
    GridSpec spec = make_cube_grid(16, 1.0);
    SECTION("identity field gives 3") {
        VectorField3 v = sample_vector(spec, [](const Vec3& p) { return p; });
        ScalarField3 d = divergence(v);
        double m = max_interior_error(spec, [&](int i, int j, int k) {
            return std::abs(d.at(i, j, k) - 3.0);
        });
        REQUIRE(m < 1e-10);
    }
    SECTION("constant field gives 0") {
        VectorField3 v = sample_vector(spec, [](const Vec3&) { return Vec3{1.0, -2.0, 0.5}; });
        ScalarField3 d = divergence(v);
        double m = 0.0;
        for (double x : d.data) m = std::max(m, std::abs(x));
        REQUIRE(m < 1e-12);
    }
    SECTION("v = (x^2, 0, 0) gives 2x") {
        VectorField3 v = sample_vector(spec, [](const Vec3& p) {
            return Vec3{p.x * p.x, 0.0, 0.0};
        });
        ScalarField3 d = divergence(v);
        double m = max_interior_error(spec, [&](int i, int j, int k) {
            return std::abs(d.at(i, j, k) - 2.0 * spec.point(i, j, k).x);
        });
        REQUIRE(m < 1e-10);
    }
}

TEST_CASE("vector gradient of a linear map recovers the matrix") {
    GridSpec spec = make_cube_grid(12, 1.0);
    Mat3 A;
    A(0, 0) = 1.0; A(0, 1) = 2.0; A(0, 2) = -1.0;
    A(1, 0) = 0.5; A(1, 1) = -3.0; A(1, 2) = 0.0;
    A(2, 0) = 2.0; A(2, 1) = 1.0; A(2, 2) = 4.0;
    VectorField3 v = sample_vector(spec, [&](const Vec3& p) { return A.mul(p); });
    MatrixField3 g = vector_gradient(v);
    double m = 0.0;
    for (std::size_t idx = 0; idx < spec.num_points(); ++idx)
        m = std::max(m, max_abs_entry(g.get(idx) - A));
    REQUIRE(m < 1e-11);
}

TEST_CASE("trace of the vector gradient equals the divergence") {
    GridSpec spec = make_cube_grid(14, 1.0);
    VectorField3 v = sample_vector(spec, [](const Vec3& p) {
        return Vec3{std::sin(p.x * p.y), p.z * p.z, std::cos(p.x + p.z)};
    });
    MatrixField3 g = vector_gradient(v);
    ScalarField3 d = divergence(v);
    double m = 0.0;
    for (std::size_t idx = 0; idx < spec.num_points(); ++idx)
        m = std::max(m, std::abs(trace(g.get(idx)) - d.data[idx]));
    REQUIRE(m < 1e-12);
}

TEST_CASE("vector gradient of the sphere normal matches (I - rhat rhat)/r") {
    GridSpec spec = make_cube_grid(48, 1.0);
    VectorField3 n = sample_vector(spec, [](const Vec3& p) {
        double r = norm(p);
        return r > 1e-12 ? p / r : Vec3{};
    });
    MatrixField3 g = vector_gradient(n);
    // compare on points well away from both the singular center and the box
    double worst = 0.0;
    for (int k = 8; k < spec.dims[2] - 8; k += 3)
        for (int j = 8; j < spec.dims[1] - 8; j += 3)
            for (int i = 8; i < spec.dims[0] - 8; i += 3) {
                Vec3 p = spec.point(i, j, k);
                double r = norm(p);
                if (r < 0.4) continue;
                Vec3 rhat = p / r;
                Mat3 expected = (Mat3::identity() - outer(rhat, rhat)) * (1.0 / r);
                worst = std::max(worst, max_abs_entry(g.get(spec.index(i, j, k)) - expected));
            }
    REQUIRE(worst < 60.0 * spec.h * spec.h);  // O(h^2); C from the r^-3 third derivatives
}

TEST_CASE("gradient error is second order in h") {
    auto run = [](int n) {
        GridSpec spec = make_cube_grid(n, 1.0);
        ScalarField3 f = sample_scalar(spec, [](const Vec3& p) {
            return std::sin(std::numbers::pi * p.x) * std::cos(std::numbers::pi * p.y);
        });
        VectorField3 g = gradient(f);
        double m = 0.0;
        for (int k = 0; k < spec.dims[2]; ++k)
            for (int j = 0; j < spec.dims[1]; ++j)
                for (int i = 0; i < spec.dims[0]; ++i) {
                    Vec3 p = spec.point(i, j, k);
                    Vec3 exact{std::numbers::pi * std::cos(std::numbers::pi * p.x) *
                                   std::cos(std::numbers::pi * p.y),
                               -std::numbers::pi * std::sin(std::numbers::pi * p.x) *
                                   std::sin(std::numbers::pi * p.y),
                               0.0};
                    Vec3 v = g.get(spec.index(i, j, k));
                    m = std::max(m, norm(v - exact));
                }
        return m;
    };
    double e1 = run(33);
    double e2 = run(65);  // halves h on the same box
    double ratio = e1 / e2;
    REQUIRE(ratio > 3.5);
    REQUIRE(ratio < 4.5);
}

TEST_CASE("stencils are linear operators") {
    GridSpec spec = make_cube_grid(12, 1.0);
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField3 f(spec), g(spec);
    for (std::size_t i = 0; i < spec.num_points(); ++i) {
        f.data[i] = dist(rng);
        g.data[i] = dist(rng);
    }
    const double a = 1.7, b = -0.4;
    ScalarField3 combo = map_points(spec, [&](std::size_t i) {
        return a * f.data[i] + b * g.data[i];
    });
    VectorField3 gc = gradient(combo), gfv = gradient(f), ggv = gradient(g);
    double m = 0.0;
    for (std::size_t i = 0; i < gc.data.size(); ++i)
        m = std::max(m, std::abs(gc.data[i] - (a * gfv.data[i] + b * ggv.data[i])));
    // random data has O(1/h) derivatives; rounding scales with that
    REQUIRE(m < 1e-11 / spec.h);
}
