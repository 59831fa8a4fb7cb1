#include <cmath>
#include <random>

#include "doctest.h"
#include "wavemap/error.hpp"
#include "wavemap/geometry.hpp"

using namespace wavemap;

namespace {

void check_vec(const Vec& a, const Vec& b, double tol = 1e-15) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

TEST_CASE("tangent and normal projections on S^2") {
    auto M = Manifold::sphere(3);
    check_vec(M.tangent_project({0, 0, 1}, {1, 2, 3}), {1, 2, 0});
    check_vec(M.tangent_project({1, 0, 0}, {1, 0, 0}), {0, 0, 0});
    double r = 1 / std::sqrt(2.0);
    check_vec(M.tangent_project({r, r, 0}, {1, 0, 0}), {0.5, -0.5, 0}, 1e-15);
    check_vec(M.normal_project({0, 0, 1}, {1, 2, 3}), {0, 0, 3});
    check_vec(M.normal_project({1, 0, 0}, {0, 1, 0}), {0, 0, 0});
    check_vec(M.normal_project({0, 1, 0}, {2, 2, 0}), {0, 2, 0});
    CHECK_THROWS_AS(M.tangent_project({0.1, 0, 0}, {1, 0, 0}), Error);
}

TEST_CASE("nearest point") {
    auto M = Manifold::sphere(3);
    M.tubular_radius_eps0 = 4.5;
    check_vec(M.nearest_point({0, 0, 2}), {0, 0, 1});
    check_vec(M.nearest_point({0.6, 0.8, 0}), {0.6, 0.8, 0});
    check_vec(M.nearest_point({3, 4, 0}), {0.6, 0.8, 0});
    auto S = Manifold::sphere(3);
    try {
        S.nearest_point(Vec{0, 0, 2});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.status() == Status::DistanceExceeded);
    }
    CHECK_THROWS_AS(S.nearest_point(Vec{0, 0.4, 0}), Error);
}

TEST_CASE("christoffel form and forcing projection") {
    auto M = Manifold::sphere(3);
    check_vec(M.christoffel_form({0, 0, 1}, {1, 0, 0}, {1, 0, 0}), {0, 0, -1});
    check_vec(M.christoffel_form({0, 0, 1}, {1, 0, 0}, {0, 1, 0}), {0, 0, 0});
    check_vec(M.christoffel_form({1, 0, 0}, {0, 1, 0}, {0, 1, 0}), {-1, 0, 0});
    check_vec(M.forcing_project({0, 0, 1}, {0, 0, 5}), {0, 0, 0});
    check_vec(M.forcing_project({0, 0, 1}, {1, 1, 0}), {1, 1, 0});
    check_vec(M.forcing_project({1, 0, 0}, {1, 1, 1}), {0, 1, 1});
}

TEST_CASE("projection properties on random samples") {
    auto M = Manifold::sphere(4);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int it = 0; it < 500; ++it) {
        Vec q(4), v(4), X(4), Y(4);
        for (auto* w : {&q, &v, &X, &Y})
            for (auto& x : *w) x = g(rng);
        double r = std::sqrt(dot(q, q));
        for (auto& x : q) x = x / r * (1.0 + 0.4 * (g(rng) > 0 ? 0.5 : -0.5));
        auto p = M.nearest_point(q);
        CHECK(std::abs(std::sqrt(dot(p, p)) - 1.0) <= 1e-14);
        check_vec(M.nearest_point(p), p, 1e-15);
        auto t = M.tangent_project(p, v);
        auto nn = M.normal_project(p, v);
        CHECK(std::abs(dot(t, nn)) <= 1e-13);
        CHECK(std::abs(dot(t, p)) <= 1e-14);
        check_vec(M.tangent_project(p, t), t, 1e-14);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(t[i] + nn[i] - v[i]) <= 1e-14);
        // self-adjoint: <P v, w> = <v, P w>
        CHECK(std::abs(dot(M.tangent_project(p, v), X) - dot(v, M.tangent_project(p, X))) <= 1e-13);
        auto Xt = M.tangent_project(p, X), Yt = M.tangent_project(p, Y);
        auto G = M.christoffel_form(p, Xt, Yt);
        CHECK(std::abs(dot(M.tangent_project(p, G), M.tangent_project(p, G))) <= 1e-26);
    }
}

TEST_CASE("extended coefficients") {
    auto M = Manifold::sphere(3);
    auto ec = measure_extension_constants(M, 0.1, 20000);
    CHECK(ec.sup_gamma <= M.sup_bound_gamma + 1e-12);
    CHECK(ec.lipschitz <= M.lipschitz_bound_L);
    Vec zero(3, 0.0), X{1, 0, 0}, out(3);
    M.gamma_ext(zero.data(), X.data(), X.data(), out.data());
    CHECK(out == Vec{0, 0, 0});
    Vec far{2, 0, 0};
    M.forcing_ext(far.data(), X.data(), out.data());
    CHECK(out == Vec{0, 0, 0});
    Vec near{0, 0, 1.1};
    M.gamma_ext(near.data(), X.data(), X.data(), out.data());
    check_vec(out, {0, 0, -1});
}

TEST_CASE("compatibility") {
    auto M = Manifold::sphere(3);
    auto d = sample_line(0, 0.1, -10, 20, 3, [](double, double* o) { o[0] = 0; o[1] = 0; o[2] = 1; },
                         [](double, double* o) { o[0] = 1; o[1] = 0; o[2] = 0; });
    auto r = check_compatibility(M, d, 1e-12);
    CHECK(r.max_defect == 0.0);
    CHECK(r.ok);
    auto e = sample_line(0, 0.1, -10, 20, 3, [](double, double* o) { o[0] = 0; o[1] = 0; o[2] = 1; },
                         [](double, double* o) { o[0] = 0; o[1] = 0; o[2] = 1; });
    CHECK(check_compatibility(M, e, 1e-12).max_defect == doctest::Approx(1.0));
    CHECK_FALSE(check_compatibility(M, e, 1e-12).ok);
    // great circle with the tangent frame evaluated at the cell midpoints
    const double h = 0.05;
    LineData g = LineData::zeros(0, h, -40, 80, 3);
    for (int k = 0; k <= g.N; ++k) {
        double x = g.x(k);
        g.u_at(k)[0] = std::cos(x);
        g.u_at(k)[1] = std::sin(x);
    }
    for (int k = 0; k < g.N; ++k) {
        double x = 0.5 * (g.x(k) + g.x(k + 1));
        g.v_at(k)[0] = -std::sin(x);
        g.v_at(k)[1] = std::cos(x);
    }
    CHECK(check_compatibility(M, g, 1e-14).max_defect <= 1e-14);
}

TEST_CASE("bump function") {
    CHECK(bump_cdf(-1) == 0.0);
    CHECK(bump_cdf(1) == 1.0);
    CHECK(bump_cdf(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(bump(0.99) > 0.0);
    CHECK(bump(1.0) == 0.0);
}

TEST_CASE("smooth approximation") {
    auto M = Manifold::sphere(3);
    const double h = 1.0 / 32;
    auto c = sample_line(0, h, -96, 192, 3, [](double, double* o) { o[0] = 0; o[1] = 0.6; o[2] = 0.8; },
                         [](double, double* o) { o[0] = o[1] = o[2] = 0; });
    auto cs = smooth_approximate(M, c, 2);
    for (std::size_t i = 0; i < c.u.size(); ++i) CHECK(std::abs(cs.u[i] - c.u[i]) <= 1e-14);
    for (double x : cs.v) CHECK(x == 0.0);

    auto gc = sample_line(0, h, -384, 768, 3, [](double x, double* o) { o[0] = std::cos(x); o[1] = std::sin(x); o[2] = 0; },
                          [](double, double* o) { o[0] = o[1] = o[2] = 0; });
    auto gs = smooth_approximate(M, gc, 10);
    double dist = 0.0;
    for (int k = 0; k <= gs.N; ++k) {
        double s = 0;
        for (int i = 0; i < 3; ++i) s += std::pow(gs.u_at(k)[i] - gc.u_at(k)[i], 2);
        if (std::abs(gs.x(k)) <= 9.0) dist = std::max(dist, std::sqrt(s));
        CHECK(M.distance(gs.u_at(k)) <= 1e-14);
    }
    CHECK(dist <= M.tubular_radius_eps0 / 3);

    auto vm = sample_line(0, h, -96, 192, 3, [](double, double* o) { o[0] = 0; o[1] = 0; o[2] = 1; },
                          [](double x, double* o) { o[0] = std::abs(x) < 1 ? 0.5 : 0.0; o[1] = o[2] = 0; });
    auto vs = smooth_approximate(M, vm, 2);
    CHECK(l1_norm_v(vs) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_compatibility(M, vs, 1e-15).max_defect <= 1e-15);
}

TEST_CASE("smooth approximation converges as k grows") {
    auto M = Manifold::sphere(3);
    const double h = 1.0 / 64;
    auto d = sample_line(0, h, -640, 1280, 3,
                         [](double x, double* o) {
                             double a = 0.8 * std::atan(x);
                             o[0] = std::cos(a); o[1] = std::sin(a); o[2] = 0;
                         },
                         [](double x, double* o) {
                             double a = 0.8 * std::atan(x);
                             double s = 0.3 * std::exp(-x * x / 8);
                             o[0] = -s * std::sin(a); o[1] = s * std::cos(a); o[2] = 0;
                         });
    double prev = 1e300;
    for (int k : {2, 4, 8}) {
        auto s = smooth_approximate(M, d, k);
        double err = 0.0, dv = 0.0;
        for (int j = 0; j <= d.N; ++j)
            for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(s.u_at(j)[i] - d.u_at(j)[i]));
        for (std::size_t i = 0; i < d.v.size(); ++i) dv += std::abs(s.v[i] - d.v[i]) * h;
        double total = err + dv;
        CHECK(total < prev);
        prev = total;
    }
}
