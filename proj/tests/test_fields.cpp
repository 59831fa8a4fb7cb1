#include <cmath>

#include "doctest.h"
#include "wavemap/error.hpp"
#include "wavemap/fields.hpp"
#include "wavemap/linear_wave.hpp"

using namespace wavemap;

namespace {

LineData line(const NullLattice& L, int n, LineFn u, LineFn v) { return sample_line(L, n, u, v); }

} // namespace

TEST_CASE("l1 norm of constant and linear fields") {
    auto L = lattice_for(Trapezoid::compact(1, 1, 1), 1.0 / 8);
    auto f = sample_field(L, 2, [](double, double, double* o) { o[0] = 1; o[1] = -1; });
    CHECK(l1_norm(f) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(l1_norm(Field::zeros(L, 2)) == 0.0);
    auto T = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 16);
    auto g = sample_field(T, 1, [](double t, double, double* o) { o[0] = t; });
    CHECK(l1_norm(g) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("l1 norm over aligned sub-regions is additive and monotone") {
    auto L = lattice_for(Trapezoid::compact(0, 2, 2), 1.0 / 8);
    auto f = sample_field(L, 1, [](double t, double x, double* o) { o[0] = std::sin(3 * x) + t; });
    double whole = l1_norm(f);
    CHECK(l1_norm(f, L.trapezoid()) == doctest::Approx(whole).epsilon(1e-14));
    double left = l1_norm(f, Trapezoid::compact(-1, 1, 1));
    double right = l1_norm(f, Trapezoid::compact(1, 1, 1));
    double big = l1_norm(f, Trapezoid::compact(0, 2, 1));
    CHECK(left + right <= big + 1e-14);
    CHECK(big <= whole + 1e-14);
    CHECK_THROWS_AS(l1_norm(f, Trapezoid::compact(0.01, 1, 1)), Error);
}

TEST_CASE("w11 seminorm") {
    auto a = sample_line(0, 1.0 / 16, 0, 16, 1, [](double x, double* o) { o[0] = x; }, [](double, double* o) { o[0] = 0; });
    CHECK(w11_seminorm(a) == doctest::Approx(1.0));
    auto b = sample_line(0, 1.0 / 16, 0, 16, 1, [](double, double* o) { o[0] = 3; }, [](double, double* o) { o[0] = 0; });
    CHECK(w11_seminorm(b) == 0.0);
    auto c = sample_line(0, 1.0 / 16, -16, 32, 1, [](double x, double* o) { o[0] = std::abs(x); }, [](double, double* o) { o[0] = 0; });
    CHECK(w11_seminorm(c) == doctest::Approx(2.0));
}

TEST_CASE("characteristic derivatives") {
    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 16);
    auto zero = Field::zeros(L, 1);
    auto d1 = line(L, 1, [](double x, double* o) { o[0] = x; }, [](double, double* o) { o[0] = 0; });
    auto [p1, m1] = characteristic_derivatives(d1, zero);
    for (int c = 0; c < L.num_cells(); ++c) {
        double a[1], b[1];
        p1.eval(c, 0.3 * L.h, 0.2 * L.h, a);
        m1.eval(c, 0.3 * L.h, 0.2 * L.h, b);
        CHECK(a[0] == doctest::Approx(-1.0));
        CHECK(b[0] == doctest::Approx(1.0));
    }
    auto d2 = line(L, 1, [](double, double* o) { o[0] = 0; }, [](double, double* o) { o[0] = 1; });
    auto [p2, m2] = characteristic_derivatives(d2, zero);
    auto d3 = line(L, 1, [](double, double* o) { o[0] = 0; }, [](double, double* o) { o[0] = 0; });
    auto one = sample_field(L, 1, [](double, double, double* o) { o[0] = 1; });
    auto [p3, m3] = characteristic_derivatives(d3, one);
    for (int d = 0; d <= L.D; ++d)
        for (int j = 0; j < L.cells_on(d); ++j) {
            int c = L.cell(d, j);
            double ca, cb, t, x, a[1], b[1];
            L.centroid(d, ca, cb);
            L.point(d, j, ca, cb, t, x);
            p2.eval(c, ca, cb, a);
            m2.eval(c, ca, cb, b);
            CHECK(a[0] == 1.0);
            CHECK(b[0] == 1.0);
            p3.eval(c, ca, cb, a);
            m3.eval(c, ca, cb, b);
            CHECK(a[0] == doctest::Approx(t).epsilon(1e-13));
            CHECK(b[0] == doctest::Approx(t).epsilon(1e-13));
        }
}

TEST_CASE("characteristic derivatives agree with finite differences of u") {
    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 64);
    auto d = line(L, 1, [](double x, double* o) { o[0] = std::sin(2 * x); }, [](double x, double* o) { o[0] = std::cos(x); });
    auto hf = sample_field(L, 1, [](double t, double x, double* o) { o[0] = x * t; });
    auto s = dalembert_solve(d, hf);
    double worst = 0.0;
    for (int dd = 2; dd + 2 <= L.Dn; dd += 2)
        for (int j = 1; j + 1 < L.nodes_on(dd); ++j) {
            // d_t u at a node from neighbouring even-diagonal nodes: (i+1,j+... )
            double up = s.node(dd + 2, j - 1)[0], dn = s.node(dd - 2, j + 1)[0];
            double ut_fd = (up - dn) / (2 * L.h);
            double ux_fd = (s.node(dd, j + 1)[0] - s.node(dd, j - 1)[0]) / (2 * L.h);
            int c = L.cell(dd, j);
            double p[1], m[1];
            s.vp.eval(c, 0, 0, p);
            s.vm.eval(c, 0, 0, m);
            worst = std::max(worst, std::abs(0.5 * (p[0] + m[0]) - ut_fd));
            worst = std::max(worst, std::abs(0.5 * (m[0] - p[0]) - ux_fd));
        }
    CHECK(worst < 5 * L.h);
}

TEST_CASE("trace and h-norm") {
    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 16);
    auto zero = Field::zeros(L, 3);
    auto c = line(L, 3, [](double, double* o) { o[0] = 0.6; o[1] = -0.8; o[2] = 0; }, [](double, double* o) { o[0] = o[1] = o[2] = 0; });
    auto sc = dalembert_solve(c, zero);
    CHECK(h_norm(sc) == doctest::Approx(1.4));
    auto tr0 = trace(sc, 0);
    CHECK(tr0.data.u == c.u);
    CHECK(tr0.data.v == c.v);
    auto tr = trace(sc, 4);
    CHECK(tr.t == 0.25);
    for (int k = 0; k <= tr.data.N; ++k) CHECK(tr.data.u_at(k)[0] == doctest::Approx(0.6));
    CHECK_THROWS_AS(trace(sc, 20), Error);
    auto z = dalembert_solve(line(L, 3, [](double, double* o) { o[0] = o[1] = o[2] = 0; }, [](double, double* o) { o[0] = o[1] = o[2] = 0; }), zero);
    CHECK(h_norm(z) == 0.0);
    // scalar travelling wave x - t on [-1, 1]
    auto w = dalembert_solve(line(L, 1, [](double x, double* o) { o[0] = x; }, [](double, double* o) { o[0] = -1; }), Field::zeros(L, 1));
    CHECK(h_norm(w) == doctest::Approx(5.0));
    // trace contraction
    for (int m = 0; 2 * m <= L.D; ++m) {
        auto t = trace(w, m);
        double n = sup_norm(t.data) + w11_seminorm(t.data) + l1_norm_v(t.data);
        CHECK(n <= h_norm(w) + 1e-12);
    }
}

TEST_CASE("abs linear integral") {
    CHECK(abs_linear_integral(1, -2, 1) == doctest::Approx(0.5));
    CHECK(abs_linear_integral(-1, 0, 2) == doctest::Approx(2));
    CHECK(abs_linear_integral(0, 1, 2) == doctest::Approx(2));
}
