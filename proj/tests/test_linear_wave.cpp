#include <cmath>

#include "doctest.h"
#include "wavemap/error.hpp"
#include "wavemap/linear_wave.hpp"

using namespace wavemap;

namespace {

const LineFn zero1 = [](double, double* o) { o[0] = 0; };

double node_t(const NullLattice& L, int d) { return L.t_base() + 0.5 * d * L.h; }
double node_x(const NullLattice& L, int d, int j) { return L.x_base(j) + 0.5 * d * L.h; }

} // namespace

TEST_CASE("d'Alembert examples") {
    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 32);
    auto z = Field::zeros(L, 1);
    auto s1 = dalembert_solve(sample_line(L, 1, [](double x, double* o) { o[0] = x; }, zero1), z);
    auto s2 = dalembert_solve(sample_line(L, 1, zero1, [](double, double* o) { o[0] = 1; }), z);
    auto one = sample_field(L, 1, [](double, double, double* o) { o[0] = 1; });
    auto s3 = dalembert_solve(sample_line(L, 1, zero1, zero1), one);
    for (int d = 0; d <= L.Dn; ++d)
        for (int j = 0; j < L.nodes_on(d); ++j) {
            double t = node_t(L, d), x = node_x(L, d, j);
            CHECK(s1.node(d, j)[0] == doctest::Approx(x).epsilon(1e-13));
            CHECK(s2.node(d, j)[0] == doctest::Approx(t).epsilon(1e-13));
            CHECK(s3.node(d, j)[0] == doctest::Approx(0.5 * t * t).epsilon(1e-13));
        }
}

TEST_CASE("transport examples") {
    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 16);
    std::vector<double> ones(L.N, 1.0), zeros(L.N, 0.0), lin(L.N);
    for (int k = 0; k < L.N; ++k) lin[k] = 0.5 * (L.x_base(k) + L.x_base(k + 1));
    auto z = Field::zeros(L, 1);
    auto f1 = sample_field(L, 1, [](double, double, double* o) { o[0] = 1; });
    auto a = transport_solve(ones, z, Direction::Plus);
    auto b = transport_solve(zeros, f1, Direction::Plus);
    auto c = transport_solve(lin, z, Direction::Plus);
    for (int d = 0; d <= L.D; ++d)
        for (int j = 0; j < L.cells_on(d); ++j) {
            double ca, cb, t, x, v[1];
            L.centroid(d, ca, cb);
            L.point(d, j, ca, cb, t, x);
            int cell = L.cell(d, j);
            a.eval(cell, ca, cb, v);
            CHECK(v[0] == 1.0);
            b.eval(cell, ca, cb, v);
            CHECK(v[0] == doctest::Approx(t).epsilon(1e-13));
            // piecewise-constant g is exact at the base-cell midpoint of the characteristic
            c.eval(cell, 0.5 * L.h, 0.5 * L.h, v);
            double tm, xm;
            L.point(d, j, 0.5 * L.h, 0.5 * L.h, tm, xm);
            CHECK(v[0] == doctest::Approx(xm - tm).epsilon(1e-13));
        }
}

TEST_CASE("linearity, restriction and transport consistency") {
    auto K = Trapezoid::compact(0, 1, 1);
    auto L = lattice_for(K, 1.0 / 32);
    auto d1 = sample_line(L, 2, [](double x, double* o) { o[0] = std::sin(x); o[1] = x * x; },
                          [](double x, double* o) { o[0] = std::cos(3 * x); o[1] = 1; });
    auto d2 = sample_line(L, 2, [](double x, double* o) { o[0] = std::exp(x); o[1] = -x; },
                          [](double x, double* o) { o[0] = x; o[1] = 0.5; });
    auto h1 = sample_field(L, 2, [](double t, double x, double* o) { o[0] = t * x; o[1] = 1 - t; });
    auto h2 = sample_field(L, 2, [](double t, double x, double* o) { o[0] = std::sin(t + x); o[1] = x; });
    LineData ds = d1;
    for (std::size_t i = 0; i < ds.u.size(); ++i) ds.u[i] += d2.u[i];
    for (std::size_t i = 0; i < ds.v.size(); ++i) ds.v[i] += d2.v[i];
    Field hs = h1;
    for (std::size_t i = 0; i < hs.vals.size(); ++i) hs.vals[i] += h2.vals[i];
    auto s1 = dalembert_solve(d1, h1), s2 = dalembert_solve(d2, h2), ss = dalembert_solve(ds, hs);
    for (std::size_t i = 0; i < ss.node_u.size(); ++i) CHECK(std::abs(ss.node_u[i] - s1.node_u[i] - s2.node_u[i]) <= 1e-13);

    // restriction: solving on a sub-trapezoid reproduces the values bitwise
    auto sub = L.sub(8, 40, 10);
    auto sr = dalembert_solve(d1.restrict_to(8, 40), h1.restrict_to(sub));
    for (int d = 0; d <= sub.Dn; ++d)
        for (int j = 0; j < sub.nodes_on(d); ++j)
            for (int c = 0; c < 2; ++c) CHECK(sr.node(d, j)[c] == s1.node(d, j + 8)[c]);
    for (int d = 0; d <= sub.D; ++d)
        for (int j = 0; j < sub.cells_on(d); ++j)
            for (int k = 0; k < 6; ++k) {
                CHECK(sr.vp.at(sub.cell(d, j))[k] == s1.vp.at(L.cell(d, j + 8))[k]);
                CHECK(sr.vm.at(sub.cell(d, j))[k] == s1.vm.at(L.cell(d, j + 8))[k]);
            }

    std::vector<double> gp(static_cast<std::size_t>(L.N) * 2);
    for (int k = 0; k < L.N; ++k)
        for (int c = 0; c < 2; ++c) gp[k * 2 + c] = d1.v_at(k)[c] - d1.Du(k, c);
    auto tp = transport_solve(gp, h1, Direction::Plus);
    CHECK(tp.coef == s1.vp.coef);
}

TEST_CASE("a priori W11 bound on every slice") {
    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 32);
    auto d = sample_line(L, 1, [](double x, double* o) { o[0] = std::sin(4 * x); }, [](double x, double* o) { o[0] = x > 0 ? 1 : -2; });
    auto hf = sample_field(L, 1, [](double t, double x, double* o) { o[0] = std::cos(5 * x) - t; });
    auto s = dalembert_solve(d, hf);
    double rhs = w11_seminorm(d) + l1_norm_v(d) + l1_norm(hf);
    for (int m = 0; 2 * m <= L.D; ++m) {
        auto tr = trace(s, m);
        double ux = 0, ut = 0;
        for (std::size_t i = 0; i < tr.ux.size(); ++i) {
            ux += std::abs(tr.ux[i]) * L.h;
            ut += std::abs(tr.data.v[i]) * L.h;
        }
        CHECK(ux <= rhs + 1e-12);
        CHECK(ut <= rhs + 1e-12);
    }
}

TEST_CASE("weak form residual") {
    auto run = [](double h, bool perturb) {
        auto L = lattice_for(Trapezoid::compact(0, 1, 1), h);
        auto d = sample_line(L, 1, [](double x, double* o) { o[0] = 1 + x - x * x * x; }, [](double x, double* o) { o[0] = x * x; });
        auto hf = sample_field(L, 1, [](double t, double x, double* o) { o[0] = 1 - t * x; });
        auto s = dalembert_solve(d, hf);
        if (perturb)
            for (int dd = 0; dd <= L.Dn; ++dd)
                for (int j = 0; j < L.nodes_on(dd); ++j) {
                    double t = 0.5 * dd * h, x = L.x_base(j) + 0.5 * dd * h;
                    if ((t - 0.3) * (t - 0.3) + x * x < 0.04) s.node_u[L.node(dd, j)] += 1.0;
                }
        return weak_form_residual(s, product_bump(0.0, 0.0, 0.45, 0.45));
    };
    double r1 = run(1.0 / 16, false), r2 = run(1.0 / 32, false), r3 = run(1.0 / 64, false);
    CHECK(r2 < r1);
    CHECK(r3 < r2);
    CHECK(r3 <= 4.0 * std::pow(1.0 / 64, 2));
    double p1 = run(1.0 / 32, true), p2 = run(1.0 / 64, true);
    CHECK(p1 > 0.01);
    CHECK(p2 > 0.01);

    auto L = lattice_for(Trapezoid::compact(0, 1, 1), 1.0 / 16);
    auto zs = dalembert_solve(sample_line(L, 1, zero1, zero1), Field::zeros(L, 1));
    CHECK(weak_form_residual(zs, product_bump(0.2, 0.0, 0.3, 0.3)) == 0.0);
    CHECK_THROWS_AS(weak_form_residual(zs, product_bump(0.9, 0.0, 0.3, 0.3)), Error);
}
