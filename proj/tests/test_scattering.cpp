#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wavemap/error.hpp"
#include "wavemap/rng.hpp"
#include "wavemap/scattering.hpp"

using namespace wavemap;

namespace {

const Manifold S2 = Manifold::sphere(3);

LineData scalar_line(double h, double lo, double hi, const std::function<double(double)>& u,
                     const std::function<double(double)>& v) {
    long k0 = std::lround(lo / h);
    int N = static_cast<int>(std::lround((hi - lo) / h));
    LineData d = LineData::zeros(0.0, h, k0, N, 1);
    for (int k = 0; k <= N; ++k) d.u_at(k)[0] = u(d.x(k));
    for (int k = 0; k < N; ++k) d.v_at(k)[0] = v(d.x(k) + 0.5 * h);
    return d;
}

// linear solution wrapped as a one-layer solution
Solution wrap(LinearSolution l, Field f) {
    Solution s;
    s.domain = l.lat().trapezoid();
    s.layers.push_back(std::move(l));
    s.forcing.push_back(std::move(f));
    return s;
}

// equatorial curve with a vertical tangent velocity, both supported in [-1, 1]
LineData bump_data(const NullLattice& L, double amp, double vel) {
    return sample_line(
        L, 3,
        [=](double x, double* o) {
            double th = amp * bump(x);
            o[0] = std::cos(th);
            o[1] = std::sin(th);
            o[2] = 0.0;
        },
        [=](double x, double* o) {
            o[0] = o[1] = 0.0;
            o[2] = vel * bump(x);
        });
}

// vertical forcing supported in the backward cone over [-1, 1]
PointFn cone_forcing(double amp) {
    return [=](double t, double x, double* o) {
        o[0] = o[1] = 0.0;
        o[2] = std::abs(x) < 1.0 - t ? amp * (1.0 - t - std::abs(x)) : 0.0;
    };
}

SolverOptions wide() {
    SolverOptions o;
    o.budget = select_budget(1.0, 3.0);
    o.budget->eta = 1.0;
    return o;
}

} // namespace

TEST_CASE("free wave examples") {
    const double h = 1.0 / 16;
    auto d = scalar_line(h, -1.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; });
    auto fw = free_wave(d, 2.0);
    CHECK(fw.data.k0 == -48);
    CHECK(fw.data.u_at(48)[0] == doctest::Approx(1.0).epsilon(1e-15));
    auto id = free_wave(d, 0.0);
    CHECK(l11_distance(id.data, d) == 0.0);
    auto c = scalar_line(h, -1.0, 1.0, [](double) { return 0.7; }, [](double) { return 0.0; });
    for (double t : {0.5, 3.0, -2.0}) {
        auto w = free_wave(c, t);
        for (double u : w.data.u) CHECK(u == 0.7);
        for (double v : w.data.v) CHECK(v == 0.0);
    }
    CHECK_THROWS_AS(free_wave(d, 0.01), Error);
}

TEST_CASE("free wave group inversion") {
    CounterRng r(3, 1);
    const double h = 1.0 / 32;
    auto d = LineData::zeros(0.0, h, -20, 40, 2);
    for (auto& x : d.u) x = r.uniform(-1, 1);
    for (auto& x : d.v) x = r.uniform(-1, 1);
    for (double t : {h, 0.5, 1.25}) {
        auto fwd = free_wave(d, t);
        auto back = free_wave(fwd.data, -t);
        CHECK(l11_distance(back.data, d) <= 1e-12);
    }
}

TEST_CASE("free wave agrees with the d'Alembert solver") {
    const double h = 1.0 / 32;
    auto d = scalar_line(h, -2.0, 2.0, [](double x) { return std::sin(3 * x); }, [](double x) { return x * x; });
    auto L = lattice_for(Trapezoid::compact(0.0, 2.0, 1.0), h);
    auto s = wrap(dalembert_solve(d, Field::zeros(L, 1)), Field::zeros(L, 1));
    auto tr = trace(s.layers[0], 16);
    auto fw = free_wave(d, 0.5);
    for (int k = 0; k <= tr.data.N; ++k) CHECK(tr.data.u_at(k)[0] == doctest::Approx(fw.data.u_at(k + 32)[0]).epsilon(1e-12));
}

TEST_CASE("duhamel scattering data") {
    const double h = 1.0 / 16;
    auto d = scalar_line(h, -1.0, 1.0, [](double x) { return x > 0 ? x : 0.0; }, [](double x) { return std::cos(x); });
    auto none = scattering_data_rn(d, std::vector<Field>{});
    CHECK(l11_distance(none.data, d) == 0.0);

    // forcing on the slab [0, 1] x [-1, 1], solved on a window that holds its cone
    auto L = lattice_for(Trapezoid::compact(0.0, 5.0, 2.0), h);
    PointFn slab = [](double t, double x, double* o) { o[0] = (t < 1.0 && std::abs(x) < 1.0) ? 1.0 : 0.0; };
    PointFn slab2 = [](double t, double x, double* o) { o[0] = (t < 0.5 && x > 0.0 && x < 1.0) ? -2.0 * x : 0.0; };
    Field f1 = sample_field(L, 1, slab), f2 = sample_field(L, 1, slab2);
    auto s1 = scattering_data_rn(d, {f1});
    // the data gain at most the forcing mass in L^1
    double gain = 0.0, v0 = 0.0;
    for (double v : s1.data.v) gain += std::abs(v) * h;
    for (double v : d.v) v0 += std::abs(v) * h;
    CHECK(gain - v0 <= l1_norm(f1) + 1e-12);
    CHECK(gain > v0);

    // matches the pulled-back linear solution beyond the forcing support
    auto ext = sample_line(L, 1, [&](double x, double* o) { d.eval_u(x, o); },
                           [&](double x, double* o) { o[0] = std::abs(x) < 1.0 ? std::cos(x) : 0.0; });
    auto ds = scattering_data_rn(ext, {f1});
    auto sol = wrap(dalembert_solve(ext, f1), f1);
    for (int m : {16, 20, 32}) CHECK(l11_distance(pull_back(sol, m), ds.data) <= 1e-12);
    CHECK(l11_distance(pull_back(sol, 8), ds.data) > 1e-3);

    // linearity in the forcing
    Field f12 = f1;
    for (std::size_t i = 0; i < f12.vals.size(); ++i) f12.vals[i] += f2.vals[i];
    auto zero = LineData::zeros(0.0, h, d.k0, d.N, 1);
    auto a = scattering_data_rn(zero, {f1}), b = scattering_data_rn(zero, {f2}), ab = scattering_data_rn(zero, {f12});
    for (std::size_t i = 0; i < ab.data.v.size(); ++i) CHECK(ab.data.v[i] == doctest::Approx(a.data.v[i] + b.data.v[i]));
    for (std::size_t i = 0; i < ab.data.u.size(); ++i) CHECK(ab.data.u[i] == doctest::Approx(a.data.u[i] + b.data.u[i]));

    CHECK_THROWS_AS(scattering_data_rn(d, {f1}, 1e-6, 1e-12), Error);
    auto pf = scattering_data_rn(d, slab, 2.0);
    CHECK(l11_distance(pf.data, s1.data) <= 1e-12);
}

TEST_CASE("scattering defect of free waves") {
    const double h = 1.0 / 32;
    auto L = lattice_for(Trapezoid::compact(0.0, 4.0, 2.0), h);
    auto d = sample_line(L, 1, [](double x, double* o) { o[0] = std::exp(-x * x); }, [](double x, double* o) { o[0] = -x * std::exp(-x * x); });
    auto s = wrap(dalembert_solve(d, Field::zeros(L, 1)), Field::zeros(L, 1));
    for (const auto& r : defect_series(s, ScatteringData{d}, 0, 64)) {
        CHECK(r.sup <= 1e-13);
        CHECK(r.l1_ut <= 1e-12);
        CHECK(r.l1_ux <= 1e-12);
    }

    // travelling wave map: the solution is its own free wave
    auto tw = sample_line(L, 3, [](double x, double* o) { o[0] = std::cos(x); o[1] = std::sin(x); o[2] = 0; },
                          [](double, double* o) { o[0] = o[1] = o[2] = 0; });
    for (int k = 0; k < tw.N; ++k)
        for (int c = 0; c < 3; ++c) tw.v_at(k)[c] = -tw.Du(k, c);
    auto ws = solve_global(S2, tw, nullptr, Trapezoid::compact(0.0, 4.0, 2.0), wide());
    for (const auto& r : defect_series(ws, ScatteringData{tw}, 0, 64)) {
        CHECK(r.sup <= 1e-13);
        CHECK(r.l1_ut <= 1e-12);
    }

    // geodesic: no decay, finite slice norms
    auto geo = sample_line(L, 3, [](double, double* o) { o[0] = 1; o[1] = 0; o[2] = 0; },
                           [](double, double* o) { o[0] = 0; o[1] = 1; o[2] = 0; });
    auto gs = solve_global(S2, geo, nullptr, Trapezoid::compact(0.0, 4.0, 2.0), wide());
    auto series = defect_series(gs, ScatteringData{geo}, 32, 64);
    CHECK(std::isfinite(series.back().sup));
    CHECK(series.back().sup > series.front().sup);
    CHECK(series.back().sup > 0.1);
}

TEST_CASE("compactification examples") {
    const double h = 1.0 / 16;
    auto c = sample_line(0.0, h, -16, 32, 3, [](double, double* o) { o[0] = 0; o[1] = 0.6; o[2] = 0.8; },
                         [](double, double* o) { o[0] = o[1] = o[2] = 0; });
    auto cp = compactify(c, {}, 64);
    for (int k = 0; k <= 64; ++k) {
        CHECK(cp.data.u_at(k)[1] == 0.6);
        CHECK(cp.data.u_at(k)[2] == 0.8);
    }
    for (double v : cp.data.v) CHECK(v == 0.0);
    for (double v : cp.F.vals) CHECK(v == 0.0);

    auto ind = scalar_line(h, -1.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; });
    auto ci = compactify(ind, {}, 128);
    double mass = 0.0;
    for (double v : ci.data.v) mass += std::abs(v) * ci.lat.h;
    CHECK(mass == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ci.compact_data_norm == doctest::Approx(ci.data_norm).epsilon(1e-12));

    // one physical cell of mass 0.3
    auto L = NullLattice::make(0.0, h, -16, 0, 32, 16);
    Field f = Field::zeros(L, 1);
    f.at(L.cell(5, 7))[0] = 0.3 / L.area(5);
    auto cf = compactify(ind, {f}, 256);
    CHECK(cf.forcing_norm == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(cf.compact_forcing_norm == doctest::Approx(0.3).epsilon(1e-12));
    CHECK_THROWS_AS(compactify(ind, {}, 63), Error);
}

TEST_CASE("compactification norm identities on random data") {
    for (int trial = 0; trial < 10; ++trial) {
        CounterRng r(11, trial);
        const double h = 1.0 / 16;
        auto L = NullLattice::make(0.0, h, -16, 0, 32, 16);
        auto d = LineData::zeros(0.0, h, -16, 32, 2);
        for (auto& x : d.u) x = r.uniform(-1, 1);
        for (auto& x : d.v) x = r.uniform(-1, 1);
        Field f = Field::zeros(L, 2);
        for (auto& x : f.vals) x = r.uniform(-1, 1);
        const int N = 1024;
        auto cp = compactify(d, {f}, N);
        const double hc = cp.lat.h;
        INFO("trial ", trial, " data ", cp.data_norm, " vs ", cp.compact_data_norm, " forcing ", cp.forcing_norm,
             " vs ", cp.compact_forcing_norm);
        CHECK(cp.compact_forcing_norm <= cp.forcing_norm * (1 + 1e-12));
        CHECK(std::abs(cp.compact_forcing_norm - cp.forcing_norm) <= 4 * h * cp.forcing_norm);
        CHECK(std::abs(cp.compact_data_norm - cp.data_norm) <= 4 * h * cp.data_norm);
        (void)hc;
    }
}

TEST_CASE("support cone") {
    const double h = 1.0 / 32;
    auto K = Trapezoid::compact(0.0, 4.0, 2.0);
    auto L = lattice_for(K, h);
    auto s = solve_global(S2, bump_data(L, 0.5, 0.5), cone_forcing(0.3), K, wide());
    auto reps = support_cone_check(s, 1.0, 1e-12);
    for (const auto& r : reps) {
        INFO(r.name, " ", r.lhs);
        CHECK(r.ok);
    }
    auto c = solve_global(S2, sample_line(L, 3, [](double, double* o) { o[0] = 1; o[1] = 0; o[2] = 0; },
                                          [](double, double* o) { o[0] = o[1] = o[2] = 0; }),
                          nullptr, K, wide());
    for (const auto& r : support_cone_check(c, 1.0, 0.0)) CHECK(r.lhs == 0.0);
}

TEST_CASE("M-valued scattering through the compactification") {
    const double h = 1.0 / 32;
    auto K = Trapezoid::compact(0.0, 5.0, 2.0);
    auto L = lattice_for(K, h);
    auto data = bump_data(L, 0.5, 0.5);
    auto s = solve_global(S2, data, cone_forcing(0.3), K, wide());
    std::vector<Field> fs = s.forcing;
    auto out = LineData::zeros(0.0, h, L.k0 - 64, L.N + 128, 3);
    auto ms = scatter_m_valued(S2, data, fs, 512, out, wide());
    auto series = defect_series(s, ms.data_L, 40, 64);
    for (const auto& r : series) {
        INFO("t=", r.t, " sup ", r.sup, " ut ", r.l1_ut, " ux ", r.l1_ux);
        CHECK(r.sup <= 5 * h);
        CHECK(r.l1_ut <= 5 * h);
        CHECK(r.l1_ux <= 5 * h);
    }
}
