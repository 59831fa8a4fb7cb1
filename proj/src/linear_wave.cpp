#include "wavemap/linear_wave.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "march.hpp"
#include "wavemap/error.hpp"

namespace wavemap {

LinearSolution dalembert_solve(const LineData& data, const Field& h) {
    LinearSolution s;
    auto [vp, vm] = characteristic_derivatives(data, h);
    s.data = data;
    s.h = h;
    s.vp = std::move(vp);
    s.vm = std::move(vm);
    const NullLattice& L = h.lat;
    const int n = h.n;
    s.node_u.assign(static_cast<std::size_t>(L.num_nodes()) * n, 0.0);
    for (int j = 0; j <= L.N; ++j)
        std::copy(data.u_at(j), data.u_at(j) + n, s.node_u.data() + static_cast<std::size_t>(L.node(0, j)) * n);
    for (int d = 1; d <= L.Dn; ++d)
        for (int j = 0; j < L.nodes_on(d); ++j) {
            int c = L.cell(d - 1, j);
            detail::u_step(s.node_u.data() + static_cast<std::size_t>(L.node(d - 1, j)) * n, s.vm.at(c), n, L.h,
                           s.node_u.data() + static_cast<std::size_t>(L.node(d, j)) * n);
        }
    return s;
}

AffineField transport_solve(const std::vector<double>& g, const Field& f, Direction dir) {
    return transport_field(g, f, dir == Direction::Plus ? +1 : -1);
}

namespace {

double psi(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return q * q * q * q;
}
double dpsi(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return -8.0 * s * q * q * q;
}
double ddpsi(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return -8.0 * q * q * q + 48.0 * s * s * q * q;
}

} // namespace

TestFunction product_bump(double tc, double xc, double rt, double rx) {
    TestFunction T;
    T.phi = [=](double t, double x) { return psi((t - tc) / rt) * psi((x - xc) / rx); };
    T.phi_t = [=](double t, double x) { return dpsi((t - tc) / rt) / rt * psi((x - xc) / rx); };
    T.box = [=](double t, double x) {
        double st = (t - tc) / rt, sx = (x - xc) / rx;
        return ddpsi(st) / (rt * rt) * psi(sx) - psi(st) * ddpsi(sx) / (rx * rx);
    };
    return T;
}

double weak_form_residual(const LinearSolution& s, const TestFunction& phi) {
    const NullLattice& L = s.lat();
    const int n = s.n();
    const double t0 = L.t_base();
    Trapezoid K = L.trapezoid();

    // support check on the lateral and top boundary
    const int probes = 64 * L.N;
    for (int p = 0; p <= probes; ++p) {
        double t = K.height * p / probes;
        Interval sl = K.slice(t);
        for (double x : {sl.lo, sl.hi})
            if (std::abs(phi.phi(t, x)) > 1e-14)
                fail(Status::TestFunctionSupport, "test function does not vanish near the non-initial boundary");
    }

    const auto& gx = boost::math::quadrature::gauss<double, 5>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 5>::weights();
    std::vector<double> nodes01, w01;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        nodes01.push_back(0.5 + 0.5 * gx[i]);
        w01.push_back(0.5 * gw[i]);
        if (gx[i] != 0.0) {
            nodes01.push_back(0.5 - 0.5 * gx[i]);
            w01.push_back(0.5 * gw[i]);
        }
    }

    std::vector<double> I1(n, 0.0), I2(n, 0.0), I3(n, 0.0), I4(n, 0.0), uq(n);
    const double h = L.h;
    for (int d = 0; d <= L.D; ++d) {
        auto shape = L.shape(d);
        for (int j = 0; j < L.cells_on(d); ++j) {
            const double* hv = s.h.at(L.cell(d, j));
            for (std::size_t p = 0; p < nodes01.size(); ++p)
                for (std::size_t q = 0; q < nodes01.size(); ++q) {
                    double ca, cb, jac;
                    double sp = nodes01[p], sq = nodes01[q];
                    if (shape == NullLattice::Shape::Full) {
                        ca = h * sp;
                        cb = h * sq;
                        jac = h * h;
                    } else if (shape == NullLattice::Shape::Base) {
                        ca = h * sp;
                        cb = h * sp * sq;
                        jac = h * h * sp;
                    } else {
                        cb = h * sp;
                        ca = h * sp * sq;
                        jac = h * h * sp;
                    }
                    double w = w01[p] * w01[q] * jac * 0.5; // dt dx = da db / 2
                    double t, x;
                    L.point(d, j, ca, cb, t, x);
                    t -= t0;
                    double bx = phi.box(t, x), ph = phi.phi(t, x);
                    if (bx == 0.0 && ph == 0.0) continue;
                    s.u_in_cell(d, j, ca, cb, uq.data());
                    for (int c = 0; c < n; ++c) {
                        I1[c] += w * uq[c] * bx;
                        I2[c] += w * ph * hv[c];
                    }
                }
        }
    }
    const LineData& D = s.data;
    for (int k = 0; k < D.N; ++k)
        for (std::size_t p = 0; p < nodes01.size(); ++p) {
            double sp = nodes01[p];
            double x = D.x(k) + h * sp;
            double w = w01[p] * h;
            double pt = phi.phi_t(0.0, x), ph = phi.phi(0.0, x);
            for (int c = 0; c < n; ++c) {
                double u0 = (1.0 - sp) * D.u_at(k)[c] + sp * D.u_at(k + 1)[c];
                I3[c] += w * u0 * pt;
                I4[c] += w * D.v_at(k)[c] * ph;
            }
        }
    double r = 0.0;
    for (int c = 0; c < n; ++c) r += std::abs(I1[c] - I2[c] + I3[c] - I4[c]);
    return r;
}

} // namespace wavemap
