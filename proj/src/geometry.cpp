#include "wavemap/geometry.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "wavemap/error.hpp"

namespace wavemap {

namespace {

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm2(const double* a, int n) { return std::sqrt(dot(a, a, n)); }

double bump_raw(double x) {
    if (!(std::abs(x) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

double bump_scale() {
    static const double C = 1.0 / boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump_raw, -1.0, 1.0, 15, 1e-15);
    return C;
}

} // namespace

Manifold Manifold::sphere(int n) {
    if (n < 2) fail(Status::ConfigError, "sphere target needs ambient dimension >= 2");
    Manifold M;
    M.kind = Kind::UnitSphere;
    M.n = n;
    return M;
}

double Manifold::distance(const double* q) const {
    if (kind == Kind::Custom) return custom_distance(q);
    return std::abs(norm2(q, n) - 1.0);
}

void Manifold::nearest_point(const double* q, double* p) const {
    if (distance(q) > tubular_radius_eps0) fail(Status::DistanceExceeded, "point outside the tubular neighbourhood");
    if (kind == Kind::Custom) {
        custom_nearest(q, p);
        return;
    }
    double r = norm2(q, n);
    for (int i = 0; i < n; ++i) p[i] = q[i] / r;
}

void Manifold::tangent_project(const double* p, const double* v, double* w) const {
    if (distance(p) > tubular_radius_eps0) fail(Status::DistanceExceeded, "point outside the tubular neighbourhood");
    if (kind == Kind::Custom) {
        custom_tangent(p, v, w);
        return;
    }
    double r = norm2(p, n);
    double s = dot(v, p, n) / (r * r);
    for (int i = 0; i < n; ++i) w[i] = v[i] - s * p[i];
}

void Manifold::normal_project(const double* p, const double* v, double* w) const {
    std::vector<double> t(n);
    tangent_project(p, v, t.data());
    for (int i = 0; i < n; ++i) w[i] = v[i] - t[i];
}

void Manifold::christoffel_form(const double* p, const double* X, const double* Y, double* out) const {
    if (kind == Kind::Custom) {
        custom_gamma(p, X, Y, out);
        return;
    }
    double s = dot(X, Y, n);
    for (int i = 0; i < n; ++i) out[i] = -s * p[i];
}

void Manifold::forcing_project(const double* p, const double* f, double* out) const { tangent_project(p, f, out); }

double Manifold::cutoff(const double* q) const {
    double d = distance(q);
    const double inner = 0.5 * tubular_radius_eps0, outer = tubular_radius_eps0;
    if (d <= inner) return 1.0;
    if (d >= outer) return 0.0;
    double s = (d - inner) / (outer - inner);
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

void Manifold::gamma_ext(const double* q, const double* X, const double* Y, double* out) const {
    double chi = cutoff(q);
    if (chi == 0.0) {
        std::fill(out, out + n, 0.0);
        return;
    }
    std::vector<double> p(n);
    nearest_point(q, p.data());
    christoffel_form(p.data(), X, Y, out);
    if (chi != 1.0)
        for (int i = 0; i < n; ++i) out[i] *= chi;
}

void Manifold::forcing_ext(const double* q, const double* f, double* out) const {
    double chi = cutoff(q);
    if (chi == 0.0) {
        std::fill(out, out + n, 0.0);
        return;
    }
    std::vector<double> p(n);
    nearest_point(q, p.data());
    tangent_project(p.data(), f, out);
    if (chi != 1.0)
        for (int i = 0; i < n; ++i) out[i] *= chi;
}

Vec Manifold::nearest_point(const Vec& q) const {
    Vec p(n);
    nearest_point(q.data(), p.data());
    return p;
}

Vec Manifold::tangent_project(const Vec& p, const Vec& v) const {
    Vec w(n);
    tangent_project(p.data(), v.data(), w.data());
    return w;
}

Vec Manifold::normal_project(const Vec& p, const Vec& v) const {
    Vec w(n);
    normal_project(p.data(), v.data(), w.data());
    return w;
}

Vec Manifold::christoffel_form(const Vec& p, const Vec& X, const Vec& Y) const {
    Vec w(n);
    christoffel_form(p.data(), X.data(), Y.data(), w.data());
    return w;
}

Vec Manifold::forcing_project(const Vec& p, const Vec& f) const {
    Vec w(n);
    forcing_project(p.data(), f.data(), w.data());
    return w;
}

ExtensionConstants measure_extension_constants(const Manifold& M, double radius, int samples) {
    const int n = M.n;
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto unit = [&](double* x) {
        double r = 0.0;
        do {
            for (int i = 0; i < n; ++i) x[i] = g(rng);
            r = norm2(x, n);
        } while (r < 1e-12);
        for (int i = 0; i < n; ++i) x[i] /= r;
    };
    ExtensionConstants ec;
    std::vector<double> q1(n), q2(n), X(n), Y(n), o1(n), o2(n), dq(n);
    for (int s = 0; s < samples; ++s) {
        unit(q1.data());
        double rad = 1.0 + radius * u(rng);
        for (int i = 0; i < n; ++i) q1[i] *= rad;
        unit(dq.data());
        double eps = 1e-3 * radius * (0.5 + 0.5 * u(rng));
        for (int i = 0; i < n; ++i) q2[i] = q1[i] + eps * dq[i];
        if (M.distance(q2.data()) > radius) continue;
        unit(X.data());
        unit(Y.data());
        M.gamma_ext(q1.data(), X.data(), Y.data(), o1.data());
        M.gamma_ext(q2.data(), X.data(), Y.data(), o2.data());
        ec.sup_gamma = std::max(ec.sup_gamma, norm2(o1.data(), n));
        for (int i = 0; i < n; ++i) o2[i] -= o1[i];
        ec.lipschitz = std::max(ec.lipschitz, norm2(o2.data(), n) / eps);
        M.forcing_ext(q1.data(), X.data(), o1.data());
        M.forcing_ext(q2.data(), X.data(), o2.data());
        ec.sup_gamma = std::max(ec.sup_gamma, norm2(o1.data(), n));
        for (int i = 0; i < n; ++i) o2[i] -= o1[i];
        ec.lipschitz = std::max(ec.lipschitz, norm2(o2.data(), n) / eps);
    }
    return ec;
}

CompatibilityReport check_compatibility(const Manifold& M, const LineData& data, double tol) {
    const int n = data.n;
    CompatibilityReport r;
    std::vector<double> mid(n), p(n), w(n);
    for (int k = 0; k < data.N; ++k) {
        for (int c = 0; c < n; ++c) mid[c] = 0.5 * (data.u_at(k)[c] + data.u_at(k + 1)[c]);
        M.nearest_point(mid.data(), p.data());
        M.normal_project(p.data(), data.v_at(k), w.data());
        r.max_defect = std::max(r.max_defect, norm2(w.data(), n));
    }
    r.ok = r.max_defect <= tol;
    return r;
}

double bump(double x) { return bump_scale() * bump_raw(x); }

double bump_cdf(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // split at the midpoint so both pieces stay smooth and well resolved
    double lo = -1.0;
    double s = 0.0;
    const int pieces = 8;
    for (int i = 0; i < pieces; ++i) {
        double a = lo + (x - lo) * i / pieces;
        double b = lo + (x - lo) * (i + 1) / pieces;
        s += boost::math::quadrature::gauss<double, 20>::integrate(bump_raw, a, b);
    }
    return std::min(1.0, bump_scale() * s);
}

double manifold_defect(const Manifold& M, const LineData& data) {
    double m = 0.0;
    for (int k = 0; k <= data.N; ++k) m = std::max(m, M.distance(data.u_at(k)));
    return m;
}

LineData smooth_approximate(const Manifold& M, const LineData& data, int k) {
    if (k < 1) fail(Status::ConfigError, "smooth_approximate needs k >= 1");
    const int n = data.n;
    const double K = static_cast<double>(k);

    // truncation
    auto ubar = [&](double x, double* out) {
        double xs = x < 0.0 ? -std::min(K, -x) : std::min(K, x);
        data.eval_u(xs, out);
    };

    // modulus of continuity for eps0/3 from the Lipschitz constant of the curve
    double lip = 0.0;
    for (int j = 0; j < data.N; ++j) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += data.Du(j, c) * data.Du(j, c);
        lip = std::max(lip, std::sqrt(s));
    }
    int mk = k;
    if (lip > 0.0) {
        double delta0 = (M.tubular_radius_eps0 / 3.0) / lip;
        mk = std::max(k, static_cast<int>(std::ceil(2.0 / delta0)));
    }
    const double w = 1.0 / mk;

    // composite Gauss rule on (-1, 1), renormalised so constants are reproduced
    const auto& gx = boost::math::quadrature::gauss<double, 8>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 8>::weights();
    std::vector<double> qy, qw;
    const int sub = 64;
    for (int s = 0; s < sub; ++s) {
        double a = -1.0 + 2.0 * s / sub, b = -1.0 + 2.0 * (s + 1) / sub;
        double hm = 0.5 * (b - a), cm = 0.5 * (a + b);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            double xs[2] = {gx[i], -gx[i]};
            for (int side = 0; side < (gx[i] == 0.0 ? 1 : 2); ++side) {
                qy.push_back(cm + hm * xs[side]);
                qw.push_back(hm * gw[i] * bump_raw(cm + hm * xs[side]));
            }
        }
    }
    double tot = 0.0;
    for (double x : qw) tot += x;
    for (double& x : qw) x /= tot;

    LineData out = LineData::zeros(data.origin, data.h, data.k0, data.N, n);
    std::vector<double> tmp(n), acc(n);
    for (int j = 0; j <= data.N; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        double x = data.x(j);
        for (std::size_t i = 0; i < qy.size(); ++i) {
            ubar(x - w * qy[i], tmp.data());
            for (int c = 0; c < n; ++c) acc[c] += qw[i] * tmp[c];
        }
        M.nearest_point(acc.data(), out.u_at(j));
    }

    // cell averages of b_m * vbar; vbar is piecewise constant so the convolution is
    // a sum of differences of the bump primitive
    std::vector<double> vb(static_cast<std::size_t>(data.N) * n, 0.0);
    for (int j = 0; j < data.N; ++j) {
        double mid = 0.5 * (data.x(j) + data.x(j + 1));
        if (std::abs(mid) < K)
            for (int c = 0; c < n; ++c) vb[j * n + c] = data.v_at(j)[c];
    }
    int reach = static_cast<int>(std::ceil(w / data.h)) + 1;
    std::vector<double> mid(n), p(n);
    for (int j = 0; j < data.N; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        double a = data.x(j), b = data.x(j + 1);
        double hm = 0.5 * (b - a), cm = 0.5 * (a + b);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            double xs[2] = {gx[i], -gx[i]};
            for (int side = 0; side < (gx[i] == 0.0 ? 1 : 2); ++side) {
                double x = cm + hm * xs[side];
                double wt = gw[i] * 0.5; // weights sum to 2 on [-1,1]
                for (int l = std::max(0, j - reach); l <= std::min(data.N - 1, j + reach); ++l) {
                    double f = bump_cdf((x - data.x(l)) / w) - bump_cdf((x - data.x(l + 1)) / w);
                    if (f == 0.0) continue;
                    for (int c = 0; c < n; ++c) acc[c] += wt * f * vb[l * n + c];
                }
            }
        }
        for (int c = 0; c < n; ++c) mid[c] = 0.5 * (out.u_at(j)[c] + out.u_at(j + 1)[c]);
        M.nearest_point(mid.data(), p.data());
        M.tangent_project(p.data(), acc.data(), out.v_at(j));
    }
    return out;
}

} // namespace wavemap
