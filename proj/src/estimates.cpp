#include "wavemap/estimates.hpp"

#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "parallel.hpp"
#include "polygon.hpp"
#include "wavemap/error.hpp"
#include "wavemap/rng.hpp"

namespace wavemap {

EstimateReport make_report(std::string name, double lhs, double rhs, double tol) {
    EstimateReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tol = tol;
    r.ok = r.slack >= -tol;
    return r;
}

namespace {

using detail::P2;
using detail::Poly;
using detail::clip;
using detail::poly_area;

// cell polygon in local offsets (alpha, beta)
Poly cell_poly(NullLattice::Shape s, double h) {
    switch (s) {
    case NullLattice::Shape::Base: return {{0, 0}, {h, 0}, {h, h}};
    case NullLattice::Shape::Top: return {{0, 0}, {h, h}, {0, h}};
    default: return {{0, 0}, {h, 0}, {h, h}, {0, h}};
    }
}

// part of cell (d) of the lattice below the slice t = t_base + m0 h (local m0)
Poly below(const NullLattice& L, int d, int m0) {
    Poly P = cell_poly(L.shape(d), L.h);
    // t - t0 = ((d - 2 m0) h + alpha - beta) / 2 <= 0
    return clip(P, (2.0 * m0 - d) * L.h, -1.0, 1.0, +1);
}

// iint over P of a quadratic, in (t, x) measure (dt dx = dalpha dbeta / 2); exact
// for polynomials of degree two by the edge-midpoint rule on a fan
template <class F>
double integrate(const Poly& P, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < P.size(); ++i) {
        const P2& A = P[0];
        const P2& B = P[i];
        const P2& C = P[i + 1];
        double area = 0.5 * std::abs((B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]));
        double s = f(0.5 * (A[0] + B[0]), 0.5 * (A[1] + B[1])) + f(0.5 * (B[0] + C[0]), 0.5 * (B[1] + C[1])) +
                   f(0.5 * (C[0] + A[0]), 0.5 * (C[1] + A[1]));
        acc += area * s / 3.0;
    }
    return 0.5 * acc;
}

// iint_P |p q| for affine p, q given by (c0, ca, cb); q may be null (then |p|)
double abs_product(const Poly& P, const double* p, const double* q) {
    double acc = 0.0;
    for (int sp : {+1, -1}) {
        Poly A = (p[1] == 0.0 && p[2] == 0.0) ? (sp * p[0] >= 0 ? P : Poly{}) : clip(P, p[0], p[1], p[2], sp);
        if (A.empty()) continue;
        if (!q) {
            acc += sp * integrate(A, [&](double a, double b) { return p[0] + p[1] * a + p[2] * b; });
            continue;
        }
        for (int sq : {+1, -1}) {
            Poly B = (q[1] == 0.0 && q[2] == 0.0) ? (sq * q[0] >= 0 ? A : Poly{}) : clip(A, q[0], q[1], q[2], sq);
            if (B.empty()) continue;
            acc += sp * sq * integrate(B, [&](double a, double b) {
                       return (p[0] + p[1] * a + p[2] * b) * (q[0] + q[1] * a + q[2] * b);
                   });
        }
    }
    return acc;
}

// upper enclosure of iint_T |q| for a quadratic q on a triangle (t, x measure):
// Bernstein coefficients of one sign give the exact value, otherwise subdivide
template <class F>
double abs_quadratic_tri(const P2& A, const P2& B, const P2& C, F&& q, int depth) {
    double area = 0.5 * std::abs((B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]));
    if (area == 0.0) return 0.0;
    P2 mab{0.5 * (A[0] + B[0]), 0.5 * (A[1] + B[1])};
    P2 mbc{0.5 * (B[0] + C[0]), 0.5 * (B[1] + C[1])};
    P2 mca{0.5 * (C[0] + A[0]), 0.5 * (C[1] + A[1])};
    double qa = q(A[0], A[1]), qb = q(B[0], B[1]), qc = q(C[0], C[1]);
    double b[6] = {qa, qb, qc, 2.0 * q(mab[0], mab[1]) - 0.5 * (qa + qb), 2.0 * q(mbc[0], mbc[1]) - 0.5 * (qb + qc),
                   2.0 * q(mca[0], mca[1]) - 0.5 * (qc + qa)};
    bool pos = true, neg = true;
    double sum = 0.0, sabs = 0.0;
    for (double x : b) {
        pos = pos && x >= 0.0;
        neg = neg && x <= 0.0;
        sum += x;
        sabs += std::abs(x);
    }
    if (pos || neg) return 0.5 * area * std::abs(sum) / 6.0;
    if (depth == 0) return 0.5 * area * sabs / 6.0;
    return abs_quadratic_tri(A, mab, mca, q, depth - 1) + abs_quadratic_tri(mab, B, mbc, q, depth - 1) +
           abs_quadratic_tri(mca, mbc, C, q, depth - 1) + abs_quadratic_tri(mab, mbc, mca, q, depth - 1);
}

template <class F>
double abs_quadratic(const Poly& P, F&& q) {
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < P.size(); ++i) acc += abs_quadratic_tri(P[0], P[i], P[i + 1], q, 10);
    return acc;
}

// (c0, ca, cb) of component c of an affine field
std::array<double, 3> comp(const double* k, int n, int c) { return {k[c], k[n + c], k[2 * n + c]}; }

// int_0^len |a + b s|_2 ds for vectors a, b
double euclid_linear_integral(const double* a, const double* b, int n, double len) {
    double A = 0.0, B = 0.0, C = 0.0;
    for (int c = 0; c < n; ++c) {
        A += b[c] * b[c];
        B += a[c] * b[c];
        C += a[c] * a[c];
    }
    if (A == 0.0) return std::sqrt(C) * len;
    if (std::sqrt(A) * len <= 1e-3 * std::sqrt(C)) {
        // far from the zero of the line: smooth integrand
        const auto& x = boost::math::quadrature::gauss<double, 10>::abscissa();
        const auto& w = boost::math::quadrature::gauss<double, 10>::weights();
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (double sgn : {1.0, -1.0}) {
                if (x[i] == 0.0 && sgn < 0) continue;
                double s = 0.5 * len * (1.0 + sgn * x[i]);
                acc += w[i] * std::sqrt(A * s * s + 2.0 * B * s + C);
            }
        return 0.5 * len * acc;
    }
    // |a + b s| = sqrt(A) sqrt((s - s*)^2 + delta^2)
    double cross = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double z = a[i] * b[j] - a[j] * b[i];
            cross += z * z;
        }
    double s_star = -B / A;
    double d2 = cross / (A * A);
    auto F = [&](double y) {
        double r = std::sqrt(y * y + d2);
        return 0.5 * (y * r + (d2 > 0.0 ? d2 * std::asinh(y / std::sqrt(d2)) : 0.0));
    };
    return std::sqrt(A) * (F(len - s_star) - F(-s_star));
}

double norm2(const double* v, int n) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += v[c] * v[c];
    return std::sqrt(s);
}

double norm1(const double* v, int n) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += std::abs(v[c]);
    return s;
}

// l1 mass of a piecewise-constant field below local slice m0
double mass_below(const Field& f, int m0) {
    const NullLattice& L = f.lat;
    double acc = 0.0;
    for (int d = 0; d <= std::min(L.D, 2 * m0); ++d) {
        double a = poly_area(below(L, d, m0)) * 0.5;
        if (a == 0.0) continue;
        double s = 0.0;
        for (int j = 0; j < L.cells_on(d); ++j) s += norm1(f.at(L.cell(d, j)), f.n);
        acc += s * a;
    }
    return acc;
}

void check_slice(const NullLattice& L, int m0) {
    if (m0 < 0 || m0 > L.M) fail(Status::OffLattice, "slice outside the lattice");
}

} // namespace

EstimateReport transport_bound_check(const std::vector<double>& g, const Field& f, Direction dir, int m0, double tol) {
    const NullLattice& L = f.lat;
    const int n = f.n;
    check_slice(L, m0);
    AffineField v = transport_solve(g, f, dir);
    double lhs = 0.0;
    const int d = 2 * m0;
    if (d <= L.D)
        for (int j = 0; j < L.cells_on(d); ++j) {
            const double* k = v.at(L.cell(d, j));
            for (int c = 0; c < n; ++c) lhs += abs_linear_integral(k[c], k[n + c] + k[2 * n + c], L.h);
        }
    double rhs = 0.0;
    for (int k = 0; k < L.N; ++k) rhs += norm1(g.data() + static_cast<std::size_t>(k) * n, n) * L.h;
    rhs += mass_below(f, m0);
    return make_report("transport_bound", lhs, rhs, tol);
}

EstimateReport zhou_bilinear_check(const std::vector<double>& g_plus, const std::vector<double>& g_minus,
                                   const Field& f_plus, const Field& f_minus, int m0, double tol) {
    const NullLattice& L = f_plus.lat;
    const int n = f_plus.n;
    if (!f_minus.lat.same_as(L) || f_minus.n != n) fail(Status::LatticeMismatch, "f+ and f- on different lattices");
    check_slice(L, m0);
    AffineField vp = transport_solve(g_plus, f_plus, Direction::Plus);
    AffineField vm = transport_solve(g_minus, f_minus, Direction::Minus);
    double lhs = 0.0;
    for (int d = 0; d <= std::min(L.D, 2 * m0); ++d) {
        Poly P = below(L, d, m0);
        if (P.empty()) continue;
        for (int j = 0; j < L.cells_on(d); ++j) {
            int cell = L.cell(d, j);
            for (int a = 0; a < n; ++a) {
                auto p = comp(vp.at(cell), n, a);
                for (int b = 0; b < n; ++b) {
                    auto q = comp(vm.at(cell), n, b);
                    lhs += abs_product(P, p.data(), q.data());
                }
            }
        }
    }
    double Ap = mass_below(f_plus, m0), Am = mass_below(f_minus, m0);
    for (int k = 0; k < L.N; ++k) {
        Ap += norm1(g_plus.data() + static_cast<std::size_t>(k) * n, n) * L.h;
        Am += norm1(g_minus.data() + static_cast<std::size_t>(k) * n, n) * L.h;
    }
    return make_report("zhou_bilinear", lhs, 0.5 * Ap * Am, tol);
}

std::vector<double> q_form(const double* ut, const double* ux, const double* ubt, const double* ubx, int n) {
    std::vector<double> q(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) q[j * n + k] = ut[j] * ubt[k] - ux[j] * ubx[k];
    return q;
}

double QForm::l1(int cell) const {
    double s = 0.0;
    for (int i = 0; i < n * n; ++i) s += std::abs(q[static_cast<std::size_t>(cell) * n * n + i]);
    return s;
}

QForm q_form(const LinearSolution& u, const LinearSolution& ub) {
    const NullLattice& L = u.lat();
    if (!ub.lat().same_as(L) || ub.n() != u.n()) fail(Status::LatticeMismatch, "Q form of fields on different lattices");
    const int n = u.n();
    QForm Q;
    Q.n = n;
    Q.q.resize(static_cast<std::size_t>(L.num_cells()) * n * n);
    std::vector<double> p(n), m(n), pb(n), mb(n), ut(n), ux(n), ubt(n), ubx(n);
    for (int d = 0; d <= L.D; ++d) {
        double ca, cb;
        L.centroid(d, ca, cb);
        for (int j = 0; j < L.cells_on(d); ++j) {
            int c = L.cell(d, j);
            u.vp.eval(c, ca, cb, p.data());
            u.vm.eval(c, ca, cb, m.data());
            ub.vp.eval(c, ca, cb, pb.data());
            ub.vm.eval(c, ca, cb, mb.data());
            for (int k = 0; k < n; ++k) {
                ut[k] = 0.5 * (p[k] + m[k]);
                ux[k] = 0.5 * (m[k] - p[k]);
                ubt[k] = 0.5 * (pb[k] + mb[k]);
                ubx[k] = 0.5 * (mb[k] - pb[k]);
            }
            auto q = q_form(ut.data(), ux.data(), ubt.data(), ubx.data(), n);
            std::copy(q.begin(), q.end(), Q.q.begin() + static_cast<std::ptrdiff_t>(c) * n * n);
        }
    }
    return Q;
}

EstimateReport q_l1_bound_check(const LinearSolution& u, long I, long J, const LinearSolution* ubar, double tol) {
    const NullLattice& L = u.lat();
    const int n = u.n();
    if (u.data.N == 0 || u.h.vals.empty()) fail(Status::MissingProvenance, "solution without recorded data");
    if (ubar) {
        if (!ubar->lat().same_as(L) || ubar->n() != n) fail(Status::LatticeMismatch, "pair on different lattices");
        if (ubar->data.N == 0 || ubar->h.vals.empty()) fail(Status::MissingProvenance, "solution without recorded data");
    }
    long jlo = J - L.J0();
    long ihi = I - L.I0() - 1;
    long dapex = (I - J) - 2 * L.m;
    if (dapex < 0 || dapex > L.Dn || jlo < 0 || jlo >= L.nodes_on(static_cast<int>(dapex)))
        fail(Status::OutsideDomain, "apex is not a node of the lattice");
    const LinearSolution& w = ubar ? *ubar : u;
    double lhs = 0.0;
    double hmass = 0.0, hbmass = 0.0;
    for (int d = 0; d <= L.D; ++d) {
        Poly P = cell_poly(L.shape(d), L.h);
        double area = 0.5 * poly_area(P);
        for (long j = jlo; j + d <= ihi; ++j) {
            int c = L.cell(d, static_cast<int>(j));
            hmass += norm1(u.h.at(c), n) * area;
            hbmass += norm1(w.h.at(c), n) * area;
            for (int a = 0; a < n; ++a) {
                auto pa = comp(u.vp.at(c), n, a);
                auto ma = comp(u.vm.at(c), n, a);
                for (int b = 0; b < n; ++b) {
                    auto pb = comp(w.vp.at(c), n, b);
                    auto mb = comp(w.vm.at(c), n, b);
                    if (!ubar && a == b) {
                        lhs += abs_product(P, pa.data(), mb.data());
                        continue;
                    }
                    auto q = [&](double x, double y) {
                        return 0.5 * ((pa[0] + pa[1] * x + pa[2] * y) * (mb[0] + mb[1] * x + mb[2] * y) +
                                      (ma[0] + ma[1] * x + ma[2] * y) * (pb[0] + pb[1] * x + pb[2] * y));
                    };
                    lhs += abs_quadratic(P, q);
                }
            }
        }
    }
    auto base = [&](const LinearSolution& s, int sign) {
        double acc = 0.0;
        for (long k = jlo; k <= ihi; ++k)
            for (int c = 0; c < n; ++c)
                acc += std::abs(s.data.v_at(static_cast<int>(k))[c] + sign * s.data.Du(static_cast<int>(k), c)) * L.h;
        return acc;
    };
    double Ap = base(u, -1) + hmass, Am = base(u, +1) + hmass;
    if (!ubar) return make_report("q_l1_bound", lhs, Ap * Am, tol);
    double Bp = base(w, -1) + hbmass, Bm = base(w, +1) + hbmass;
    return make_report("q_l1_bound_pair", lhs, 0.5 * (Ap * Bm + Am * Bp), tol);
}

namespace {

// layer holding local slice m0 (the lower one at a layer boundary)
const LinearSolution& slice_layer(const Solution& s, int m0, int& idx) {
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
        const NullLattice& L = s.layers[l].lat();
        if (m0 >= L.m && m0 <= L.m + L.M && (m0 > L.m || l == 0)) {
            idx = static_cast<int>(l);
            return s.layers[l];
        }
    }
    fail(Status::OffLattice, "slice outside the solution");
}

// sum of |f|_2 over cells of all layers in the given global column (sign +1) or row
// (sign -1) range and below absolute slice m0
double strip_forcing(const Solution& s, long lo, long hi, int sign, int m0) {
    double acc = 0.0;
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
        const Field& f = s.forcing[l];
        const NullLattice& L = f.lat;
        int rel = m0 - static_cast<int>(L.m);
        if (rel <= 0) continue;
        for (int d = 0; d <= std::min(L.D, 2 * rel); ++d) {
            double a = 0.5 * poly_area(below(L, d, rel));
            if (a == 0.0) continue;
            for (int j = 0; j < L.cells_on(d); ++j) {
                long g = sign > 0 ? L.J0() + j : L.I0() + j + d;
                if (g < lo || g > hi) continue;
                acc += norm2(f.at(L.cell(d, j)), f.n) * a;
            }
        }
    }
    return acc;
}

} // namespace

std::pair<EstimateReport, EstimateReport> energy_flux_check(const Solution& s, int m0, double tol) {
    if (s.layers.empty() || s.forcing.size() != s.layers.size())
        fail(Status::MissingProvenance, "solution without recorded forcing");
    const LinearSolution& first = s.layers.front();
    const NullLattice& B = first.lat();
    const int n = first.n();
    const int ma = static_cast<int>(B.m) + m0;
    int idx = 0;
    const LinearSolution& lay = slice_layer(s, ma, idx);
    const NullLattice& L = lay.lat();
    int d = 2 * (ma - static_cast<int>(L.m));
    double lhs_p = 0.0, lhs_m = 0.0;
    std::vector<double> a(n), b(n);
    if (d <= L.D)
        for (int j = 0; j < L.cells_on(d); ++j) {
            int c = L.cell(d, j);
            for (const AffineField* v : {&lay.vp, &lay.vm}) {
                const double* k = v->at(c);
                for (int q = 0; q < n; ++q) {
                    a[q] = k[q];
                    b[q] = k[n + q] + k[2 * n + q];
                }
                (v == &lay.vp ? lhs_p : lhs_m) += euclid_linear_integral(a.data(), b.data(), n, L.h);
            }
        }
    const LineData& D = first.data;
    std::vector<double> g(n);
    double rp = 0.0, rm = 0.0;
    for (int k = 0; k < D.N; ++k) {
        if (k <= D.N - 2 * m0 - 1) {
            for (int q = 0; q < n; ++q) g[q] = D.v_at(k)[q] - D.Du(k, q);
            rp += norm2(g.data(), n) * D.h;
        }
        if (k >= 2 * m0) {
            for (int q = 0; q < n; ++q) g[q] = D.v_at(k)[q] + D.Du(k, q);
            rm += norm2(g.data(), n) * D.h;
        }
    }
    rp += strip_forcing(s, B.J0(), B.J0() + D.N - 2 * m0 - 1, +1, ma);
    rm += strip_forcing(s, B.I0() + 2 * m0, B.I0() + D.N - 1, -1, ma);
    return {make_report("energy_flux_plus", lhs_p, rp, tol), make_report("energy_flux_minus", lhs_m, rm, tol)};
}

EstimateReport pointwise_characteristic_bound(const Solution& s, long I, long J, double ca, double cb, int sign,
                                              double tol) {
    if (s.layers.empty() || s.forcing.size() != s.layers.size())
        fail(Status::MissingProvenance, "solution without recorded forcing");
    const int n = s.n();
    const double h = s.layers.front().lat().h;
    // locate the layer whose cell (I, J) contains the point
    int li = -1, cell = -1, dd = -1;
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
        const NullLattice& L = s.layers[l].lat();
        long j = J - L.J0(), d = (I - J) - 2 * L.m;
        if (d < 0 || d > L.D || j < 0 || j >= L.cells_on(static_cast<int>(d))) continue;
        auto sh = L.shape(static_cast<int>(d));
        if (sh == NullLattice::Shape::Base && ca < cb) continue;
        if (sh == NullLattice::Shape::Top && ca > cb) continue;
        li = static_cast<int>(l);
        cell = L.cell(static_cast<int>(d), static_cast<int>(j));
        dd = static_cast<int>(d);
        break;
    }
    if (li < 0) fail(Status::OutsideDomain, "site outside the solution");
    const LinearSolution& lay = s.layers[li];
    std::vector<double> v(n);
    (sign > 0 ? lay.vp : lay.vm).eval(cell, ca, cb, v.data());
    double lhs = norm2(v.data(), n);

    const LinearSolution& first = s.layers.front();
    const LineData& D = first.data;
    // base cell of the characteristic
    long k = sign > 0 ? J - first.lat().J0() : I - first.lat().I0();
    if (k < 0 || k >= D.N) fail(Status::OutsideDomain, "characteristic leaves the base");
    for (int q = 0; q < n; ++q) v[q] = D.v_at(static_cast<int>(k))[q] - sign * D.Du(static_cast<int>(k), q);
    double rhs = norm2(v.data(), n);
    // forcing along the characteristic, layer by layer up to the site
    for (int l = 0; l <= li; ++l) {
        const NullLattice& L = s.layers[l].lat();
        const Field& f = s.forcing[l];
        for (int d = 0; d <= L.D; ++d) {
            long j = sign > 0 ? J - L.J0() : I - L.I0() - d;
            if (j < 0 || j >= L.cells_on(d)) continue;
            long Ic = L.I0() + j + d, Jc = L.J0() + j;
            bool target = (l == li && d == dd);
            if (!target && ((sign > 0 && Ic > I) || (sign < 0 && Jc < J))) continue;
            if (l == li && d > dd) continue;
            auto sh = L.shape(d);
            double lo, hi; // range of the moving offset inside the cell
            if (sign > 0) {
                lo = sh == NullLattice::Shape::Base ? cb : 0.0;
                hi = sh == NullLattice::Shape::Top ? cb : h;
                if (target) hi = ca;
            } else {
                lo = sh == NullLattice::Shape::Top ? ca : 0.0;
                hi = sh == NullLattice::Shape::Base ? ca : h;
                if (target) lo = cb;
            }
            if (hi > lo) rhs += norm2(f.at(L.cell(d, static_cast<int>(j))), n) * 0.5 * (hi - lo);
        }
    }
    return make_report(sign > 0 ? "pointwise_plus" : "pointwise_minus", lhs, rhs, tol);
}

EstimateReport spacetime_null_energy_check(const Solution& s, double tol) {
    if (s.layers.empty() || s.forcing.size() != s.layers.size())
        fail(Status::MissingProvenance, "solution without recorded forcing");
    const int n = s.n();
    double lhs = 0.0, fm = 0.0;
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
        const LinearSolution& lay = s.layers[l];
        const NullLattice& L = lay.lat();
        for (int d = 0; d <= L.D; ++d) {
            Poly P = cell_poly(L.shape(d), L.h);
            double area = 0.5 * poly_area(P);
            for (int j = 0; j < L.cells_on(d); ++j) {
                int c = L.cell(d, j);
                for (int q = 0; q < n; ++q) {
                    auto p = comp(lay.vp.at(c), n, q);
                    auto m = comp(lay.vm.at(c), n, q);
                    lhs += abs_product(P, p.data(), m.data());
                }
                fm += norm2(s.forcing[l].at(c), n) * area;
            }
        }
    }
    const LineData& D = s.layers.front().data;
    std::vector<double> du(n);
    double base = 0.0;
    for (int k = 0; k < D.N; ++k) {
        for (int q = 0; q < n; ++q) du[q] = D.Du(k, q);
        base += (norm2(du.data(), n) + norm2(D.v_at(k), n)) * D.h;
    }
    double r = base + fm;
    return make_report("spacetime_null_energy", lhs, r * r, tol);
}

const char* checker_name(Checker c) {
    switch (c) {
    case Checker::Transport: return "transport_bound";
    case Checker::Zhou: return "zhou_bilinear";
    case Checker::QBound: return "q_l1_bound";
    case Checker::EnergyFlux: return "energy_flux";
    case Checker::SpacetimeNull: return "spacetime_null_energy";
    }
    return "unknown";
}

namespace {

std::vector<double> random_vec(CounterRng& r, std::size_t size, double amp, double zero_prob) {
    std::vector<double> v(size, 0.0);
    if (r.uniform() < zero_prob) return v;
    for (auto& x : v) x = r.uniform(-amp, amp);
    return v;
}

Field random_field(CounterRng& r, const NullLattice& L, int n, double amp, double zero_prob) {
    Field f = Field::zeros(L, n);
    f.vals = random_vec(r, f.vals.size(), amp, zero_prob);
    return f;
}

NullLattice random_lattice(CounterRng& r, int& m0) {
    const double h = 1.0 / 16;
    int N = 2 * static_cast<int>(r.integer(2, 24));
    int M = static_cast<int>(r.integer(1, N / 2));
    m0 = static_cast<int>(r.integer(0, M));
    return NullLattice::make(0.0, h, -N / 2, 0, N, M);
}

// small compatible sphere-valued data with piecewise-constant forcing, solved by Picard
Solution random_sphere_solution(CounterRng& r, int& m0) {
    const Manifold S = Manifold::sphere(3);
    auto budget = select_budget(1.0, 3.0);
    NullLattice L = random_lattice(r, m0);
    const int n = 3;
    double p[3] = {r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1)};
    double pn = norm2(p, 3) + 1e-3;
    for (double& x : p) x /= pn;
    LineData d = LineData::zeros(0.0, L.h, L.k0, L.N, n);
    double su = r.uniform(0.0, 1.0) * 0.25 * budget.eta / L.N;
    double sv = r.uniform(0.0, 1.0) * 0.2 * budget.eta / (L.N * L.h);
    for (int k = 0; k <= L.N; ++k) {
        double q[3];
        for (int c = 0; c < 3; ++c) q[c] = p[c] + su * r.uniform(-1, 1);
        S.nearest_point(q, d.u_at(k));
    }
    for (int k = 0; k < L.N; ++k) {
        double mid[3], pm[3], w[3];
        for (int c = 0; c < 3; ++c) {
            mid[c] = 0.5 * (d.u_at(k)[c] + d.u_at(k + 1)[c]);
            w[c] = sv * r.uniform(-1, 1);
        }
        S.nearest_point(mid, pm);
        S.tangent_project(pm, w, d.v_at(k));
    }
    double area = 0.0;
    for (int dd = 0; dd <= L.D; ++dd) area += L.area(dd) * L.cells_on(dd);
    Field f = random_field(r, L, n, r.uniform(0.0, 1.0) * 0.2 * budget.eta / area, 0.2);
    return picard_solve_small(S, d, f, budget);
}

EstimateReport worse(const EstimateReport& a, const EstimateReport& b) { return a.slack <= b.slack ? a : b; }

// nonlinear solutions are only discrete approximations: tolerance c h (data mass), c = 4
EstimateReport relax(const EstimateReport& r, double h, double mass, double tol) {
    return make_report(r.name, r.lhs, r.rhs, std::max(tol, 4.0 * h * mass));
}

} // namespace

std::vector<EstimateReport> random_suite(Checker which, int trials, std::uint64_t seed, double tol, int threads) {
    std::vector<EstimateReport> out(static_cast<std::size_t>(std::max(trials, 0)));
    detail::run_parallel(trials, threads, [&](int t) {
        CounterRng r(seed, static_cast<std::uint64_t>(which) * 1000003ULL + static_cast<std::uint64_t>(t));
        int m0 = 0;
        switch (which) {
        case Checker::Transport: {
            NullLattice L = random_lattice(r, m0);
            int n = static_cast<int>(r.integer(1, 3));
            auto g = random_vec(r, static_cast<std::size_t>(L.N) * n, 1.0, 0.2);
            auto f = random_field(r, L, n, 1.0, 0.2);
            out[t] = transport_bound_check(g, f, r.uniform() < 0.5 ? Direction::Plus : Direction::Minus, m0, tol);
            break;
        }
        case Checker::Zhou: {
            NullLattice L = random_lattice(r, m0);
            int n = static_cast<int>(r.integer(1, 3));
            auto gp = random_vec(r, static_cast<std::size_t>(L.N) * n, 1.0, 0.2);
            auto gm = random_vec(r, static_cast<std::size_t>(L.N) * n, 1.0, 0.2);
            auto fp = random_field(r, L, n, 1.0, 0.3);
            auto fm = random_field(r, L, n, 1.0, 0.3);
            out[t] = zhou_bilinear_check(gp, gm, fp, fm, m0, tol);
            break;
        }
        case Checker::QBound: {
            NullLattice L = random_lattice(r, m0);
            int n = static_cast<int>(r.integer(1, 3));
            auto make = [&] {
                LineData d = LineData::zeros(0.0, L.h, L.k0, L.N, n);
                d.u = random_vec(r, d.u.size(), 1.0, 0.1);
                d.v = random_vec(r, d.v.size(), 1.0, 0.2);
                return dalembert_solve(d, random_field(r, L, n, 1.0, 0.3));
            };
            LinearSolution u = make();
            bool pair = r.uniform() < 0.5;
            LinearSolution ub = pair ? make() : LinearSolution{};
            int d = static_cast<int>(r.integer(1, L.Dn));
            int j = static_cast<int>(r.integer(0, L.nodes_on(d) - 1));
            long I = L.I0() + j + d, J = L.J0() + j;
            out[t] = q_l1_bound_check(u, I, J, pair ? &ub : nullptr, tol);
            break;
        }
        case Checker::EnergyFlux: {
            Solution s = random_sphere_solution(r, m0);
            auto [a, b] = energy_flux_check(s, m0, tol);
            EstimateReport w = worse(a, b);
            out[t] = relax(w, s.layers.front().lat().h, a.rhs + b.rhs, tol);
            out[t].name = "energy_flux";
            break;
        }
        case Checker::SpacetimeNull: {
            Solution s = random_sphere_solution(r, m0);
            auto r = spacetime_null_energy_check(s, tol);
            out[t] = relax(r, s.layers.front().lat().h, std::sqrt(r.rhs), tol);
            break;
        }
        }
    });
    return out;
}

} // namespace wavemap
