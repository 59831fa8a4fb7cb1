#include "wavemap/fields.hpp"

#include <algorithm>
#include <cmath>

#include "march.hpp"
#include "wavemap/error.hpp"

namespace wavemap {

LineData LineData::zeros(double origin, double h, long k0, int N, int n) {
    LineData d;
    d.origin = origin;
    d.h = h;
    d.k0 = k0;
    d.N = N;
    d.n = n;
    d.u.assign(static_cast<std::size_t>(N + 1) * n, 0.0);
    d.v.assign(static_cast<std::size_t>(N) * n, 0.0);
    return d;
}

LineData LineData::restrict_to(int k_lo, int k_hi) const {
    if (k_lo < 0 || k_hi > N || k_lo >= k_hi) fail(Status::DataCoverage, "restriction outside the data interval");
    LineData d = zeros(origin, h, k0 + k_lo, k_hi - k_lo, n);
    std::copy(u.begin() + static_cast<long>(k_lo) * n, u.begin() + static_cast<long>(k_hi + 1) * n, d.u.begin());
    std::copy(v.begin() + static_cast<long>(k_lo) * n, v.begin() + static_cast<long>(k_hi) * n, d.v.begin());
    return d;
}

void LineData::eval_u(double xq, double* out) const {
    double s = (xq - x(0)) / h;
    if (!(s > 0.0)) {
        std::copy(u_at(0), u_at(0) + n, out);
        return;
    }
    if (s >= N) {
        std::copy(u_at(N), u_at(N) + n, out);
        return;
    }
    int k = std::min(static_cast<int>(std::floor(s)), N - 1);
    double w = s - k;
    for (int c = 0; c < n; ++c) out[c] = (1.0 - w) * u_at(k)[c] + w * u_at(k + 1)[c];
}

double sup_norm(const LineData& d) {
    double s = 0.0;
    for (int k = 0; k <= d.N; ++k) {
        double a = 0.0;
        for (int c = 0; c < d.n; ++c) a += std::abs(d.u_at(k)[c]);
        s = std::max(s, a);
    }
    return s;
}

double w11_seminorm(const LineData& d) {
    double s = 0.0;
    for (int k = 0; k < d.N; ++k)
        for (int c = 0; c < d.n; ++c) s += std::abs(d.u_at(k + 1)[c] - d.u_at(k)[c]);
    return s;
}

double l1_norm_v(const LineData& d) {
    double s = 0.0;
    for (double x : d.v) s += std::abs(x);
    return s * d.h;
}

double l11_norm(const LineData& d) { return sup_norm(d) + w11_seminorm(d) + l1_norm_v(d); }

double char_mass(const LineData& d, int sign) {
    double s = 0.0;
    for (int k = 0; k < d.N; ++k)
        for (int c = 0; c < d.n; ++c) s += std::abs(d.v_at(k)[c] + sign * d.Du(k, c));
    return s * d.h;
}

NullLattice NullLattice::make(double origin, double h, long k0, long m, int N, int M) {
    if (!(h > 0.0) || N < 1 || M < 1) fail(Status::ConfigError, "lattice needs h > 0, N >= 1, M >= 1");
    NullLattice L;
    L.origin = origin;
    L.h = h;
    L.k0 = k0;
    L.m = m;
    L.N = N;
    L.M = M;
    L.D = std::min(2 * M, N - 1);
    L.Dn = std::min(2 * M, N);
    L.cell_off.resize(L.D + 2);
    L.cell_off[0] = 0;
    for (int d = 0; d <= L.D; ++d) L.cell_off[d + 1] = L.cell_off[d] + (N - d);
    L.node_off.resize(L.Dn + 2);
    L.node_off[0] = 0;
    for (int d = 0; d <= L.Dn; ++d) L.node_off[d + 1] = L.node_off[d] + (N - d + 1);
    return L;
}

NullLattice::Shape NullLattice::shape(int d) const {
    if (d == 0) return Shape::Base;
    if (d == 2 * M) return Shape::Top;
    return Shape::Full;
}

double NullLattice::area(int d) const { return shape(d) == Shape::Full ? 0.5 * h * h : 0.25 * h * h; }

void NullLattice::centroid(int d, double& ca, double& cb) const {
    switch (shape(d)) {
    case Shape::Full: ca = 0.5 * h; cb = 0.5 * h; return;
    case Shape::Base: ca = 2.0 * h / 3.0; cb = h / 3.0; return;
    case Shape::Top: ca = h / 3.0; cb = 2.0 * h / 3.0; return;
    }
}

void NullLattice::point(int d, int j, double ca, double cb, double& t, double& x) const {
    double av = a(j + d) + ca;
    double bv = b(j) + cb;
    t = 0.5 * (av - bv);
    x = 0.5 * (av + bv);
}

Trapezoid NullLattice::trapezoid() const {
    double L = 0.5 * N * h;
    return Trapezoid::compact(x_base(0) + L, L, std::min(static_cast<double>(M) * h, L));
}

bool NullLattice::same_as(const NullLattice& o) const {
    return origin == o.origin && h == o.h && k0 == o.k0 && m == o.m && N == o.N && M == o.M;
}

NullLattice NullLattice::sub(int k_lo, int k_hi, int Mh) const {
    if (k_lo < 0 || k_hi > N || k_lo >= k_hi) fail(Status::RegionMismatch, "sub-lattice outside the lattice");
    return make(origin, h, k0 + k_lo, m, k_hi - k_lo, std::min(Mh, M));
}

bool NullLattice::contains_lattice(const NullLattice& o) const {
    return origin == o.origin && h == o.h && m == o.m && o.k0 >= k0 && o.k0 + o.N <= k0 + N && o.M <= M;
}

Field Field::zeros(const NullLattice& lat, int n) {
    Field f;
    f.lat = lat;
    f.n = n;
    f.vals.assign(static_cast<std::size_t>(lat.num_cells()) * n, 0.0);
    return f;
}

Field Field::restrict_to(const NullLattice& s) const {
    if (!lat.contains_lattice(s)) fail(Status::LatticeMismatch, "restriction to a lattice that is not contained");
    Field f = zeros(s, n);
    int off = static_cast<int>(s.k0 - lat.k0);
    for (int d = 0; d <= s.D; ++d)
        for (int j = 0; j < s.cells_on(d); ++j)
            std::copy(at(lat.cell(d, j + off)), at(lat.cell(d, j + off)) + n, f.at(s.cell(d, j)));
    return f;
}

AffineField AffineField::zeros(const NullLattice& lat, int n) {
    AffineField f;
    f.lat = lat;
    f.n = n;
    f.coef.assign(static_cast<std::size_t>(lat.num_cells()) * 3 * n, 0.0);
    return f;
}

void AffineField::eval(int c, double ca, double cb, double* out) const { detail::eval_affine(at(c), n, ca, cb, out); }

void LinearSolution::u_in_cell(int d, int j, double ca, double cb, double* out) const {
    int c = lat().cell(d, j);
    detail::u_offset(node(d, j), vp.at(c), vm.at(c), n(), ca, cb, out);
}

double l1_norm(const Field& f) {
    double s = 0.0;
    const NullLattice& L = f.lat;
    for (int d = 0; d <= L.D; ++d) {
        double part = 0.0;
        for (int j = 0; j < L.cells_on(d); ++j) {
            const double* p = f.at(L.cell(d, j));
            for (int c = 0; c < f.n; ++c) part += std::abs(p[c]);
        }
        s += part * L.area(d);
    }
    return s;
}

static long snap_index(double v, const char* what) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9) fail(Status::RegionMismatch, std::string("region not aligned with the lattice: ") + what);
    return static_cast<long>(r);
}

double l1_norm(const Field& f, const Trapezoid& region) {
    const NullLattice& L = f.lat;
    if (region.kind != Trapezoid::Kind::Compact) fail(Status::RegionMismatch, "region must be compact");
    long ks = snap_index((region.x0 - region.L - L.x_base(0)) / L.h, "base start");
    long ke = snap_index((region.x0 + region.L - L.x_base(0)) / L.h, "base end");
    long dt = snap_index(2.0 * region.height / L.h, "height");
    if (ks < 0 || ke > L.N || ks >= ke) fail(Status::RegionMismatch, "region base outside the lattice");
    if (dt > 2L * L.M) fail(Status::RegionMismatch, "region taller than the lattice");
    double s = 0.0;
    for (int d = 0; d <= L.D && d <= dt; ++d) {
        double part = 0.0;
        for (long j = ks; j + d <= ke - 1; ++j) {
            const double* p = f.at(L.cell(d, static_cast<int>(j)));
            for (int c = 0; c < f.n; ++c) part += std::abs(p[c]);
        }
        double area = (d == 0 || d == dt) ? 0.25 * L.h * L.h : 0.5 * L.h * L.h;
        if (d == 0 && dt == 0) area = 0.0;
        s += part * area;
    }
    return s;
}

AffineField transport_field(const std::vector<double>& g, const Field& f, int sign) {
    const NullLattice& L = f.lat;
    const int n = f.n;
    if (g.size() != static_cast<std::size_t>(L.N) * n) fail(Status::DataCoverage, "transport data does not cover the base");
    AffineField out = AffineField::zeros(L, n);
    std::vector<double> sums(static_cast<std::size_t>(L.N) * n, 0.0);
    for (int d = 0; d <= L.D; ++d) {
        for (int j = 0; j < L.cells_on(d); ++j) {
            int i = j + d;
            int c = L.cell(d, j);
            if (sign > 0) {
                double* sum = sums.data() + static_cast<std::size_t>(j) * n;
                detail::plus_coef(d, n, L.h, g.data() + static_cast<std::size_t>(j) * n, f.at(L.cell(0, j)), f.at(c), sum, out.at(c));
                if (d > 0)
                    for (int k = 0; k < n; ++k) sum[k] += f.at(c)[k];
            } else {
                double* sum = sums.data() + static_cast<std::size_t>(i) * n;
                detail::minus_coef(d, n, L.h, g.data() + static_cast<std::size_t>(i) * n, f.at(L.cell(0, i)), f.at(c), sum, out.at(c));
                if (d > 0)
                    for (int k = 0; k < n; ++k) sum[k] += f.at(c)[k];
            }
        }
    }
    return out;
}

std::pair<AffineField, AffineField> characteristic_derivatives(const LineData& data, const Field& h) {
    const NullLattice& L = h.lat;
    if (data.N != L.N || data.n != h.n || data.k0 != L.k0 || data.h != L.h)
        fail(Status::DataCoverage, "data interval does not match the lattice base");
    const int n = h.n;
    std::vector<double> gp(static_cast<std::size_t>(L.N) * n), gm(gp.size());
    for (int k = 0; k < L.N; ++k)
        for (int c = 0; c < n; ++c) {
            double du = data.Du(k, c);
            gp[k * n + c] = data.v_at(k)[c] - du;
            gm[k * n + c] = data.v_at(k)[c] + du;
        }
    return {transport_field(gp, h, +1), transport_field(gm, h, -1)};
}

SliceTrace trace(const LinearSolution& s, int m_rel) {
    const NullLattice& L = s.lat();
    const int n = s.n();
    SliceTrace tr;
    tr.t = L.t_base() + static_cast<double>(m_rel) * L.h;
    if (m_rel < 0) fail(Status::OffLattice, "negative slice index");
    if (m_rel == 0) {
        tr.data = s.data;
        tr.ux.resize(static_cast<std::size_t>(L.N) * n);
        for (int k = 0; k < L.N; ++k)
            for (int c = 0; c < n; ++c) tr.ux[k * n + c] = s.data.Du(k, c);
        return tr;
    }
    int d = 2 * m_rel;
    if (d > L.Dn) fail(Status::OffLattice, "slice above the lattice");
    int segs = L.N - d;
    tr.data = LineData::zeros(L.origin, L.h, L.k0 + m_rel, segs, n);
    for (int j = 0; j <= segs; ++j) std::copy(s.node(d, j), s.node(d, j) + n, tr.data.u_at(j));
    tr.ux.resize(static_cast<std::size_t>(segs) * n);
    std::vector<double> p(n), q(n);
    for (int j = 0; j < segs; ++j) {
        int c = L.cell(d, j);
        s.vp.eval(c, 0.5 * L.h, 0.5 * L.h, p.data());
        s.vm.eval(c, 0.5 * L.h, 0.5 * L.h, q.data());
        for (int k = 0; k < n; ++k) {
            tr.data.v_at(j)[k] = 0.5 * (p[k] + q[k]);
            tr.ux[j * n + k] = 0.5 * (q[k] - p[k]);
        }
    }
    return tr;
}

double abs_linear_integral(double p, double q, double len) {
    double e = p + q * len;
    if ((p >= 0.0 && e >= 0.0) || (p <= 0.0 && e <= 0.0)) return 0.5 * std::abs(p + e) * len;
    double r = -p / q; // root inside (0, len)
    return 0.5 * (std::abs(p) * r + std::abs(e) * (len - r));
}

double h_norm(const LinearSolution& s, const LinearSolution* other) {
    const NullLattice& L = s.lat();
    const int n = s.n();
    if (other && !other->lat().same_as(L)) fail(Status::LatticeMismatch, "h_norm of solutions on different lattices");
    double sup = 0.0;
    for (int d = 0; d <= L.Dn; ++d)
        for (int j = 0; j < L.nodes_on(d); ++j) {
            double a = 0.0;
            for (int c = 0; c < n; ++c) a += std::abs(s.node(d, j)[c] - (other ? other->node(d, j)[c] : 0.0));
            sup = std::max(sup, a);
        }
    double best = 0.0;
    for (int d = 0; d <= L.D; d += 2) {
        double acc = 0.0;
        for (int j = 0; j < L.cells_on(d); ++j) {
            int c = L.cell(d, j);
            const double* kp = s.vp.at(c);
            const double* km = s.vm.at(c);
            for (int k = 0; k < n; ++k) {
                double pa = kp[k], ps = kp[n + k] + kp[2 * n + k];
                double ma = km[k], ms = km[n + k] + km[2 * n + k];
                if (other) {
                    const double* op = other->vp.at(c);
                    const double* om = other->vm.at(c);
                    pa -= op[k];
                    ps -= op[n + k] + op[2 * n + k];
                    ma -= om[k];
                    ms -= om[n + k] + om[2 * n + k];
                }
                acc += abs_linear_integral(0.5 * (pa + ma), 0.5 * (ps + ms), L.h);
                acc += abs_linear_integral(0.5 * (ma - pa), 0.5 * (ms - ps), L.h);
            }
        }
        best = std::max(best, acc);
    }
    return sup + best;
}

} // namespace wavemap

namespace wavemap {

NullLattice lattice_for(const Trapezoid& K, double h, double origin) {
    if (K.kind != Trapezoid::Kind::Compact) fail(Status::ConfigError, "lattice needs a compact trapezoid");
    if (!(h > 0.0)) fail(Status::ConfigError, "lattice spacing must be positive");
    auto snap = [&](double v, const char* what) {
        double r = std::round(v);
        if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
            fail(Status::ConfigError, std::string("lattice spacing does not divide the ") + what);
        return static_cast<long>(r);
    };
    long k0 = snap((K.x0 - K.L - origin) / h, "base offset");
    long N = snap(2.0 * K.L / h, "base length");
    long M = snap(K.height / h, "height");
    if (M < 1) fail(Status::ConfigError, "height must be at least one lattice step");
    return NullLattice::make(origin, h, k0, 0, static_cast<int>(N), static_cast<int>(M));
}

LineData sample_line(double origin, double h, long k0, int N, int n, const LineFn& u, const LineFn& v) {
    LineData d = LineData::zeros(origin, h, k0, N, n);
    for (int k = 0; k <= N; ++k) u(d.x(k), d.u_at(k));
    // 3-point Gauss average per cell
    static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    std::vector<double> tmp(n);
    for (int k = 0; k < N; ++k) {
        double* out = d.v_at(k);
        std::fill(out, out + n, 0.0);
        double c = 0.5 * (d.x(k) + d.x(k + 1));
        for (int q = 0; q < 3; ++q) {
            v(c + 0.5 * h * gx[q], tmp.data());
            for (int i = 0; i < n; ++i) out[i] += gw[q] * tmp[i];
        }
    }
    return d;
}

LineData sample_line(const NullLattice& lat, int n, const LineFn& u, const LineFn& v) {
    return sample_line(lat.origin, lat.h, lat.k0, lat.N, n, u, v);
}

Field sample_field(const NullLattice& lat, int n, const PointFn& f) {
    Field F = Field::zeros(lat, n);
    if (!f) return F;
    for (int d = 0; d <= lat.D; ++d) {
        double ca, cb;
        lat.centroid(d, ca, cb);
        for (int j = 0; j < lat.cells_on(d); ++j) {
            double t, x;
            lat.point(d, j, ca, cb, t, x);
            f(t, x, F.at(lat.cell(d, j)));
        }
    }
    return F;
}

} // namespace wavemap
