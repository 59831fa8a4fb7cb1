#include "wavemap/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polygon.hpp"
#include "wavemap/error.hpp"

namespace wavemap {

namespace {

constexpr double kPi = std::numbers::pi;

// values of lattice data by global node / cell index, with the standard extensions
struct Ext {
    const LineData& d;
    const double* u(long g) const { return d.u_at(static_cast<int>(std::clamp<long>(g - d.k0, 0, d.N))); }
    double v(long g, int c) const {
        long k = g - d.k0;
        return (k < 0 || k >= d.N) ? 0.0 : d.v_at(static_cast<int>(k))[c];
    }
    double du(long g, int c) const {
        long k = g - d.k0;
        return (k < 0 || k >= d.N) ? 0.0 : d.Du(static_cast<int>(k), c);
    }
};

long steps(double t, double h) {
    double q = t / h;
    double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) fail(Status::OffLattice, "time is not a lattice time");
    return static_cast<long>(r);
}

void same_line(const LineData& a, const LineData& b) {
    if (a.n != b.n || std::abs(a.h - b.h) > 1e-15 * a.h || std::abs(a.origin - b.origin) > 1e-12 * a.h)
        fail(Status::LatticeMismatch, "data on different lattice lines");
}

void same_line(const LineData& a, const NullLattice& L, int n) {
    if (a.n != n || std::abs(a.h - L.h) > 1e-15 * a.h || std::abs(a.origin - L.origin) > 1e-12 * a.h)
        fail(Status::LatticeMismatch, "forcing and data on different lattices");
}

double norm1(const double* v, int n) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += std::abs(v[c]);
    return s;
}

// the layer holding slice m (the lower one at a layer boundary)
const LinearSolution& layer_at(const Solution& s, int m) {
    for (const auto& l : s.layers) {
        const NullLattice& L = l.lat();
        if (m >= L.m && m <= L.m + L.M) return l;
    }
    fail(Status::OffLattice, "slice outside the solution");
}

SliceTrace slice(const Solution& s, int m) {
    const auto& l = layer_at(s, m);
    return trace(l, m - static_cast<int>(l.lat().m));
}

} // namespace

SliceTrace free_wave(const LineData& data, double t) {
    const long s = steps(t, data.h);
    const long a = std::abs(s);
    const int n = data.n;
    const double h = data.h;
    Ext e{data};
    SliceTrace tr;
    tr.t = t;
    tr.data = LineData::zeros(data.origin, h, data.k0 - a, data.N + 2 * static_cast<int>(a), n);
    tr.ux.assign(static_cast<std::size_t>(tr.data.N) * n, 0.0);
    // prefix integrals of v over cells with global index < g
    std::vector<double> pre(static_cast<std::size_t>(data.N + 1) * n, 0.0);
    for (int k = 0; k < data.N; ++k)
        for (int c = 0; c < n; ++c) pre[(k + 1) * n + c] = pre[k * n + c] + data.v_at(k)[c] * h;
    auto P = [&](long g, int c) { return pre[std::clamp<long>(g - data.k0, 0, data.N) * n + c]; };
    const double sign = s >= 0 ? 1.0 : -1.0;
    for (int k = 0; k <= tr.data.N; ++k) {
        long g = tr.data.k0 + k;
        const double* up = e.u(g + a);
        const double* um = e.u(g - a);
        for (int c = 0; c < n; ++c)
            tr.data.u_at(k)[c] = 0.5 * (up[c] + um[c]) + 0.5 * sign * (P(g + a, c) - P(g - a, c));
    }
    for (int k = 0; k < tr.data.N; ++k) {
        long g = tr.data.k0 + k;
        for (int c = 0; c < n; ++c) {
            double dp = e.du(g + s, c), dm = e.du(g - s, c), vp = e.v(g + s, c), vm = e.v(g - s, c);
            tr.data.v_at(k)[c] = 0.5 * (dp - dm) + 0.5 * (vp + vm);
            tr.ux[k * n + c] = 0.5 * (dp + dm) + 0.5 * (vp - vm);
        }
    }
    return tr;
}

double l11_distance(const LineData& a, const LineData& b) {
    same_line(a, b);
    const int n = a.n;
    long lo = std::min(a.k0, b.k0), hi = std::max(a.k0 + a.N, b.k0 + b.N);
    Ext ea{a}, eb{b};
    double sup = 0.0, du = 0.0, dv = 0.0;
    for (long g = lo; g <= hi; ++g) {
        const double* ua = ea.u(g);
        const double* ub = eb.u(g);
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += std::abs(ua[c] - ub[c]);
        sup = std::max(sup, s);
        if (g == hi) break;
        for (int c = 0; c < n; ++c) {
            du += std::abs(ea.du(g, c) - eb.du(g, c));
            dv += std::abs(ea.v(g, c) - eb.v(g, c));
        }
    }
    return sup + (du + dv) * a.h;
}

ScatteringData scattering_data_rn(const LineData& data, const std::vector<Field>& f, double tail_mass, double tol) {
    if (tail_mass > tol) fail(Status::TailMass, "forcing tail mass beyond the cutoff exceeds the tolerance");
    const int n = data.n;
    const double h = data.h;
    long lo = data.k0, hi = data.k0 + data.N;
    for (const auto& F : f) {
        same_line(data, F.lat, F.n);
        const NullLattice& L = F.lat;
        lo = std::min(lo, L.J0());
        hi = std::max(hi, L.I0() + L.N);
    }
    ScatteringData out;
    LineData& d = out.data;
    d = LineData::zeros(data.origin, h, lo, static_cast<int>(hi - lo), n);
    Ext e{data};
    for (int k = 0; k <= d.N; ++k) std::copy(e.u(lo + k), e.u(lo + k) + n, d.u_at(k));
    for (int k = 0; k < d.N; ++k)
        for (int c = 0; c < n; ++c) d.v_at(k)[c] = e.v(lo + k, c);
    // node increments accumulated as a difference array
    std::vector<double> jump(static_cast<std::size_t>(d.N + 2) * n, 0.0);
    for (const auto& F : f) {
        const NullLattice& L = F.lat;
        for (int dd = 0; dd <= L.D; ++dd) {
            const double A = L.area(dd);
            for (int j = 0; j < L.cells_on(dd); ++j) {
                const double* s = F.at(L.cell(dd, j));
                long I = L.I0() + j + dd - lo, J = L.J0() + j - lo;
                for (int c = 0; c < n; ++c) {
                    double w = 0.5 * s[c] * A;
                    d.v_at(static_cast<int>(I))[c] += w / h;
                    d.v_at(static_cast<int>(J))[c] += w / h;
                    jump[(J + 1) * n + c] -= w;
                    jump[(I + 1) * n + c] += w;
                }
            }
        }
    }
    std::vector<double> acc(n, 0.0);
    for (int k = 0; k <= d.N; ++k)
        for (int c = 0; c < n; ++c) {
            acc[c] += jump[k * n + c];
            d.u_at(k)[c] += acc[c];
        }
    return out;
}

ScatteringData scattering_data_rn(const LineData& data, const PointFn& f, double cutoff_T, double tail_mass,
                                  double tol) {
    long s = steps(cutoff_T, data.h);
    if (s < 1) fail(Status::ConfigError, "cutoff must be at least one lattice step");
    auto L = NullLattice::make(data.origin, data.h, data.k0 - 2 * s, 0, data.N + 4 * static_cast<int>(s),
                               static_cast<int>(s));
    return scattering_data_rn(data, std::vector<Field>{sample_field(L, data.n, f)}, tail_mass, tol);
}

LineData pull_back(const Solution& s, int m) {
    SliceTrace tr = slice(s, m);
    return free_wave(tr.data, -tr.t).data;
}

DefectTriple scattering_defect(const Solution& s, const ScatteringData& Ld, int m) {
    SliceTrace tr = slice(s, m);
    same_line(tr.data, Ld.data);
    SliceTrace fw = free_wave(Ld.data, tr.t);
    const int n = tr.data.n;
    const LineData& a = tr.data;
    const LineData& b = fw.data;
    Ext eb{b};
    DefectTriple r;
    r.t = tr.t;
    for (int k = 0; k <= a.N; ++k) {
        const double* ub = eb.u(a.k0 + k);
        double x = 0.0;
        for (int c = 0; c < n; ++c) x += std::abs(a.u_at(k)[c] - ub[c]);
        r.sup = std::max(r.sup, x);
    }
    for (int k = 0; k < a.N; ++k) {
        long kb = a.k0 + k - b.k0;
        bool in = kb >= 0 && kb < b.N;
        for (int c = 0; c < n; ++c) {
            double vt = in ? b.v_at(static_cast<int>(kb))[c] : 0.0;
            double vx = in ? fw.ux[kb * n + c] : 0.0;
            r.l1_ut += std::abs(a.v_at(k)[c] - vt) * a.h;
            r.l1_ux += std::abs(tr.ux[k * n + c] - vx) * a.h;
        }
    }
    return r;
}

std::vector<DefectTriple> defect_series(const Solution& s, const ScatteringData& L, int m_from, int m_to) {
    std::vector<DefectTriple> out;
    for (int m = m_from; m <= m_to; ++m) out.push_back(scattering_defect(s, L, m));
    return out;
}

CompactifiedProblem compactify(const LineData& data, const std::vector<Field>& f, int N, const Manifold* M) {
    if (N < 2 || N % 2) fail(Status::ConfigError, "compactified lattice needs an even number of cells");
    const int n = data.n;
    const double hc = kPi / N;
    CompactifiedProblem cp;
    cp.lat = NullLattice::make(-0.5 * kPi, hc, 0, 0, N, N / 2);
    auto X = [&](long k) { return -0.5 * kPi + static_cast<double>(k) * hc; };
    cp.data = LineData::zeros(-0.5 * kPi, hc, 0, N, n);
    for (int k = 0; k <= N; ++k) {
        if (k == 0) std::copy(data.u_at(0), data.u_at(0) + n, cp.data.u_at(k));
        else if (k == N) std::copy(data.u_at(data.N), data.u_at(data.N) + n, cp.data.u_at(k));
        else data.eval_u(std::tan(X(k)), cp.data.u_at(k));
    }
    // primitive of v0, exact for piecewise-constant v0
    std::vector<double> pre(static_cast<std::size_t>(data.N + 1) * n, 0.0);
    for (int k = 0; k < data.N; ++k)
        for (int c = 0; c < n; ++c) pre[(k + 1) * n + c] = pre[k * n + c] + data.v_at(k)[c] * data.h;
    auto prim = [&](int k, int c) {
        if (k == 0) return 0.0;
        if (k == N) return pre[data.N * n + c];
        double q = (std::tan(X(k)) - data.x(0)) / data.h;
        if (q <= 0.0) return 0.0;
        if (q >= data.N) return pre[data.N * n + c];
        int i = static_cast<int>(std::floor(q));
        return pre[i * n + c] + (q - i) * data.v_at(i)[c] * data.h;
    };
    std::vector<double> mid(n), p(n), w(n);
    for (int k = 0; k < N; ++k) {
        for (int c = 0; c < n; ++c) w[c] = (prim(k + 1, c) - prim(k, c)) / hc;
        if (M) {
            for (int c = 0; c < n; ++c) mid[c] = 0.5 * (cp.data.u_at(k)[c] + cp.data.u_at(k + 1)[c]);
            M->nearest_point(mid.data(), p.data());
            M->tangent_project(p.data(), w.data(), cp.data.v_at(k));
        } else {
            std::copy(w.begin(), w.end(), cp.data.v_at(k));
        }
    }

    // forcing: exact overlap of the physical cells with the preimages of compact cells
    cp.F = Field::zeros(cp.lat, n);
    auto idx = [&](double y) {
        return std::clamp(static_cast<int>(std::floor((std::atan(y) + 0.5 * kPi) / hc)), 0, N - 1);
    };
    using detail::Poly;
    for (const auto& F : f) {
        const NullLattice& L = F.lat;
        if (F.n != n) fail(Status::LatticeMismatch, "forcing and data dimensions differ");
        cp.forcing_norm += l1_norm(F);
        for (int d = 0; d <= L.D; ++d) {
            Poly shape;
            switch (L.shape(d)) {
            case NullLattice::Shape::Base: shape = {{0, 0}, {L.h, 0}, {L.h, L.h}}; break;
            case NullLattice::Shape::Top: shape = {{0, 0}, {L.h, L.h}, {0, L.h}}; break;
            default: shape = {{0, 0}, {L.h, 0}, {L.h, L.h}, {0, L.h}};
            }
            for (int j = 0; j < L.cells_on(d); ++j) {
                const double* s = F.at(L.cell(d, j));
                if (norm1(s, n) == 0.0) continue;
                const double a0 = L.a(j + d), b0 = L.b(j);
                Poly P = shape;
                for (auto& q : P) {
                    q[0] += a0;
                    q[1] += b0;
                }
                int p_lo = idx(a0), p_hi = idx(a0 + L.h), q_lo = idx(b0), q_hi = idx(b0 + L.h);
                for (int pa = p_lo; pa <= p_hi; ++pa)
                    for (int qb = q_lo; qb <= std::min(q_hi, pa); ++qb) {
                        Poly Q = P;
                        if (pa > 0) Q = detail::clip(Q, -std::tan(X(pa)), 1.0, 0.0, +1);
                        if (pa + 1 < N && !Q.empty()) Q = detail::clip(Q, std::tan(X(pa + 1)), -1.0, 0.0, +1);
                        if (qb > 0 && !Q.empty()) Q = detail::clip(Q, -std::tan(X(qb)), 0.0, 1.0, +1);
                        if (qb + 1 < N && !Q.empty()) Q = detail::clip(Q, std::tan(X(qb + 1)), 0.0, -1.0, +1);
                        if (pa == qb && !Q.empty()) Q = detail::clip(Q, 0.0, 1.0, -1.0, +1);
                        if (Q.empty()) continue;
                        double area = 0.5 * detail::poly_area(Q);
                        double* out = cp.F.at(cp.lat.cell(pa - qb, qb));
                        for (int c = 0; c < n; ++c) out[c] += s[c] * area;
                    }
            }
        }
    }
    for (int d = 0; d <= cp.lat.D; ++d) {
        double A = cp.lat.area(d);
        for (int j = 0; j < cp.lat.cells_on(d); ++j) {
            double* out = cp.F.at(cp.lat.cell(d, j));
            for (int c = 0; c < n; ++c) out[c] /= A;
        }
    }
    cp.data_norm = l11_norm(data);
    cp.compact_data_norm = l11_norm(cp.data);
    cp.compact_forcing_norm = l1_norm(cp.F);
    return cp;
}

MScattering scatter_m_valued(const Manifold& M, const LineData& data, const std::vector<Field>& f, int N,
                             const LineData& out, const SolverOptions& opt) {
    MScattering r;
    r.problem = compactify(data, f, N, &M);
    const CompactifiedProblem& cp = r.problem;
    const double hc = cp.lat.h;
    const int n = data.n;
    const Field& F = cp.F;
    PointFn lookup = [&](double T, double Xc, double* o) {
        int p = std::clamp(static_cast<int>(std::floor((Xc + T + 0.5 * kPi) / hc)), 0, N - 1);
        int q = std::clamp(static_cast<int>(std::floor((Xc - T + 0.5 * kPi) / hc)), 0, p);
        const double* s = F.at(cp.lat.cell(p - q, q));
        std::copy(s, s + n, o);
    };
    r.compact = solve_global(M, cp.data, lookup, Trapezoid::compact(0.0, 0.5 * kPi, 0.5 * kPi), opt);
    // null-infinity edges: Phi(A) = U(A, -pi/2), Psi(B) = U(pi/2, B)
    std::vector<double> Phi(static_cast<std::size_t>(N + 1) * n), Psi(Phi.size());
    for (int k = 0; k <= N; ++k) {
        const double* l = r.compact.find_node(k, 0);
        const double* rr = r.compact.find_node(N, k);
        if (!l || !rr) fail(Status::Internal, "edge node missing from the compactified solution");
        std::copy(l, l + n, Phi.begin() + static_cast<std::ptrdiff_t>(k) * n);
        std::copy(rr, rr + n, Psi.begin() + static_cast<std::ptrdiff_t>(k) * n);
    }
    const double* c = r.compact.find_node(N, 0);
    auto interp = [&](const std::vector<double>& E, double x, double* o) {
        double pos = (std::atan(x) + 0.5 * kPi) / hc;
        int i = std::clamp(static_cast<int>(std::floor(pos)), 0, N - 1);
        double fr = std::clamp(pos - i, 0.0, 1.0);
        for (int q = 0; q < n; ++q) o[q] = (1.0 - fr) * E[i * n + q] + fr * E[(i + 1) * n + q];
    };
    LineData& d = r.data_L.data;
    d = LineData::zeros(out.origin, out.h, out.k0, out.N, n);
    std::vector<double> ph((out.N + 1) * static_cast<std::size_t>(n)), ps(ph.size());
    for (int k = 0; k <= out.N; ++k) {
        interp(Phi, out.x(k), ph.data() + static_cast<std::ptrdiff_t>(k) * n);
        interp(Psi, out.x(k), ps.data() + static_cast<std::ptrdiff_t>(k) * n);
        for (int q = 0; q < n; ++q) d.u_at(k)[q] = ph[k * n + q] + ps[k * n + q] - c[q];
    }
    for (int k = 0; k < out.N; ++k)
        for (int q = 0; q < n; ++q)
            d.v_at(k)[q] = ((ph[(k + 1) * n + q] - ph[k * n + q]) - (ps[(k + 1) * n + q] - ps[k * n + q])) / out.h;
    return r;
}

std::vector<EstimateReport> support_cone_check(const Solution& s, double S, double tol) {
    const int n = s.n();
    double maxp = 0.0, maxm = 0.0, maxc = 0.0;
    const double* ref[3] = {nullptr, nullptr, nullptr}; // left, right, top
    std::vector<double> v(n);
    for (const auto& l : s.layers) {
        const NullLattice& L = l.lat();
        const double eps = 1e-9 * L.h;
        for (int d = 0; d <= L.D; ++d) {
            double ca, cb;
            L.centroid(d, ca, cb);
            for (int j = 0; j < L.cells_on(d); ++j) {
                double a0 = L.a(j + d), b0 = L.b(j);
                int cell = L.cell(d, j);
                if (b0 + L.h <= -S + eps || b0 >= S - eps) {
                    l.vp.eval(cell, ca, cb, v.data());
                    maxp = std::max(maxp, norm1(v.data(), n));
                }
                if (a0 + L.h <= -S + eps || a0 >= S - eps) {
                    l.vm.eval(cell, ca, cb, v.data());
                    maxm = std::max(maxm, norm1(v.data(), n));
                }
            }
        }
        for (int d = 0; d <= L.Dn; ++d)
            for (int j = 0; j < L.nodes_on(d); ++j) {
                double a = L.a(j + d), b = L.b(j);
                int region = a <= -S + eps ? 0 : b >= S - eps ? 1 : (a >= S - eps && b <= -S + eps) ? 2 : -1;
                if (region < 0) continue;
                const double* u = l.node(d, j);
                if (!ref[region]) ref[region] = u;
                double x = 0.0;
                for (int c = 0; c < n; ++c) x += std::abs(u[c] - ref[region][c]);
                maxc = std::max(maxc, x);
            }
    }
    return {make_report("support_plus", maxp, 0.0, tol), make_report("support_minus", maxm, 0.0, tol),
            make_report("support_constant", maxc, 0.0, tol)};
}

} // namespace wavemap
