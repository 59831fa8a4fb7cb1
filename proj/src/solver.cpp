#include "wavemap/solver.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "march.hpp"
#include "parallel.hpp"
#include "wavemap/error.hpp"

namespace wavemap {

ContractionBudget select_budget(double gamma, double L_lip) {
    if (!(gamma > 0.0) || !(L_lip > 0.0) || !std::isfinite(gamma) || !std::isfinite(L_lip))
        fail(Status::BudgetInfeasible, "budget constants must be positive and finite");
    ContractionBudget b;
    b.gamma = gamma;
    b.L_lip = L_lip;
    bool found = false;
    for (int k = 0; k < 1100; ++k) {
        double R = std::ldexp(1.0, -k) / gamma;
        if (R == 0.0) break;
        if (4.0 * gamma * R <= 0.25 && 4.0 * R * R <= R / gamma) {
            b.R = R;
            found = true;
            break;
        }
    }
    if (!found) fail(Status::BudgetInfeasible, "no admissible R");
    for (int m = 0; m < 1100; ++m) {
        b.eta = std::ldexp(1.0, -m);
        if (b.eta == 0.0) break;
        if (check_budget(b).ok) return b;
    }
    fail(Status::BudgetInfeasible, "eta underflows");
}

BudgetCheck check_budget(const ContractionBudget& b) {
    BudgetCheck c;
    double s = b.eta + b.R;
    c.invariance = s * s + b.eta - b.R / b.gamma;
    c.sufficient = 2.0 * b.eta * b.eta + 2.0 * b.R * b.R + b.eta - b.R / b.gamma;
    c.contraction = b.L_lip * s * s + 5.0 * b.gamma * b.eta + 4.0 * b.gamma * b.R - 0.5;
    c.ok = c.invariance <= 0.0 && c.sufficient <= 0.0 && c.contraction < 0.0;
    return c;
}

const char* path_name(Path p) {
    switch (p) {
    case Path::SmallData: return "SmallData";
    case Path::Tiled: return "Tiled";
    case Path::Continued: return "Continued";
    case Path::Concatenated: return "Concatenated";
    }
    return "Unknown";
}

ContractionBudget budget_for(const Manifold& M, const SolverOptions& opt) {
    if (opt.budget) return *opt.budget;
    return select_budget(M.sup_bound_gamma, M.lipschitz_bound_L);
}

namespace {

// the cell with global indices (I, J) in some layer of s, with its layer
const LinearSolution* find_cell(const Solution& s, long I, long J, int& c, bool prefer_top) {
    const LinearSolution* hit = nullptr;
    for (const auto& l : s.layers) {
        const NullLattice& L = l.lat();
        long j = J - L.J0();
        long d = (I - J) - 2 * L.m;
        if (d < 0 || d > L.D || j < 0 || j >= L.cells_on(static_cast<int>(d))) continue;
        c = L.cell(static_cast<int>(d), static_cast<int>(j));
        hit = &l;
        if (prefer_top) return hit;
    }
    return hit;
}

} // namespace

double solution_distance(const Solution& A, const Solution& B) {
    const int n = B.n();
    double sup = 0.0;
    for (const auto& l : B.layers) {
        const NullLattice& L = l.lat();
        for (int d = 0; d <= L.Dn; ++d)
            for (int j = 0; j < L.nodes_on(d); ++j) {
                const double* p = A.find_node(L.I0() + j + d, L.J0() + j);
                if (!p) continue;
                double e = 0.0;
                for (int c = 0; c < n; ++c) e += std::abs(p[c] - l.node(d, j)[c]);
                sup = std::max(sup, e);
            }
    }
    double best = 0.0;
    for (const auto& l : B.layers) {
        const NullLattice& L = l.lat();
        const double h = L.h;
        for (int d = 0; d <= L.D; d += 2)
            for (int pass = 0; pass < 2; ++pass) {
                double acc = 0.0;
                bool any = false;
                for (int j = 0; j < L.cells_on(d); ++j) {
                    long I = L.I0() + j + d, J = L.J0() + j;
                    int ca = 0;
                    const LinearSolution* la = find_cell(A, I, J, ca, pass == 0);
                    if (!la) continue;
                    any = true;
                    int cb = L.cell(d, j);
                    const double* pa = la->vp.at(ca);
                    const double* ma = la->vm.at(ca);
                    const double* pb = l.vp.at(cb);
                    const double* mb = l.vm.at(cb);
                    // along the slice alpha = beta = s: value alpha0 + (beta + gamma) s
                    for (int c = 0; c < n; ++c) {
                        double dp0 = pa[c] - pb[c], dp1 = (pa[n + c] + pa[2 * n + c]) - (pb[n + c] + pb[2 * n + c]);
                        double dm0 = ma[c] - mb[c], dm1 = (ma[n + c] + ma[2 * n + c]) - (mb[n + c] + mb[2 * n + c]);
                        acc += abs_linear_integral(0.5 * (dp0 + dm0), 0.5 * (dp1 + dm1), h);
                        acc += abs_linear_integral(0.5 * (dm0 - dp0), 0.5 * (dm1 - dp1), h);
                    }
                }
                if (any) best = std::max(best, acc);
            }
    }
    return sup + best;
}

std::pair<long, long> null_index(double t, double x, double h, double origin) {
    return {std::lround((x + t - origin) / h), std::lround((x - t - origin) / h)};
}

namespace {

const double* node_on(const LinearSolution& s, long I, long J) {
    const NullLattice& L = s.lat();
    long j = J - L.J0();
    long d = (I - J) - 2 * L.m;
    if (d < 0 || d > L.Dn || j < 0 || j >= L.nodes_on(static_cast<int>(d))) return nullptr;
    return s.node(static_cast<int>(d), static_cast<int>(j));
}

// Gamma(u)(Q) + P(u) f with Q = (v+ v-^T + v- v+^T)/2
void phi_cell(const Manifold& M, int n, const double* uc, const double* p, const double* m, const double* fc,
              double* out, double* t1, double* t2, double* t3) {
    M.gamma_ext(uc, p, m, t1);
    M.gamma_ext(uc, m, p, t2);
    M.forcing_ext(uc, fc, t3);
    for (int c = 0; c < n; ++c) out[c] = 0.5 * (t1[c] + t2[c]) + t3[c];
}

void check_base(const LineData& data, const NullLattice& L, int n) {
    if (data.N != L.N || data.n != n || data.k0 != L.k0 || data.h != L.h || data.origin != L.origin)
        fail(Status::DataCoverage, "data do not cover the base of the lattice");
}

double l1_diff(const Field& a, const Field& b) {
    const NullLattice& L = a.lat;
    double acc = 0.0;
    for (int d = 0; d <= L.D; ++d) {
        double s = 0.0;
        for (int j = 0; j < L.cells_on(d); ++j) {
            int c = L.cell(d, j);
            for (int k = 0; k < a.n; ++k) s += std::abs(a.at(c)[k] - b.at(c)[k]);
        }
        acc += s * L.area(d);
    }
    return acc;
}

struct Masses {
    double plus = 0.0, minus = 0.0, forcing = 0.0;
};

Masses masses(const LineData& data, const Field& f) {
    return {char_mass(data, +1), char_mass(data, -1), l1_norm(f)};
}

bool is_small(const Masses& m, double eta) { return m.plus <= eta && m.minus <= eta && m.forcing <= eta; }

// Cell-by-cell pass in causal order: every cell value is the fixed point of Phi
// restricted to that cell, with everything in its past already final.  The
// arithmetic matches dalembert_solve, so values depend only on the causal past.
Field causal_settle(const Manifold& M, const LineData& data, const Field& f, int& max_sweeps) {
    const NullLattice& L = f.lat;
    const int n = f.n;
    const double h = L.h;
    Field H = Field::zeros(L, n);
    std::vector<double> gp(static_cast<std::size_t>(L.N) * n), gm(gp.size());
    for (int k = 0; k < L.N; ++k)
        for (int c = 0; c < n; ++c) {
            double du = data.Du(k, c);
            gp[k * n + c] = data.v_at(k)[c] - du;
            gm[k * n + c] = data.v_at(k)[c] + du;
        }
    std::vector<double> sp(gp.size(), 0.0), sm(gp.size(), 0.0);
    std::vector<double> cur(data.u), next;
    std::vector<double> kp(3 * n), km(3 * n), y(n), yn(n), y2(n), uc(n), vpc(n), vmc(n), t1(n), t2(n), t3(n);
    max_sweeps = 0;
    for (int d = 0; d <= L.D; ++d) {
        double ca, cb;
        L.centroid(d, ca, cb);
        next.assign(static_cast<std::size_t>(L.cells_on(d)) * n, 0.0);
        for (int j = 0; j < L.cells_on(d); ++j) {
            const int i = j + d;
            const int c = L.cell(d, j);
            const double* hbp = H.at(L.cell(0, j));
            const double* hbm = H.at(L.cell(0, i));
            std::fill(y.begin(), y.end(), 0.0);
            std::fill(y2.begin(), y2.end(), 0.0);
            int sweeps = 0;
            for (;;) {
                detail::plus_coef(d, n, h, gp.data() + j * n, d == 0 ? y.data() : hbp, y.data(), sp.data() + j * n,
                                  kp.data());
                detail::minus_coef(d, n, h, gm.data() + i * n, d == 0 ? y.data() : hbm, y.data(), sm.data() + i * n,
                                   km.data());
                if (sweeps == 100) break;
                detail::eval_affine(kp.data(), n, ca, cb, vpc.data());
                detail::eval_affine(km.data(), n, ca, cb, vmc.data());
                detail::u_offset(cur.data() + j * n, kp.data(), km.data(), n, ca, cb, uc.data());
                phi_cell(M, n, uc.data(), vpc.data(), vmc.data(), f.at(c), yn.data(), t1.data(), t2.data(),
                         t3.data());
                ++sweeps;
                // stationary, or flipping between two neighbours in the last bit
                if (yn == y || (sweeps > 1 && yn == y2)) break;
                y2 = y;
                y = yn;
            }
            max_sweeps = std::max(max_sweeps, sweeps);
            std::copy(y.begin(), y.end(), H.at(c));
            if (d > 0)
                for (int k = 0; k < n; ++k) {
                    sp[j * n + k] += y[k];
                    sm[i * n + k] += y[k];
                }
            detail::u_step(cur.data() + j * n, km.data(), n, h, next.data() + j * n);
        }
        cur.swap(next);
    }
    return H;
}

void finish_diagnostics(const Manifold& M, Solution& s, double compat_tol) {
    double md = 0.0, cd = 0.0;
    for (const auto& layer : s.layers) {
        const NullLattice& L = layer.lat();
        for (int d = 0; d <= L.Dn; ++d)
            for (int j = 0; j < L.nodes_on(d); ++j) md = std::max(md, M.distance(layer.node(d, j)));
        cd = std::max(cd, check_compatibility(M, layer.data, compat_tol).max_defect);
    }
    if (!s.layers.empty()) {
        const LinearSolution& last = s.layers.back();
        const NullLattice& L = last.lat();
        if (L.Dn >= 2 && L.N - 2 * L.M > 0 && L.D == 2 * L.M) {
            auto tr = trace(last, L.M);
            cd = std::max(cd, check_compatibility(M, tr.data, compat_tol).max_defect);
        }
    }
    s.diag.manifold_defect = md;
    s.diag.compat_defect = cd;
    s.diag.max_ratio = 0.0;
    for (double r : s.diag.ratios) s.diag.max_ratio = std::max(s.diag.max_ratio, r);
}

void merge(Diagnostics& into, const Diagnostics& from) {
    into.iterations += from.iterations;
    into.final_residual = std::max(into.final_residual, from.final_residual);
    into.ratios.insert(into.ratios.end(), from.ratios.begin(), from.ratios.end());
    into.ball_norms.insert(into.ball_norms.end(), from.ball_norms.begin(), from.ball_norms.end());
    into.settle_sweeps = std::max(into.settle_sweeps, from.settle_sweeps);
    into.tiles += from.tiles;
}

struct LayerOut {
    LinearSolution sol;
    Field forcing;
    Diagnostics diag;
    double delta = 0.0;
    std::string how;
};

// Tiles of half-width delta across the layer lattice; glued h-field.
LayerOut tiled_layer(const Manifold& M, const LineData& data, const Field& flayer, double delta,
                     const ContractionBudget& budget, const SolverOptions& opt) {
    const NullLattice& L = flayer.lat;
    const int n = flayer.n;
    const double h = L.h;
    double x0 = 0.5 * (L.x_base(0) + L.x_base(L.N));
    double halfL = 0.5 * L.N * h;
    auto K = Trapezoid::compact(x0, halfL, L.M * h);
    auto tiles = tile_cover(K, delta, true, static_cast<double>(L.M) * h / delta);
    std::vector<std::pair<int, int>> ranges;
    const int w = static_cast<int>(std::lround(delta / h));
    for (const auto& T : tiles) {
        int lo = static_cast<int>(std::lround((T.x0 - T.L - L.x_base(0)) / h));
        lo = std::clamp(lo, 0, L.N - 2 * w);
        if (ranges.empty() || ranges.back().first != lo) ranges.push_back({lo, lo + 2 * w});
    }
    std::vector<std::optional<Solution>> parts(ranges.size());
    detail::run_parallel(static_cast<int>(ranges.size()), opt.threads, [&](int t) {
        auto sub = L.sub(ranges[t].first, ranges[t].second, L.M);
        parts[t] = picard_solve_small(M, data.restrict_to(ranges[t].first, ranges[t].second), flayer.restrict_to(sub),
                                      budget, opt.tol, opt.max_iter);
    });
    Field H = Field::zeros(L, n);
    std::vector<char> set(static_cast<std::size_t>(L.num_cells()), 0);
    LayerOut out;
    for (std::size_t t = 0; t < ranges.size(); ++t) {
        const LinearSolution& ts = parts[t]->layers.front();
        const NullLattice& S = ts.lat();
        for (int d = 0; d <= S.D; ++d)
            for (int j = 0; j < S.cells_on(d); ++j) {
                int c = L.cell(d, j + ranges[t].first);
                const double* v = ts.h.at(S.cell(d, j));
                if (set[c]) {
                    if (!std::equal(v, v + n, H.at(c)))
                        fail(Status::OverlapMismatch, "tiles disagree on their overlap");
                } else {
                    std::copy(v, v + n, H.at(c));
                    set[c] = 1;
                }
            }
        merge(out.diag, parts[t]->diag);
    }
    if (std::find(set.begin(), set.end(), 0) != set.end()) fail(Status::Internal, "tiles do not cover the layer");
    out.sol = dalembert_solve(data, H);
    out.diag.tiles = static_cast<int>(ranges.size());
    out.diag.final_residual = std::max(out.diag.final_residual, l1_diff(phi_map(M, H, data, flayer), H));
    out.delta = delta;
    out.forcing = flayer;
    out.how = "Tiled";
    return out;
}

LayerOut small_layer(const Manifold& M, const LineData& data, const Field& flayer, const ContractionBudget& budget,
                     const SolverOptions& opt) {
    auto s = picard_solve_small(M, data, flayer, budget, opt.tol, opt.max_iter);
    LayerOut out;
    out.sol = std::move(s.layers.front());
    out.diag = s.diag;
    out.diag.tiles = 0;
    out.forcing = flayer;
    out.how = "SmallData";
    return out;
}

LayerOut marched_layer(const Manifold& M, const LineData& data, const Field& flayer) {
    LayerOut out;
    int sweeps = 0;
    Field H = causal_settle(M, data, flayer, sweeps);
    out.sol = dalembert_solve(data, H);
    out.diag.settle_sweeps = sweeps;
    out.diag.final_residual = l1_diff(phi_map(M, H, data, flayer), H);
    out.forcing = flayer;
    out.how = "Marched";
    return out;
}

NullLattice compact_lattice(const LineData& data, const Trapezoid& K) {
    auto L = lattice_for(K, data.h, data.origin);
    if (L.k0 != data.k0 || L.N != data.N) fail(Status::DataCoverage, "data do not cover the base of K");
    return L;
}

} // namespace

const double* Solution::find_node(long I, long J) const {
    for (const auto& l : layers)
        if (const double* p = node_on(l, I, J)) return p;
    return nullptr;
}

const double* UnboundedSolution::find_node(long I, long J) const {
    if (const double* p = core.find_node(I, J)) return p;
    if (left)
        if (const double* p = left->find_node(I, J)) return p;
    if (right)
        if (const double* p = right->find_node(I, J)) return p;
    return nullptr;
}

Field sample_forcing(const NullLattice& lat, int n, const PointFn& f) {
    if (!f) return Field::zeros(lat, n);
    return sample_field(lat, n, f);
}

Field phi_map(const Manifold& M, const Field& h, const LineData& data, const Field& f) {
    const NullLattice& L = h.lat;
    const int n = h.n;
    check_base(data, L, n);
    if (!f.lat.same_as(L) || f.n != n) fail(Status::DataCoverage, "forcing is not on the lattice of h");
    LinearSolution s = dalembert_solve(data, h);
    Field out = Field::zeros(L, n);
    std::vector<double> vpc(n), vmc(n), uc(n), t1(n), t2(n), t3(n);
    for (int d = 0; d <= L.D; ++d) {
        double ca, cb;
        L.centroid(d, ca, cb);
        for (int j = 0; j < L.cells_on(d); ++j) {
            int c = L.cell(d, j);
            detail::eval_affine(s.vp.at(c), n, ca, cb, vpc.data());
            detail::eval_affine(s.vm.at(c), n, ca, cb, vmc.data());
            detail::u_offset(s.node(d, j), s.vp.at(c), s.vm.at(c), n, ca, cb, uc.data());
            phi_cell(M, n, uc.data(), vpc.data(), vmc.data(), f.at(c), out.at(c), t1.data(), t2.data(), t3.data());
        }
    }
    return out;
}

Solution picard_solve_small(const Manifold& M, const LineData& data, const Field& f, const ContractionBudget& budget,
                            double tol, int max_iter) {
    const NullLattice& L = f.lat;
    const int n = f.n;
    check_base(data, L, n);
    Masses ms = masses(data, f);
    if (!is_small(ms, budget.eta))
        fail(Status::SmallnessViolated, "data or forcing above eta: |v+Du|=" + std::to_string(ms.plus) +
                                            " |v-Du|=" + std::to_string(ms.minus) +
                                            " |f|=" + std::to_string(ms.forcing) + " eta=" + std::to_string(budget.eta));
    Solution sol;
    sol.domain = L.trapezoid();
    Diagnostics& dg = sol.diag;
    dg.path = Path::SmallData;
    Field hk = Field::zeros(L, n);
    double prev = -1.0;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        Field hn = phi_map(M, hk, data, f);
        double diff = l1_diff(hn, hk);
        dg.ball_norms.push_back(l1_norm(hn));
        if (prev > 0.0) dg.ratios.push_back(diff / prev);
        hk = std::move(hn);
        dg.iterations = it;
        if (diff <= tol) {
            converged = true;
            break;
        }
        if (dg.ratios.size() >= 5 &&
            std::all_of(dg.ratios.end() - 5, dg.ratios.end(), [](double r) { return r > 0.9; }))
            fail(Status::NoConvergence, "Picard increments are not contracting");
        prev = diff;
    }
    if (!converged) fail(Status::NoConvergence, "Picard iteration hit max_iter");
    int sweeps = 0;
    Field H = causal_settle(M, data, f, sweeps);
    dg.settle_sweeps = sweeps;
    dg.final_residual = l1_diff(phi_map(M, H, data, f), H);
    sol.layers.push_back(dalembert_solve(data, H));
    sol.forcing.push_back(f);
    dg.schedule = {L.M};
    dg.deltas = {0.0};
    dg.layer_paths = {"SmallData"};
    spdlog::debug("picard: {} iterations, residual {:.3e}", dg.iterations, dg.final_residual);
    return sol;
}

double find_local_height(const LineData& data, const Field& f, double eta) {
    const NullLattice& L = f.lat;
    const int n = data.n;
    const double h = L.h;
    // characteristic masses per base cell
    std::vector<double> pre_p(L.N + 1, 0.0), pre_m(L.N + 1, 0.0);
    for (int k = 0; k < L.N; ++k) {
        double ap = 0.0, am = 0.0;
        for (int c = 0; c < n; ++c) {
            double du = data.Du(k, c);
            ap += std::abs(data.v_at(k)[c] + du);
            am += std::abs(data.v_at(k)[c] - du);
        }
        pre_p[k + 1] = pre_p[k] + ap * h;
        pre_m[k + 1] = pre_m[k] + am * h;
    }
    long k1 = 0;
    for (long k = 1;; ++k) {
        long w = std::min<long>(2 * k, L.N);
        double worst = 0.0;
        for (long s = 0; s + w <= L.N; ++s)
            worst = std::max({worst, pre_p[s + w] - pre_p[s], pre_m[s + w] - pre_m[s]});
        if (worst > eta) break;
        k1 = k;
        if (w == L.N) {
            k1 = L.N; // the whole base is small
            break;
        }
    }
    // forcing mass of the slab [0, k h]
    std::vector<double> Fd(L.D + 1, 0.0);
    for (int d = 0; d <= L.D; ++d) {
        double s = 0.0;
        for (int j = 0; j < L.cells_on(d); ++j)
            for (int c = 0; c < f.n; ++c) s += std::abs(f.at(L.cell(d, j))[c]);
        Fd[d] = s * L.area(d);
    }
    double total = 0.0;
    for (double x : Fd) total += x;
    double d2 = kInf;
    if (total > eta) {
        long k2 = 0;
        double below = 0.0; // mass of diagonals 0 .. 2k-1
        for (long k = 1; 2 * k <= L.D; ++k) {
            below += Fd[2 * k - 2] + Fd[2 * k - 1];
            if (below + 0.5 * Fd[2 * k] > eta) break;
            k2 = k;
        }
        d2 = static_cast<double>(k2) * h;
    }
    double cap = 0.25 * L.N * h;
    double delta = std::min({static_cast<double>(k1) * h, 2.0 * std::sqrt(3.0) / 3.0 * d2, cap});
    long units = static_cast<long>(std::floor(delta / h + 1e-9));
    units -= units % 2;
    if (units < 2)
        fail(Status::DegenerateHeight, "local height below two lattice steps (delta1=" + std::to_string(k1 * h) +
                                           ", delta2=" + std::to_string(d2) + ")");
    return static_cast<double>(units) * h;
}

Solution solve_local_large(const Manifold& M, const LineData& data, const PointFn& f, const Trapezoid& K,
                           const SolverOptions& opt) {
    auto L = compact_lattice(data, K);
    auto budget = budget_for(M, opt);
    Field fK = sample_forcing(L, data.n, f);
    Solution sol;
    sol.domain = K;
    LayerOut lo;
    if (!opt.tile_delta && is_small(masses(data, fK), budget.eta)) {
        lo = small_layer(M, data, fK, budget, opt);
        lo.diag.tiles = 1;
        lo.how = "Tiled";
    } else {
        double delta = opt.tile_delta ? *opt.tile_delta : find_local_height(data, fK, budget.eta);
        int Mh = std::min(static_cast<int>(std::lround(delta / (2.0 * L.h))), L.M);
        auto layer = L.sub(0, L.N, Mh);
        lo = tiled_layer(M, data, sample_forcing(layer, data.n, f), delta, budget, opt);
    }
    sol.diag = lo.diag;
    sol.diag.path = Path::Tiled;
    sol.diag.schedule = {lo.sol.lat().M};
    sol.diag.deltas = {lo.delta};
    sol.diag.layer_paths = {lo.how};
    sol.domain = lo.sol.lat().trapezoid();
    sol.layers.push_back(std::move(lo.sol));
    sol.forcing.push_back(std::move(lo.forcing));
    finish_diagnostics(M, sol, opt.compat_tol);
    return sol;
}

Solution solve_global(const Manifold& M, const LineData& data, const PointFn& f, const Trapezoid& K,
                      const SolverOptions& opt, const std::vector<int>* schedule) {
    NullLattice rem = compact_lattice(data, K);
    auto budget = budget_for(M, opt);
    const int n = data.n;
    Solution sol;
    sol.domain = K;
    LineData cur = data;
    std::size_t idx = 0;
    while (rem.M > 0) {
        Field frem = sample_forcing(rem, n, f);
        Masses ms = masses(cur, frem);
        bool small = is_small(ms, budget.eta);
        LayerOut lo;
        if (schedule && idx < schedule->size()) {
            int Mh = std::min((*schedule)[idx], rem.M);
            auto layer = rem.sub(0, rem.N, Mh);
            Field fl = Mh == rem.M ? frem : sample_forcing(layer, n, f);
            if (small) {
                lo = small_layer(M, cur, fl, budget, opt);
            } else {
                double delta = 0.0;
                try {
                    delta = find_local_height(cur, frem, budget.eta);
                } catch (const Error& e) {
                    if (e.status() != Status::DegenerateHeight) throw;
                }
                if (delta > 0.0 && delta / 2.0 >= Mh * rem.h - 1e-12 * rem.h)
                    lo = tiled_layer(M, cur, fl, delta, budget, opt);
                else
                    lo = marched_layer(M, cur, fl);
            }
        } else {
            double delta = 0.0;
            bool forced = opt.tile_delta && *opt.tile_delta <= 0.25 * rem.N * rem.h * (1.0 + 1e-12);
            if (forced) {
                delta = *opt.tile_delta;
            } else if (!small) {
                try {
                    delta = find_local_height(cur, frem, budget.eta);
                } catch (const Error& e) {
                    if (e.status() != Status::DegenerateHeight) throw;
                    // near the apex the height cap, not the data, is binding: march the rest
                    if (rem.N >= 8)
                        fail(Status::StallDetected, "continuation stalled at t=" + std::to_string(rem.t_base()) +
                                                    ": |v+Du|=" + std::to_string(ms.plus) + " |v-Du|=" +
                                                    std::to_string(ms.minus) + " |f|=" + std::to_string(ms.forcing) +
                                                    " (" + e.what() + ")");
                    delta = -1.0;
                }
            }
            if (delta < 0.0) {
                lo = marched_layer(M, cur, frem);
            } else if (delta > 0.0) {
                int Mh = std::min(static_cast<int>(std::lround(delta / (2.0 * rem.h))), rem.M);
                auto layer = rem.sub(0, rem.N, Mh);
                lo = tiled_layer(M, cur, Mh == rem.M ? frem : sample_forcing(layer, n, f), delta, budget, opt);
            } else {
                lo = small_layer(M, cur, frem, budget, opt);
            }
        }
        ++idx;
        const int Mh = lo.sol.lat().M;
        spdlog::debug("layer {} at t={} height {} via {}", idx, rem.t_base(), Mh * rem.h, lo.how);
        merge(sol.diag, lo.diag);
        sol.diag.schedule.push_back(Mh);
        sol.diag.deltas.push_back(lo.delta);
        sol.diag.layer_paths.push_back(lo.how);
        sol.layers.push_back(std::move(lo.sol));
        sol.forcing.push_back(std::move(lo.forcing));
        if (Mh == rem.M) break;
        auto tr = trace(sol.layers.back(), Mh);
        cur = std::move(tr.data);
        rem = NullLattice::make(rem.origin, rem.h, rem.k0 + Mh, rem.m + Mh, rem.N - 2 * Mh, rem.M - Mh);
    }
    if (sol.layers.size() > 1)
        sol.diag.path = Path::Continued;
    else
        sol.diag.path = sol.diag.layer_paths.front() == "SmallData" ? Path::SmallData : Path::Tiled;
    finish_diagnostics(M, sol, opt.compat_tol);
    return sol;
}

namespace {

// bitwise comparison of two layers on their common cells and nodes
void compare_layers(const LinearSolution& A, const LinearSolution& B) {
    const NullLattice& a = A.lat();
    const NullLattice& b = B.lat();
    if (a.m != b.m || a.h != b.h || a.origin != b.origin)
        fail(Status::OverlapMismatch, "layers with different base times");
    const int n = A.n();
    long off = b.k0 - a.k0; // j_a = j_b + off
    for (int d = 0; d <= std::min(a.D, b.D); ++d) {
        if (a.shape(d) != b.shape(d)) continue;
        for (int jb = 0; jb < b.cells_on(d); ++jb) {
            long ja = jb + off;
            if (ja < 0 || ja >= a.cells_on(d)) continue;
            int ca = a.cell(d, static_cast<int>(ja)), cb = b.cell(d, jb);
            if (!std::equal(A.h.at(ca), A.h.at(ca) + n, B.h.at(cb)) ||
                !std::equal(A.vp.at(ca), A.vp.at(ca) + 3 * n, B.vp.at(cb)) ||
                !std::equal(A.vm.at(ca), A.vm.at(ca) + 3 * n, B.vm.at(cb)))
                fail(Status::OverlapMismatch, "solutions disagree on a shared cell");
        }
    }
    for (int d = 0; d <= std::min(a.Dn, b.Dn); ++d)
        for (int jb = 0; jb < b.nodes_on(d); ++jb) {
            long ja = jb + off;
            if (ja < 0 || ja >= a.nodes_on(d)) continue;
            if (!std::equal(A.node(d, static_cast<int>(ja)), A.node(d, static_cast<int>(ja)) + n, B.node(d, jb)))
                fail(Status::OverlapMismatch, "solutions disagree on a shared node");
        }
}

void compare_solutions(const Solution& big, const Solution& small) {
    for (std::size_t l = 0; l < small.layers.size() && l < big.layers.size(); ++l)
        compare_layers(big.layers[l], small.layers[l]);
}

LineData extended_data(const LineFn& u0, const LineFn& v0, int n, double h, long k0, int N, double lo, double hi) {
    LineFn ue = [&](double x, double* o) { u0(std::clamp(x, lo, hi), o); };
    LineFn ve = [&](double x, double* o) {
        if (x < lo || x > hi)
            std::fill(o, o + n, 0.0);
        else
            v0(x, o);
    };
    // cells straddling the cutoff do not occur: lo and hi are lattice points
    return sample_line(0.0, h, k0, N, n, ue, ve);
}

} // namespace

UnboundedSolution solve_unbounded(const Manifold& M, const LineFn& u0, const LineFn& v0, int n, const PointFn& f,
                                  const Trapezoid& K, double h, double cutoff, const SolverOptions& opt) {
    if (K.kind == Trapezoid::Kind::Compact) fail(Status::ConfigError, "solve_unbounded needs a non-compact trapezoid");
    auto budget = budget_for(M, opt);
    const long c = std::lround(cutoff / h);
    const long Hn = std::lround(K.height / h);
    if (std::abs(c * h - cutoff) > 1e-9 * std::max(1.0, cutoff) || std::abs(Hn * h - K.height) > 1e-9 * std::max(1.0, K.height) || Hn < 1)
        fail(Status::ConfigError, "cutoff and height must be positive multiples of h");
    const bool has_left = K.kind == Trapezoid::Kind::Unbounded || K.kind == Trapezoid::Kind::SemiBoundedDown;
    const bool has_right = K.kind == Trapezoid::Kind::Unbounded || K.kind == Trapezoid::Kind::SemiBoundedUp;
    long lo_edge = -c, hi_edge = c; // finite edges of semi-bounded domains
    if (K.kind == Trapezoid::Kind::SemiBoundedUp) lo_edge = std::lround(K.edge / h);
    if (K.kind == Trapezoid::Kind::SemiBoundedDown) hi_edge = std::lround(K.edge / h);
    if (lo_edge >= hi_edge) fail(Status::ConfigError, "cutoff does not reach beyond the edge");
    const double lo = -c * h, hi = c * h;

    // masses over the window [-c - 2H, c + 2H]
    const long W0 = -c - 2 * Hn;
    const int WN = static_cast<int>(2 * c + 4 * Hn);
    LineData wd = extended_data(u0, v0, n, h, W0, WN, lo, hi);
    auto WL = NullLattice::make(0.0, h, W0, 0, WN, static_cast<int>(Hn));
    Field wf = sample_forcing(WL, n, f);
    std::vector<double> cp(WN, 0.0), cm(WN, 0.0);
    for (int k = 0; k < WN; ++k)
        for (int q = 0; q < n; ++q) {
            cp[k] += std::abs(wd.v_at(k)[q] - wd.Du(k, q)) * h;
            cm[k] += std::abs(wd.v_at(k)[q] + wd.Du(k, q)) * h;
        }
    // forcing mass per b-column and per a-row
    std::vector<double> colJ(WN, 0.0), rowI(WN, 0.0);
    for (int d = 0; d <= WL.D; ++d)
        for (int j = 0; j < WL.cells_on(d); ++j) {
            double s = 0.0;
            for (int q = 0; q < n; ++q) s += std::abs(wf.at(WL.cell(d, j))[q]);
            colJ[j] += s * WL.area(d);
            rowI[j + d] += s * WL.area(d);
        }
    auto tail_ok_right = [&](long b) {
        double p = 0.0, m = 0.0, F = 0.0;
        for (long k = b - W0; k < WN; ++k) {
            p += cp[k];
            m += cm[k];
            F += colJ[k];
        }
        return p <= budget.eta && m <= budget.eta && F <= budget.eta;
    };
    auto tail_ok_left = [&](long a) {
        double p = 0.0, m = 0.0, F = 0.0;
        for (long k = 0; k < a - W0; ++k) {
            p += cp[k];
            m += cm[k];
            F += rowI[k];
        }
        return p <= budget.eta && m <= budget.eta && F <= budget.eta;
    };
    long b = hi_edge, a = lo_edge;
    if (has_right) {
        if (!tail_ok_right(c)) fail(Status::TailNotSmall, "data or forcing beyond the cutoff exceed eta");
        while (b - 1 >= lo_edge && tail_ok_right(b - 1)) --b;
    }
    if (has_left) {
        if (!tail_ok_left(-c)) fail(Status::TailNotSmall, "data or forcing beyond the cutoff exceed eta");
        while (a + 1 <= hi_edge && tail_ok_left(a + 1)) ++a;
    }
    if (has_left && has_right && a > b) std::swap(a, b);
    if (!has_left) a = lo_edge;
    if (!has_right) b = hi_edge;

    UnboundedSolution us;
    us.domain = K;
    us.a = a * h;
    us.b = b * h;
    long core_lo = has_left ? a - 2 * Hn : lo_edge;
    long core_hi = has_right ? b + 2 * Hn : hi_edge;
    if (core_hi - core_lo < 2 * Hn) fail(Status::ConfigError, "domain narrower than twice its height");
    auto core_K = Trapezoid::compact(0.5 * (core_lo + core_hi) * h, 0.5 * (core_hi - core_lo) * h, Hn * h);
    auto core_d = extended_data(u0, v0, n, h, core_lo, static_cast<int>(core_hi - core_lo), lo, hi);
    us.core = solve_global(M, core_d, f, core_K, opt);
    const std::vector<int> sched = us.core.diag.schedule;
    us.diag = us.core.diag;
    auto tail = [&](long t_lo, long t_hi) {
        auto TK = Trapezoid::compact(0.5 * (t_lo + t_hi) * h, 0.5 * (t_hi - t_lo) * h, Hn * h);
        auto td = extended_data(u0, v0, n, h, t_lo, static_cast<int>(t_hi - t_lo), lo, hi);
        try {
            return solve_global(M, td, f, TK, opt, &sched);
        } catch (const Error& e) {
            if (e.status() == Status::SmallnessViolated || e.status() == Status::NoConvergence)
                fail(Status::TailNotSmall, std::string("tail solve failed: ") + e.what());
            throw;
        }
    };
    if (has_right) {
        us.right = tail(b, c + 2 * Hn);
        compare_solutions(us.core, *us.right);
        merge(us.diag, us.right->diag);
    }
    if (has_left) {
        us.left = tail(-c - 2 * Hn, a);
        compare_solutions(us.core, *us.left);
        merge(us.diag, us.left->diag);
    }
    us.diag.path = Path::Continued;
    us.diag.manifold_defect = std::max({us.core.diag.manifold_defect, us.left ? us.left->diag.manifold_defect : 0.0,
                                        us.right ? us.right->diag.manifold_defect : 0.0});
    us.diag.compat_defect = std::max({us.core.diag.compat_defect, us.left ? us.left->diag.compat_defect : 0.0,
                                      us.right ? us.right->diag.compat_defect : 0.0});
    return us;
}

std::vector<Solution> solve_concatenated(const Manifold& M, const LineFn& u0, const LineFn& v0, int n,
                                         const PointFn& f, double h, int n_max, const SolverOptions& opt) {
    if (n_max < 1) fail(Status::ConfigError, "n_max must be at least 1");
    auto make = [&](int k, const std::vector<int>* sched) {
        long w = std::lround(k / h);
        if (std::abs(w * h - k) > 1e-9 * k) fail(Status::ConfigError, "lattice spacing does not divide the triangles");
        auto d = sample_line(0.0, h, -w, static_cast<int>(2 * w), n, u0, v0);
        return solve_global(M, d, f, Trapezoid::compact(0.0, k, k), opt, sched);
    };
    std::vector<Solution> out(n_max);
    out[n_max - 1] = make(n_max, nullptr);
    const std::vector<int> sched = out[n_max - 1].diag.schedule;
    for (int k = n_max - 1; k >= 1; --k) {
        out[k - 1] = make(k, &sched);
        compare_solutions(out[k], out[k - 1]);
    }
    for (auto& s : out) s.diag.path = Path::Concatenated;
    return out;
}

} // namespace wavemap
