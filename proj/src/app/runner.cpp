#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include <spdlog/spdlog.h>

#include "wavemap/error.hpp"

namespace wavemap::app {

using nlohmann::json;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Csv {
public:
    Csv(const std::string& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) fail(Status::IoError, "cannot write " + path);
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    void row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << num(cells[i]);
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Status::IoError, "cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string prepare(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) fail(Status::IoError, "cannot create output directory " + out + ": " + ec.message());
    return out;
}

std::string file(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

json report_json(const EstimateReport& r) {
    return {{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack}, {"tol", r.tol}, {"ok", r.ok}};
}

json diag_json(const Diagnostics& d) {
    return {{"path", path_name(d.path)},
            {"iterations", d.iterations},
            {"final_residual", d.final_residual},
            {"max_ratio", d.max_ratio},
            {"ratios", d.ratios},
            {"ball_norms", d.ball_norms},
            {"deltas", d.deltas},
            {"schedule", d.schedule},
            {"layer_paths", d.layer_paths},
            {"tiles", d.tiles},
            {"settle_sweeps", d.settle_sweeps},
            {"manifold_defect", d.manifold_defect},
            {"compat_defect", d.compat_defect}};
}

json budget_json(const ContractionBudget& b) {
    auto c = check_budget(b);
    return {{"eta", b.eta},
            {"R", b.R},
            {"gamma", b.gamma},
            {"L_lip", b.L_lip},
            {"invariance", c.invariance},
            {"sufficient", c.sufficient},
            {"contraction", c.contraction},
            {"ok", c.ok}};
}

Trapezoid trapezoid(const RunConfig& c) {
    const auto& d = c.domain;
    if (d.kind == "compact") return Trapezoid::compact(d.x0, d.L, d.height);
    if (d.kind == "unbounded") return Trapezoid::unbounded(d.height);
    if (d.kind == "semi_bounded_up") return Trapezoid::semi_bounded_up(d.edge, d.height);
    if (d.kind == "semi_bounded_down") return Trapezoid::semi_bounded_down(d.edge, d.height);
    fail(Status::ConfigError, "config: domain.kind '" + d.kind + "' has no single trapezoid");
}

void check_data(const Manifold& M, const LineData& d, const RunConfig& c) {
    double def = manifold_defect(M, d);
    if (def > 1e-9) fail(Status::CompatibilityError, "initial position is off the target (distance " + num(def) + ")");
    auto r = check_compatibility(M, d, c.solver.compat_tol);
    if (!r.ok)
        fail(Status::CompatibilityError,
             "initial velocity is not tangent to the target (normal part " + num(r.max_defect) + ")");
}

struct Solved {
    LineData data;
    std::vector<const Solution*> parts; // core first
    std::vector<Solution> owned;
    std::optional<UnboundedSolution> unbounded;
    const Solution& main() const { return *parts.front(); }
};

Solved solve(const RunConfig& c) {
    const Manifold M = target(c);
    const int n = c.dim;
    auto u0 = initial_position(c);
    auto v0 = initial_velocity(c);
    auto f = forcing(c);
    auto opt = solver_options(c);
    Solved s;
    const auto& d = c.domain;
    if (d.kind == "compact") {
        auto K = trapezoid(c);
        auto L = lattice_for(K, c.h);
        s.data = sample_line(L, n, u0, v0);
        check_data(M, s.data, c);
        s.owned.push_back(solve_global(M, s.data, f, K, opt));
    } else if (d.kind == "concatenated") {
        auto L = lattice_for(Trapezoid::compact(0.0, d.n_max, d.n_max), c.h);
        s.data = sample_line(L, n, u0, v0);
        check_data(M, s.data, c);
        auto all = solve_concatenated(M, u0, v0, n, f, c.h, d.n_max, opt);
        s.owned.push_back(std::move(all.back()));
    } else {
        auto K = trapezoid(c);
        auto L = lattice_for(Trapezoid::compact(0.0, d.cutoff, std::min(d.cutoff, d.height)), c.h);
        s.data = sample_line(L, n, u0, v0);
        check_data(M, s.data, c);
        s.unbounded = solve_unbounded(M, u0, v0, n, f, K, c.h, d.cutoff, opt);
    }
    if (s.unbounded) {
        s.parts.push_back(&s.unbounded->core);
        if (s.unbounded->left) s.parts.push_back(&*s.unbounded->left);
        if (s.unbounded->right) s.parts.push_back(&*s.unbounded->right);
    } else {
        s.parts.push_back(&s.owned.front());
    }
    return s;
}

void write_solution_csv(const std::string& path, const std::vector<const Solution*>& parts, int n) {
    std::vector<std::string> header = {"t", "x"};
    for (int c = 0; c < n; ++c) header.push_back("u" + std::to_string(c + 1));
    Csv csv(path, header);
    std::set<std::pair<long, long>> seen;
    std::vector<double> row(2 + n);
    for (const Solution* s : parts)
        for (const auto& l : s->layers) {
            const NullLattice& L = l.lat();
            for (int d = 0; d <= L.Dn; ++d)
                for (int j = 0; j < L.nodes_on(d); ++j) {
                    long I = L.I0() + j + d, J = L.J0() + j;
                    if (!seen.insert({I, J}).second) continue;
                    double a = L.a(j + d), b = L.b(j);
                    row[0] = 0.5 * (a - b);
                    row[1] = 0.5 * (a + b);
                    const double* u = l.node(d, j);
                    std::copy(u, u + n, row.begin() + 2);
                    csv.row(row);
                }
        }
}

// the discrete solution is only approximately M-valued: tolerance 4 h (data mass)
json solution_estimates(const Solution& s) {
    json out = json::array();
    const double h = s.layers.front().lat().h;
    int top = 0;
    for (const auto& l : s.layers) top = std::max(top, static_cast<int>(l.lat().m + l.lat().M));
    for (int m0 : {0, top / 2, top}) {
        auto [p, m] = energy_flux_check(s, m0, 0.0);
        for (const auto& r : {p, m}) {
            json e = report_json(make_report(r.name, r.lhs, r.rhs, 4.0 * h * r.rhs));
            e["t"] = m0 * h;
            out.push_back(e);
        }
    }
    auto sp = spacetime_null_energy_check(s, 0.0);
    out.push_back(report_json(make_report(sp.name, sp.lhs, sp.rhs, 4.0 * h * std::sqrt(sp.rhs))));
    return out;
}

json domain_json(const RunConfig& c) {
    const auto& d = c.domain;
    json j = {{"kind", d.kind}, {"height", d.height}};
    if (d.kind == "compact") {
        j["x0"] = d.x0;
        j["L"] = d.L;
    } else if (d.kind == "concatenated") {
        j["n_max"] = d.n_max;
    } else {
        j["cutoff"] = d.cutoff;
        j["edge"] = d.edge;
    }
    return j;
}

json header(const RunConfig& c, const char* command) {
    return {{"command", command}, {"h", c.h}, {"dim", c.dim}, {"seed", c.seed}, {"domain", domain_json(c)},
            {"data", c.data.kind}, {"forcing", c.forcing.kind}};
}

} // namespace

void run_solve(const RunConfig& c, const std::string& out) {
    prepare(out);
    spdlog::info("solve: h={} domain={}", c.h, c.domain.kind);
    Solved s = solve(c);
    const Manifold M = target(c);
    json j = header(c, "solve");
    j["budget"] = budget_json(budget_for(M, solver_options(c)));
    const Diagnostics& d = s.unbounded ? s.unbounded->diag : s.main().diag;
    const json dj = diag_json(d);
    for (auto it = dj.begin(); it != dj.end(); ++it) j[it.key()] = *it;
    j["estimates"] = solution_estimates(s.main());
    write_solution_csv(file(out, "solution.csv"), s.parts, c.dim);
    write_json(file(out, "diagnostics.json"), j);
}

void run_verify(const RunConfig& c, const std::string& out) {
    prepare(out);
    std::vector<Checker> which;
    const std::vector<Checker> all = {Checker::Transport, Checker::Zhou, Checker::QBound, Checker::EnergyFlux,
                                      Checker::SpacetimeNull};
    for (Checker k : all) {
        bool want = c.estimates.checkers.empty();
        for (const auto& name : c.estimates.checkers) want = want || name == checker_name(k);
        if (want) which.push_back(k);
    }
    json arr = json::array();
    json summary = json::object();
    for (Checker k : which) {
        spdlog::info("verify: {} x{}", checker_name(k), c.estimates.trials);
        auto reps = random_suite(k, c.estimates.trials, c.seed, c.estimates.tol, c.threads);
        int passed = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < reps.size(); ++t) {
            json e = report_json(reps[t]);
            e["checker"] = checker_name(k);
            e["trial"] = t;
            arr.push_back(e);
            passed += reps[t].ok ? 1 : 0;
            worst = std::min(worst, reps[t].slack);
        }
        summary[checker_name(k)] = {{"trials", reps.size()}, {"passed", passed}, {"worst_slack", worst}};
    }
    write_json(file(out, "estimates.json"), arr);
    json s = {{"command", "verify-estimates"}, {"seed", c.seed}, {"tol", c.estimates.tol}, {"checkers", summary}};
    write_json(file(out, "estimates_summary.json"), s);
}

namespace {

void write_scattering_data(const std::string& path, const LineData& d) {
    std::vector<std::string> header = {"x"};
    for (int q = 0; q < d.n; ++q) header.push_back("ubar" + std::to_string(q + 1));
    for (int q = 0; q < d.n; ++q) header.push_back("vbar" + std::to_string(q + 1));
    Csv csv(path, header);
    std::vector<double> row(1 + 2 * d.n);
    for (int k = 0; k <= d.N; ++k) {
        row[0] = d.x(k);
        std::copy(d.u_at(k), d.u_at(k) + d.n, row.begin() + 1);
        for (int q = 0; q < d.n; ++q) row[1 + d.n + q] = k < d.N ? d.v_at(k)[q] : 0.0;
        csv.row(row);
    }
}

std::pair<int, int> slice_range(const RunConfig& c) {
    int top = static_cast<int>(std::lround(c.domain.height / c.h));
    int lo = c.scatter.t_from ? static_cast<int>(std::ceil(*c.scatter.t_from / c.h - 1e-9)) : 0;
    int hi = c.scatter.t_to ? static_cast<int>(std::floor(*c.scatter.t_to / c.h + 1e-9)) : top;
    lo = std::clamp(lo, 0, top);
    hi = std::clamp(hi, lo, top);
    return {lo, hi};
}

} // namespace

void run_scatter(const RunConfig& c, const std::string& out) {
    if (c.domain.kind != "compact") fail(Status::ConfigError, "config: scatter needs a compact domain window");
    prepare(out);
    Solved s = solve(c);
    const Solution& sol = s.main();
    const Manifold M = target(c);
    auto [m_lo, m_hi] = slice_range(c);
    json j = header(c, "scatter");
    j["mode"] = c.scatter.mode;
    j["solution"] = diag_json(sol.diag);
    if (c.scatter.mode == "rn") {
        std::vector<Field> H;
        for (const auto& l : sol.layers) H.push_back(l.h);
        auto sd = scattering_data_rn(s.data, H);
        Csv csv(file(out, "defect_series.csv"), {"t", "l11_defect"});
        std::vector<double> defects;
        for (int m = m_lo; m <= m_hi; ++m) {
            double e = l11_distance(pull_back(sol, m), sd.data);
            csv.row(std::vector<double>{m * c.h, e});
            defects.push_back(e);
        }
        write_scattering_data(file(out, "scattering_data.csv"), sd.data);
        j["defects"] = defects;
    } else {
        long wid = std::lround(c.domain.height / c.h);
        auto line = LineData::zeros(s.data.origin, c.h, s.data.k0 - wid, s.data.N + 2 * static_cast<int>(wid), c.dim);
        auto ms = scatter_m_valued(M, s.data, sol.forcing, c.scatter.N, line, solver_options(c));
        Csv csv(file(out, "defect_series.csv"), {"t", "sup_defect", "l1_ut", "l1_ux"});
        json series = json::array();
        for (const auto& r : defect_series(sol, ms.data_L, m_lo, m_hi)) {
            csv.row(std::vector<double>{r.t, r.sup, r.l1_ut, r.l1_ux});
            series.push_back({{"t", r.t}, {"sup", r.sup}, {"l1_ut", r.l1_ut}, {"l1_ux", r.l1_ux}});
        }
        write_scattering_data(file(out, "scattering_data.csv"), ms.data_L.data);
        j["defects"] = series;
        j["N"] = c.scatter.N;
        j["norms"] = {{"data", ms.problem.data_norm},
                      {"compact_data", ms.problem.compact_data_norm},
                      {"forcing", ms.problem.forcing_norm},
                      {"compact_forcing", ms.problem.compact_forcing_norm}};
        j["compact_solution"] = diag_json(ms.compact.diag);
        if (c.scatter.support) {
            json reps = json::array();
            for (const auto& r : support_cone_check(sol, *c.scatter.support, c.scatter.tol_factor * c.h))
                reps.push_back(report_json(r));
            j["support_cone"] = reps;
        }
    }
    write_json(file(out, "scatter.json"), j);
}

void run_converge(const RunConfig& c, const std::string& out) {
    auto levels = c.converge.levels;
    if (levels.size() < 3) fail(Status::ConfigError, "config: converge.levels needs at least three spacings");
    if (c.domain.kind != "compact") fail(Status::ConfigError, "config: converge needs a compact domain");
    std::sort(levels.begin(), levels.end(), std::greater<>());
    const auto& oracle = c.converge.oracle;
    if (oracle == "geodesic" && c.data.kind != "geodesic")
        fail(Status::ConfigError, "config: geodesic oracle needs geodesic data");
    if (oracle == "traveling_wave" && c.data.kind != "traveling_wave")
        fail(Status::ConfigError, "config: traveling_wave oracle needs traveling_wave data");
    prepare(out);
    const int n = c.dim;
    std::vector<Solved> runs;
    for (double h : levels) {
        RunConfig ci = c;
        ci.h = h;
        for (double x : {c.domain.x0 - c.domain.L, 2 * c.domain.L, c.domain.height}) {
            double q = x / h;
            if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, std::abs(q)))
                fail(Status::ConfigError, "config: level " + num(h) + " does not divide the domain extents");
        }
        spdlog::info("converge: level h={}", h);
        runs.push_back(solve(ci));
    }
    auto u0 = initial_position(c);
    std::vector<double> err(levels.size(), 0.0), exact(n);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (oracle == "finest" && i + 1 == levels.size()) break;
        const Solution& s = runs[i].main();
        const Solution& fine = runs.back().main();
        long ratio = std::lround(levels[i] / levels.back());
        double e = 0.0;
        for (const auto& l : s.layers) {
            const NullLattice& L = l.lat();
            for (int d = 0; d <= L.Dn; ++d)
                for (int j = 0; j < L.nodes_on(d); ++j) {
                    double a = L.a(j + d), b = L.b(j), t = 0.5 * (a - b), x = 0.5 * (a + b);
                    const double* u = l.node(d, j);
                    const double* ref = exact.data();
                    if (oracle == "geodesic") {
                        std::fill(exact.begin(), exact.end(), 0.0);
                        exact[0] = std::cos(c.data.omega * t);
                        exact[1] = std::sin(c.data.omega * t);
                    } else if (oracle == "traveling_wave") {
                        u0(c.data.direction == "right" ? x - t : x + t, exact.data());
                    } else {
                        ref = fine.find_node((L.I0() + j + d) * ratio, (L.J0() + j) * ratio);
                        if (!ref) fail(Status::Internal, "coarse node missing on the finest level");
                    }
                    for (int q = 0; q < n; ++q) e = std::max(e, std::abs(u[q] - ref[q]));
                }
        }
        err[i] = e;
    }
    std::size_t count = oracle == "finest" ? levels.size() - 1 : levels.size();
    Csv csv(file(out, "convergence.csv"), {"h", "error", "order"});
    json orders = json::array();
    double min_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        std::string ord;
        if (i > 0) {
            double o = std::log(err[i - 1] / err[i]) / std::log(levels[i - 1] / levels[i]);
            if (std::isfinite(o)) {
                ord = num(o);
                orders.push_back(o);
                min_order = std::min(min_order, o);
            } else {
                orders.push_back(nullptr);
            }
        }
        csv.row(std::vector<std::string>{num(levels[i]), num(err[i]), ord});
    }
    json j = header(c, "converge");
    j["oracle"] = oracle;
    j["levels"] = levels;
    j["errors"] = std::vector<double>(err.begin(), err.begin() + static_cast<std::ptrdiff_t>(count));
    j["orders"] = orders;
    j["min_order"] = std::isfinite(min_order) ? json(min_order) : json(nullptr);
    write_json(file(out, "converge.json"), j);
}

void run_command(const RunConfig& c, const std::string& command, const std::string& out) {
    if (command == "solve") return run_solve(c, out);
    if (command == "verify-estimates") return run_verify(c, out);
    if (command == "scatter") return run_scatter(c, out);
    if (command == "converge") return run_converge(c, out);
    fail(Status::ConfigError, "unknown command '" + command + "'");
}

} // namespace wavemap::app
