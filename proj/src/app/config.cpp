#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "wavemap/error.hpp"

namespace wavemap::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    fail(Status::ConfigError, "config: " + where + ": " + what);
}

// strict view of one object: every key must be consumed
class Obj {
public:
    Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) bad(where_, "expected an object");
    }
    ~Obj() noexcept(false) {
        if (std::uncaught_exceptions()) return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) bad(where_, "unknown key '" + it.key() + "'");
    }
    bool has(const std::string& k) {
        seen_.insert(k);
        return j_.contains(k);
    }
    const json& at(const std::string& k) {
        seen_.insert(k);
        return j_.at(k);
    }
    std::string path(const std::string& k) const { return where_.empty() ? k : where_ + "." + k; }

    double num(const std::string& k, double def) {
        if (!has(k)) return def;
        const json& v = at(k);
        if (!v.is_number()) bad(path(k), "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) bad(path(k), "must be finite");
        return x;
    }
    std::optional<double> opt_num(const std::string& k) {
        if (!has(k)) return std::nullopt;
        return num(k, 0.0);
    }
    int integer(const std::string& k, int def) {
        if (!has(k)) return def;
        const json& v = at(k);
        if (!v.is_number_integer()) bad(path(k), "expected an integer");
        return v.get<int>();
    }
    std::string str(const std::string& k, const std::string& def, const std::set<std::string>& allowed = {}) {
        if (!has(k)) return def;
        const json& v = at(k);
        if (!v.is_string()) bad(path(k), "expected a string");
        auto s = v.get<std::string>();
        if (!allowed.empty() && !allowed.count(s)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            bad(path(k), "'" + s + "' is not one of " + list);
        }
        return s;
    }
    std::vector<double> vec(const std::string& k) {
        if (!has(k)) return {};
        const json& v = at(k);
        if (!v.is_array()) bad(path(k), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) bad(path(k), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    std::vector<std::string> strings(const std::string& k) {
        if (!has(k)) return {};
        const json& v = at(k);
        if (!v.is_array()) bad(path(k), "expected an array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) bad(path(k), "expected an array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void positive(double x, const std::string& where) {
    if (!(x > 0.0)) bad(where, "must be positive");
}

bool multiple(double x, double h) {
    double q = x / h;
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

struct Table {
    std::vector<double> x, u, v;
    int n = 0;
};

Table read_table(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) fail(Status::IoError, "cannot read data table " + path);
    Table t;
    t.n = n;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos) continue;
        }
        std::stringstream ss(line);
        std::vector<double> row;
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                bad("data.table", "non-numeric entry in " + path);
            }
        }
        if (static_cast<int>(row.size()) != 1 + 2 * n)
            bad("data.table", "rows need x, " + std::to_string(n) + " position and " + std::to_string(n) +
                                  " velocity columns");
        t.x.push_back(row[0]);
        t.u.insert(t.u.end(), row.begin() + 1, row.begin() + 1 + n);
        t.v.insert(t.v.end(), row.begin() + 1 + n, row.end());
    }
    if (t.x.size() < 2) bad("data.table", "needs at least two rows");
    for (std::size_t i = 1; i < t.x.size(); ++i)
        if (!(t.x[i] > t.x[i - 1])) bad("data.table", "x must be strictly increasing");
    return t;
}

} // namespace

RunConfig parse_config(const json& j, const std::string& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    Obj root(j, "");
    if (root.has("target")) {
        Obj t(root.at("target"), "target");
        t.str("kind", "sphere", {"sphere"});
        c.dim = t.integer("dim", 3);
        if (c.dim < 2 || c.dim > 16) bad("target.dim", "must be between 2 and 16");
    }
    if (!root.has("h")) bad("h", "lattice spacing is required");
    c.h = root.num("h", 0.0);
    positive(c.h, "h");
    if (root.has("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_unsigned()) bad("seed", "expected a non-negative integer");
        c.seed = v.get<std::uint64_t>();
    }
    c.threads = root.integer("threads", 1);
    if (c.threads < 1) bad("threads", "must be at least 1");

    if (root.has("domain")) {
        Obj d(root.at("domain"), "domain");
        auto& s = c.domain;
        s.kind = d.str("kind", "compact", {"compact", "unbounded", "semi_bounded_up", "semi_bounded_down", "concatenated"});
        s.x0 = d.num("x0", 0.0);
        s.L = d.num("L", 1.0);
        s.height = d.num("height", s.kind == "compact" ? s.L : 1.0);
        s.edge = d.num("edge", 0.0);
        s.cutoff = d.num("cutoff", 4.0);
        s.n_max = d.integer("n_max", 1);
        positive(s.height, "domain.height");
        if (s.kind == "compact") {
            positive(s.L, "domain.L");
            if (s.height > s.L * (1 + 1e-12)) bad("domain.height", "must not exceed L");
            if (!multiple(s.x0 - s.L, c.h) || !multiple(2 * s.L, c.h) || !multiple(s.height, c.h))
                bad("domain", "h does not divide the domain extents");
        } else if (s.kind == "concatenated") {
            if (s.n_max < 1) bad("domain.n_max", "must be at least 1");
            if (!multiple(1.0, c.h)) bad("domain", "h does not divide the domain extents");
        } else {
            positive(s.cutoff, "domain.cutoff");
            if (!multiple(s.height, c.h) || !multiple(s.cutoff, c.h) || !multiple(s.edge, c.h))
                bad("domain", "h does not divide the domain extents");
        }
    }

    if (root.has("data")) {
        Obj d(root.at("data"), "data");
        auto& s = c.data;
        s.kind = d.str("kind", "constant", {"constant", "geodesic", "traveling_wave", "bump", "table"});
        s.point = d.vec("point");
        s.velocity = d.vec("velocity");
        s.omega = d.num("omega", 1.0);
        s.scale = d.num("scale", 1.0);
        s.direction = d.str("direction", "right", {"right", "left"});
        s.amp = d.num("amp", 0.5);
        s.vel = d.num("vel", 0.5);
        s.table = d.str("table", "");
        if (s.kind == "constant") {
            if (s.point.empty()) {
                s.point.assign(c.dim, 0.0);
                s.point[0] = 1.0;
            }
            if (static_cast<int>(s.point.size()) != c.dim) bad("data.point", "needs dim entries");
            double r = 0.0;
            for (double x : s.point) r += x * x;
            if (std::abs(std::sqrt(r) - 1.0) > 1e-9) bad("data.point", "must lie on the unit sphere");
            if (s.velocity.empty()) s.velocity.assign(c.dim, 0.0);
            if (static_cast<int>(s.velocity.size()) != c.dim) bad("data.velocity", "needs dim entries");
        }
        if (s.kind == "bump" && c.dim < 3) bad("data.kind", "bump data need dim >= 3");
        if (s.kind == "table") {
            if (s.table.empty()) bad("data.table", "path required");
            namespace fs = std::filesystem;
            fs::path p(s.table);
            if (p.is_relative()) s.table = (fs::path(base_dir) / p).string();
            read_table(s.table, c.dim); // validated now, loaded again when used
        }
    }

    if (root.has("forcing")) {
        Obj f(root.at("forcing"), "forcing");
        auto& s = c.forcing;
        s.kind = f.str("kind", "none", {"none", "constant", "cone", "box"});
        s.value = f.vec("value");
        s.amp = f.num("amp", 0.0);
        s.support = f.num("support", 1.0);
        s.t0 = f.num("t0", 0.0);
        s.t1 = f.num("t1", 1.0);
        s.x0 = f.num("x0", -1.0);
        s.x1 = f.num("x1", 1.0);
        if ((s.kind == "constant" || s.kind == "box") && static_cast<int>(s.value.size()) != c.dim)
            bad("forcing.value", "needs dim entries");
        if (s.kind == "cone") positive(s.support, "forcing.support");
    }

    if (root.has("solver")) {
        Obj s(root.at("solver"), "solver");
        auto& o = c.solver;
        o.tol = s.num("tol", 1e-13);
        o.max_iter = s.integer("max_iter", 200);
        o.compat_tol = s.num("compat_tol", 1e-6);
        o.gamma = s.num("gamma", 1.0);
        o.L_lip = s.num("L_lip", 3.0);
        o.eta = s.opt_num("eta");
        o.tile_delta = s.opt_num("tile_delta");
        positive(o.tol, "solver.tol");
        positive(o.compat_tol, "solver.compat_tol");
        positive(o.gamma, "solver.gamma");
        positive(o.L_lip, "solver.L_lip");
        if (o.max_iter < 1) bad("solver.max_iter", "must be at least 1");
        if (o.eta) positive(*o.eta, "solver.eta");
        if (o.tile_delta && (!(*o.tile_delta > 0.0) || !multiple(*o.tile_delta, 2 * c.h)))
            bad("solver.tile_delta", "must be a positive multiple of 2h");
    }

    if (root.has("estimates")) {
        Obj e(root.at("estimates"), "estimates");
        c.estimates.trials = e.integer("trials", 200);
        c.estimates.tol = e.num("tol", 1e-12);
        c.estimates.checkers = e.strings("checkers");
        if (c.estimates.trials < 1) bad("estimates.trials", "must be at least 1");
        if (!(c.estimates.tol >= 0.0)) bad("estimates.tol", "must be non-negative");
        static const std::set<std::string> known = {"transport_bound", "zhou_bilinear", "q_l1_bound", "energy_flux",
                                                    "spacetime_null_energy"};
        for (const auto& k : c.estimates.checkers)
            if (!known.count(k)) bad("estimates.checkers", "unknown checker '" + k + "'");
    }

    if (root.has("scatter")) {
        Obj s(root.at("scatter"), "scatter");
        auto& o = c.scatter;
        o.mode = s.str("mode", "m_valued", {"m_valued", "rn"});
        o.N = s.integer("N", 512);
        o.t_from = s.opt_num("t_from");
        o.t_to = s.opt_num("t_to");
        o.support = s.opt_num("support");
        o.tol_factor = s.num("tol_factor", 5.0);
        if (o.N < 2 || o.N % 2) bad("scatter.N", "must be an even number >= 2");
        if (o.support) positive(*o.support, "scatter.support");
    }

    if (root.has("converge")) {
        Obj s(root.at("converge"), "converge");
        c.converge.levels = s.vec("levels");
        c.converge.oracle = s.str("oracle", "finest", {"geodesic", "traveling_wave", "finest"});
        for (double x : c.converge.levels) positive(x, "converge.levels");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Status::IoError, "cannot read config " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        fail(Status::ConfigError, std::string("config: malformed JSON: ") + e.what());
    }
    auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config(j, dir.empty() ? "." : dir);
}

Manifold target(const RunConfig& c) { return Manifold::sphere(c.dim); }

LineFn initial_position(const RunConfig& c) {
    const int n = c.dim;
    const auto& d = c.data;
    if (d.kind == "constant") {
        auto p = d.point;
        return [p](double, double* o) { std::copy(p.begin(), p.end(), o); };
    }
    if (d.kind == "geodesic")
        return [n](double, double* o) {
            std::fill(o, o + n, 0.0);
            o[0] = 1.0;
        };
    if (d.kind == "traveling_wave") {
        double s = d.scale;
        return [n, s](double x, double* o) {
            std::fill(o, o + n, 0.0);
            o[0] = std::cos(s * x);
            o[1] = std::sin(s * x);
        };
    }
    if (d.kind == "bump") {
        double a = d.amp;
        return [n, a](double x, double* o) {
            std::fill(o, o + n, 0.0);
            double th = a * bump(x);
            o[0] = std::cos(th);
            o[1] = std::sin(th);
        };
    }
    auto t = std::make_shared<Table>(read_table(d.table, n));
    return [t, n](double x, double* o) {
        const auto& X = t->x;
        std::size_t m = X.size();
        if (x <= X.front()) return std::copy(t->u.begin(), t->u.begin() + n, o), void();
        if (x >= X.back()) return std::copy(t->u.end() - n, t->u.end(), o), void();
        std::size_t i = static_cast<std::size_t>(std::upper_bound(X.begin(), X.end(), x) - X.begin()) - 1;
        i = std::min(i, m - 2);
        double r = (x - X[i]) / (X[i + 1] - X[i]);
        for (int c2 = 0; c2 < n; ++c2) o[c2] = (1 - r) * t->u[i * n + c2] + r * t->u[(i + 1) * n + c2];
    };
}

LineFn initial_velocity(const RunConfig& c) {
    const int n = c.dim;
    const auto& d = c.data;
    if (d.kind == "constant") {
        auto v = d.velocity;
        return [v](double, double* o) { std::copy(v.begin(), v.end(), o); };
    }
    if (d.kind == "geodesic") {
        double w = d.omega;
        return [n, w](double, double* o) {
            std::fill(o, o + n, 0.0);
            o[1] = w;
        };
    }
    if (d.kind == "traveling_wave") {
        // v = -Du0 for a right-moving wave, +Du0 for a left-moving one
        double s = d.scale, sg = d.direction == "right" ? -1.0 : 1.0;
        return [n, s, sg](double x, double* o) {
            std::fill(o, o + n, 0.0);
            o[0] = -sg * s * std::sin(s * x);
            o[1] = sg * s * std::cos(s * x);
        };
    }
    if (d.kind == "bump") {
        double v = d.vel;
        return [n, v](double x, double* o) {
            std::fill(o, o + n, 0.0);
            o[n - 1] = v * bump(x);
        };
    }
    auto t = std::make_shared<Table>(read_table(d.table, n));
    return [t, n](double x, double* o) {
        const auto& X = t->x;
        std::fill(o, o + n, 0.0);
        if (x < X.front() || x >= X.back()) return;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(X.begin(), X.end(), x) - X.begin()) - 1;
        std::copy(t->v.begin() + static_cast<std::ptrdiff_t>(i * n), t->v.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), o);
    };
}

PointFn forcing(const RunConfig& c) {
    const int n = c.dim;
    const auto& f = c.forcing;
    if (f.kind == "none") return nullptr;
    if (f.kind == "constant") {
        auto v = f.value;
        return [v](double, double, double* o) { std::copy(v.begin(), v.end(), o); };
    }
    if (f.kind == "cone") {
        double a = f.amp, S = f.support;
        return [n, a, S](double t, double x, double* o) {
            std::fill(o, o + n, 0.0);
            double r = S - t - std::abs(x);
            if (r > 0.0) o[n - 1] = a * r;
        };
    }
    auto v = f.value;
    double t0 = f.t0, t1 = f.t1, x0 = f.x0, x1 = f.x1;
    return [v, t0, t1, x0, x1](double t, double x, double* o) {
        bool in = t >= t0 && t < t1 && x >= x0 && x < x1;
        for (std::size_t i = 0; i < v.size(); ++i) o[i] = in ? v[i] : 0.0;
    };
}

SolverOptions solver_options(const RunConfig& c) {
    SolverOptions o;
    o.tol = c.solver.tol;
    o.max_iter = c.solver.max_iter;
    o.threads = c.threads;
    o.compat_tol = c.solver.compat_tol;
    o.tile_delta = c.solver.tile_delta;
    if (c.solver.eta || c.solver.gamma != 1.0 || c.solver.L_lip != 3.0) {
        o.budget = select_budget(c.solver.gamma, c.solver.L_lip);
        if (c.solver.eta) o.budget->eta = *c.solver.eta;
    }
    return o;
}

} // namespace wavemap::app
