#ifndef WAVEMAP_APP_CONFIG_HPP
#define WAVEMAP_APP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavemap/scattering.hpp"

namespace wavemap::app {

struct DomainSpec {
    std::string kind = "compact"; // compact | unbounded | semi_bounded_up | semi_bounded_down | concatenated
    double x0 = 0.0;
    double L = 1.0;
    double height = 1.0;
    double edge = 0.0;
    double cutoff = 4.0; // unbounded kinds: data beyond |x| > cutoff are constant
    int n_max = 1;       // concatenated: triangles over [-k, k], k = 1..n_max
};

struct DataSpec {
    std::string kind = "constant"; // constant | geodesic | traveling_wave | bump | table
    std::vector<double> point;
    std::vector<double> velocity;
    double omega = 1.0;
    double scale = 1.0;
    std::string direction = "right";
    double amp = 0.5;
    double vel = 0.5;
    std::string table;
};

struct ForcingSpec {
    std::string kind = "none"; // none | constant | cone | box
    std::vector<double> value;
    double amp = 0.0;
    double support = 1.0;
    double t0 = 0.0, t1 = 1.0, x0 = -1.0, x1 = 1.0;
};

struct SolverSpec {
    double tol = 1e-13;
    int max_iter = 200;
    double compat_tol = 1e-6;
    double gamma = 1.0;
    double L_lip = 3.0;
    std::optional<double> eta;
    std::optional<double> tile_delta;
};

struct EstimatesSpec {
    int trials = 200;
    double tol = 1e-12;
    std::vector<std::string> checkers;
};

struct ScatterSpec {
    std::string mode = "m_valued"; // m_valued | rn
    int N = 512;
    std::optional<double> t_from, t_to;
    std::optional<double> support;
    double tol_factor = 5.0; // cone check tolerance in units of h
};

struct ConvergeSpec {
    std::vector<double> levels;
    std::string oracle = "finest"; // geodesic | traveling_wave | finest
};

struct RunConfig {
    int dim = 3;
    double h = 1.0 / 32;
    DomainSpec domain;
    DataSpec data;
    ForcingSpec forcing;
    SolverSpec solver;
    EstimatesSpec estimates;
    ScatterSpec scatter;
    ConvergeSpec converge;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string base_dir; // for relative table paths
};

// Validates the whole document (unknown keys, types, ranges) before returning.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

Manifold target(const RunConfig& c);
LineFn initial_position(const RunConfig& c);
LineFn initial_velocity(const RunConfig& c);
PointFn forcing(const RunConfig& c);
SolverOptions solver_options(const RunConfig& c);

} // namespace wavemap::app

#endif
