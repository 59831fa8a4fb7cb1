#ifndef WAVEMAP_SOLVER_HPP
#define WAVEMAP_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "wavemap/geometry.hpp"
#include "wavemap/linear_wave.hpp"

namespace wavemap {

struct ContractionBudget {
    double eta = 0.0;
    double R = 0.0;
    double gamma = 1.0;
    double L_lip = 1.0;
};

ContractionBudget select_budget(double gamma, double L_lip);

struct BudgetCheck {
    double invariance = 0.0;  // (eta+R)^2 + eta - R/gamma      (<= 0)
    double sufficient = 0.0;  // 2 eta^2 + 2 R^2 + eta - R/gamma (<= 0)
    double contraction = 0.0; // L (eta+R)^2 + 5 gamma eta + 4 gamma R - 1/2 (< 0)
    bool ok = false;
};
BudgetCheck check_budget(const ContractionBudget& b);

enum class Path { SmallData, Tiled, Continued, Concatenated };
const char* path_name(Path p);

struct Diagnostics {
    Path path = Path::SmallData;
    int iterations = 0;          // Jacobi sweeps summed over all Picard runs
    double final_residual = 0.0; // largest ||Phi(h) - h||_1 over all pieces
    double max_ratio = 0.0;
    std::vector<double> ratios;     // successive increment ratios, all runs concatenated
    std::vector<double> ball_norms; // ||h_k||_1 of every iterate
    std::vector<double> deltas;     // local height chosen for each layer (0 when not tiled)
    std::vector<int> schedule;      // layer heights in lattice steps
    std::vector<std::string> layer_paths;
    int tiles = 0;
    int settle_sweeps = 0;       // largest number of per-cell sweeps in the causal pass
    double manifold_defect = 0.0;
    double compat_defect = 0.0;  // largest normal defect of (u, d_t u) over trace times
};

struct Solution {
    Trapezoid domain;
    std::vector<LinearSolution> layers;
    std::vector<Field> forcing; // forcing sampled on each layer's lattice
    Diagnostics diag;

    // node with global null indices (I, J); nullptr if not on any layer
    const double* find_node(long I, long J) const;
    int n() const { return layers.empty() ? 0 : layers.front().n(); }
};

struct SolverOptions {
    std::optional<ContractionBudget> budget; // default: select_budget from the manifold constants
    double tol = 1e-13;                     // Picard stopping threshold on ||h_{k+1} - h_k||_1
    int max_iter = 200;
    int threads = 1;
    double compat_tol = 1e-6;
    // tile every layer with this half-width even when the data are small
    std::optional<double> tile_delta;
};

ContractionBudget budget_for(const Manifold& M, const SolverOptions& opt);

// Phi(h): the cell values of Gamma(u)(Q(u,u)) + P(u) f at the cell centroids, u the
// linear solution with data and inhomogeneity h.
Field phi_map(const Manifold& M, const Field& h, const LineData& data, const Field& f);

// Small-data Picard iteration on the lattice of f (data must sit on its base).
Solution picard_solve_small(const Manifold& M, const LineData& data, const Field& f, const ContractionBudget& budget,
                            double tol = 1e-13, int max_iter = 200);

// Height of the tiles for data on the base of the lattice of f.  Multiple of 2h.
double find_local_height(const LineData& data, const Field& f, double eta);

Field sample_forcing(const NullLattice& lat, int n, const PointFn& f);

Solution solve_local_large(const Manifold& M, const LineData& data, const PointFn& f, const Trapezoid& K,
                           const SolverOptions& opt = {});

// Layered continuation to the top of K.  With a schedule, the layer boundaries are
// taken from it (so that solutions on nested domains agree bitwise).
Solution solve_global(const Manifold& M, const LineData& data, const PointFn& f, const Trapezoid& K,
                      const SolverOptions& opt = {}, const std::vector<int>* schedule = nullptr);

struct UnboundedSolution {
    Trapezoid domain;
    double a = 0.0, b = 0.0; // tails live beyond a (left) and b (right)
    Solution core;
    std::optional<Solution> left, right;
    Diagnostics diag;
    const double* find_node(long I, long J) const;
};

// Data outside [-cutoff, cutoff] are replaced by the constant extension of u0 and
// v0 = 0; the forcing is sampled everywhere it is needed.
UnboundedSolution solve_unbounded(const Manifold& M, const LineFn& u0, const LineFn& v0, int n, const PointFn& f,
                                  const Trapezoid& K, double h, double cutoff, const SolverOptions& opt = {});

// Solutions on the triangles with base [-k, k], k = 1..n_max, each extending the
// previous one.
std::vector<Solution> solve_concatenated(const Manifold& M, const LineFn& u0, const LineFn& v0, int n,
                                         const PointFn& f, double h, int n_max, const SolverOptions& opt = {});

// sup over shared nodes of |u_a - u_b| plus the largest integral over a shared lattice
// slice of |d_t(u_a - u_b)| + |d_x(u_a - u_b)| (the h-norm of the difference)
double solution_distance(const Solution& a, const Solution& b);

// global null indices of (t, x) on a lattice with this origin and spacing
std::pair<long, long> null_index(double t, double x, double h, double origin = 0.0);

} // namespace wavemap

#endif
