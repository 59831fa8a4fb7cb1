#ifndef WAVEMAP_ESTIMATES_HPP
#define WAVEMAP_ESTIMATES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavemap/solver.hpp"

namespace wavemap {

struct EstimateReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tol = 0.0;
    bool ok = true;
};

EstimateReport make_report(std::string name, double lhs, double rhs, double tol);

// The transport solution v of (g, f) in the given direction on the lattice of f;
// LHS = int |v(t0)| over the slice, RHS = int |g| + iint_{t <= t0} |f|.  l1 norms on R^n.
EstimateReport transport_bound_check(const std::vector<double>& g, const Field& f, Direction dir, int m0,
                                     double tol = 1e-12);

// LHS = iint_{t <= t0} |v+||v-|, RHS = (int|g+| + iint|f+|)(int|g-| + iint|f-|)/2.
EstimateReport zhou_bilinear_check(const std::vector<double>& g_plus, const std::vector<double>& g_minus,
                                   const Field& f_plus, const Field& f_minus, int m0, double tol = 1e-12);

// Q_jk = d_t u_j d_t ubar_k - d_x u_j d_x ubar_k (row-major n x n)
std::vector<double> q_form(const double* ut, const double* ux, const double* ubt, const double* ubx, int n);
// per-cell Q at the centroids
struct QForm {
    int n = 0;
    std::vector<double> q; // n*n per cell
    double l1(int cell) const;
};
QForm q_form(const LinearSolution& u, const LinearSolution& ubar);

// Triangle with apex at global node (I, J) of the lattice of u.  LHS = iint |Q|_l1
// (an upper enclosure when the entries do not factor); RHS = A+ A- for one solution,
// (A+ Abar- + A- Abar+)/2 for a pair.
EstimateReport q_l1_bound_check(const LinearSolution& u, long I, long J, const LinearSolution* ubar = nullptr,
                                double tol = 1e-12);

// Both characteristic energy-flux inequalities at lattice time m0 h (Euclidean norms).
std::pair<EstimateReport, EstimateReport> energy_flux_check(const Solution& s, int m0, double tol = 1e-12);

// |(d_t -+ d_x)u| at offsets (ca, cb) in the cell with global indices (I, J) against the
// characteristic bound; sign = +1 for d_t - d_x.
EstimateReport pointwise_characteristic_bound(const Solution& s, long I, long J, double ca, double cb, int sign,
                                              double tol = 1e-12);

// iint_K sum_j |d_t u_j^2 - d_x u_j^2| <= (int |Du0| + |v0| + iint |f|)^2
EstimateReport spacetime_null_energy_check(const Solution& s, double tol = 1e-12);

// Randomised suites on piecewise-constant lattice data.  Trial k uses the stream
// (seed, k), so results do not depend on the thread count.
enum class Checker { Transport, Zhou, QBound, EnergyFlux, SpacetimeNull };
const char* checker_name(Checker c);
std::vector<EstimateReport> random_suite(Checker c, int trials, std::uint64_t seed, double tol = 1e-12,
                                         int threads = 1);

} // namespace wavemap

#endif
