#ifndef WAVEMAP_SCATTERING_HPP
#define WAVEMAP_SCATTERING_HPP

#include <vector>

#include "wavemap/estimates.hpp"

namespace wavemap {

// Free-wave data on a lattice line.  As everywhere, u is extended by its end
// values and v by zero outside the stored interval.
struct ScatteringData {
    LineData data;
};

// S(t) applied to lattice data; t must be an integer multiple of h (negative t is
// the inverse group).  The result lives on the base widened by |t| on both sides.
SliceTrace free_wave(const LineData& data, double t);

// L^{1,1} distance sup|u - u'| + ||D(u - u')||_1 + ||v - v'||_1 of two data sets on
// lattices with the same spacing and origin (extensions included).
double l11_distance(const LineData& a, const LineData& b);

// R^n scattering data (u0, v0) + int_0^inf S(-tau)(0, f(tau)) dtau, exact for forcing
// that is piecewise constant on the cells of the given null lattices.  `tail_mass`
// certifies the forcing mass not represented by `f`; it must not exceed tol.
ScatteringData scattering_data_rn(const LineData& data, const std::vector<Field>& f, double tail_mass = 0.0,
                                  double tol = 1e-12);
// forcing sampled at cell centroids on [0, cutoff_T] x (base widened by 2 cutoff_T)
ScatteringData scattering_data_rn(const LineData& data, const PointFn& f, double cutoff_T, double tail_mass = 0.0,
                                  double tol = 1e-12);

// S(-t)(u(t), d_t u(t)) for the lattice slice at local index m of a solution
LineData pull_back(const Solution& s, int m);

struct DefectTriple {
    double t = 0.0;
    double sup = 0.0;
    double l1_ut = 0.0;
    double l1_ux = 0.0;
};
// u(t) - S(t)(data_L) on the slice at local index m of the solution
DefectTriple scattering_defect(const Solution& s, const ScatteringData& L, int m);

// Problem transported to the triangle with base [-pi/2, pi/2] and apex (pi/2, 0)
// by (A, B) = (atan a, atan b) in null coordinates.
struct CompactifiedProblem {
    NullLattice lat; // N cells on the base, height N/2
    LineData data;   // U0 at nodes, V0 cell averages
    Field F;         // conservative cell averages of the weighted forcing
    double data_norm = 0.0;          // ||(u0, v0)||_{L^{1,1}}
    double compact_data_norm = 0.0;  // ||(U0, V0)||_{L^{1,1}}
    double forcing_norm = 0.0;       // ||f||_1 over the physical cells
    double compact_forcing_norm = 0.0;
};

// `f` are piecewise-constant fields on physical null lattices (may be empty).  With a
// manifold, V0 is projected onto the tangent space at the segment midpoints.
CompactifiedProblem compactify(const LineData& data, const std::vector<Field>& f, int N,
                               const Manifold* M = nullptr);

struct MScattering {
    CompactifiedProblem problem;
    Solution compact;
    ScatteringData data_L;
};

// Solve the compactified problem on the whole triangle and read the free wave off its
// two null-infinity edges: u_L(t, x) = Phi(atan(x + t)) + Psi(atan(x - t)) - c.  The
// returned data live on `out` (spacing, origin and base of the output lattice line).
MScattering scatter_m_valued(const Manifold& M, const LineData& data, const std::vector<Field>& f, int N,
                             const LineData& out, const SolverOptions& opt = {});

std::vector<DefectTriple> defect_series(const Solution& s, const ScatteringData& L, int m_from, int m_to);

// For data supported in [-S, S] and forcing in the cone over it: v+ = 0 on cells with
// x - t outside [-S, S], v- = 0 on cells with x + t outside, and u constant on each
// of the three exterior regions.
std::vector<EstimateReport> support_cone_check(const Solution& s, double S, double tol);

} // namespace wavemap

#endif
