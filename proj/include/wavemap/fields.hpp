#ifndef WAVEMAP_FIELDS_HPP
#define WAVEMAP_FIELDS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "wavemap/domain.hpp"

namespace wavemap {

// Data on a base interval: a continuous piecewise-linear curve (node values) and a
// piecewise-constant field (one value per cell), both R^n valued.  Nodes sit at
// x_k = origin + (k0 + k) h, k = 0..N.
struct LineData {
    double origin = 0.0;
    double h = 1.0;
    long k0 = 0;
    int N = 0;
    int n = 1;
    std::vector<double> u; // (N+1)*n
    std::vector<double> v; // N*n

    static LineData zeros(double origin, double h, long k0, int N, int n);

    double x(int k) const { return origin + static_cast<double>(k0 + k) * h; }
    double* u_at(int k) { return u.data() + static_cast<std::size_t>(k) * n; }
    const double* u_at(int k) const { return u.data() + static_cast<std::size_t>(k) * n; }
    double* v_at(int k) { return v.data() + static_cast<std::size_t>(k) * n; }
    const double* v_at(int k) const { return v.data() + static_cast<std::size_t>(k) * n; }
    double Du(int k, int c) const { return (u[(k + 1) * n + c] - u[k * n + c]) / h; }
    Interval interval() const { return {x(0), x(N)}; }

    // cells [k_lo, k_hi)
    LineData restrict_to(int k_lo, int k_hi) const;
    // piecewise-linear evaluation with constant extension outside the interval
    void eval_u(double x, double* out) const;
};

double sup_norm(const LineData& d);         // sup of |u|_1 over nodes
double w11_seminorm(const LineData& d);     // ||Du||_1
double l1_norm_v(const LineData& d);        // ||v||_1
double l11_norm(const LineData& d);         // sup|u| + ||Du||_1 + ||v||_1
double char_mass(const LineData& d, int sign); // ||v + sign*Du||_1

// Lattice in null coordinates a = x + t, b = x - t.  Global indices: node (I, J) sits
// at a = origin + I h, b = origin + J h.  The lattice covers the compact trapezoid
// whose base is the slice t = m h between base nodes k0 .. k0+N, with height M h.
// Local cell (d, j) is the square [a_i, a_{i+1}] x [b_j, b_{j+1}] with i = j + d,
// clipped to the trapezoid: d = 0 cells are lower half-squares, and d = 2M cells
// (when present) are upper half-squares.
struct NullLattice {
    enum class Shape { Full, Base, Top };

    double origin = 0.0;
    double h = 1.0;
    long k0 = 0;
    long m = 0;
    int N = 0;
    int M = 0;
    int D = 0;  // largest cell diagonal
    int Dn = 0; // largest node diagonal
    std::vector<int> cell_off;
    std::vector<int> node_off;

    static NullLattice make(double origin, double h, long k0, long m, int N, int M);

    long I0() const { return k0 + m; }
    long J0() const { return k0 - m; }
    double t_base() const { return static_cast<double>(m) * h; }
    double x_base(int k) const { return origin + static_cast<double>(k0 + k) * h; }
    double a(long i) const { return origin + static_cast<double>(I0() + i) * h; }
    double b(long j) const { return origin + static_cast<double>(J0() + j) * h; }

    int num_cells() const { return cell_off.empty() ? 0 : cell_off.back(); }
    int num_nodes() const { return node_off.empty() ? 0 : node_off.back(); }
    int cells_on(int d) const { return N - d; }
    int nodes_on(int d) const { return N - d + 1; }
    int cell(int d, int j) const { return cell_off[d] + j; }
    int node(int d, int j) const { return node_off[d] + j; }

    Shape shape(int d) const;
    double area(int d) const; // (t, x) area
    void centroid(int d, double& ca, double& cb) const;
    // (t, x) of the point at offsets (ca, cb) from the lower-left corner of cell (d, j)
    void point(int d, int j, double ca, double cb, double& t, double& x) const;

    Trapezoid trapezoid() const; // in local time (t measured from t_base)
    bool same_as(const NullLattice& o) const;
    // lattice over the base cells [k_lo, k_hi) with height Mh (clipped to this one)
    NullLattice sub(int k_lo, int k_hi, int Mh) const;
    // true if the cells of o are cells of this lattice (same base time)
    bool contains_lattice(const NullLattice& o) const;
};

// Lattice of spacing h covering a compact trapezoid (base time 0); the base end
// points and the height must be multiples of h measured from `origin`.
NullLattice lattice_for(const Trapezoid& K, double h, double origin = 0.0);

// Piecewise-constant (per cell) R^n field.
struct Field {
    NullLattice lat;
    int n = 1;
    std::vector<double> vals;

    static Field zeros(const NullLattice& lat, int n);
    double* at(int c) { return vals.data() + static_cast<std::size_t>(c) * n; }
    const double* at(int c) const { return vals.data() + static_cast<std::size_t>(c) * n; }
    // copy of the values on a sub-lattice (same base time)
    Field restrict_to(const NullLattice& sub) const;
};

// Per-cell affine R^n field v = alpha + beta*(a - a_i) + gamma*(b - b_j).
struct AffineField {
    NullLattice lat;
    int n = 1;
    std::vector<double> coef; // 3n per cell: alpha, beta, gamma

    static AffineField zeros(const NullLattice& lat, int n);
    double* at(int c) { return coef.data() + static_cast<std::size_t>(c) * 3 * n; }
    const double* at(int c) const { return coef.data() + static_cast<std::size_t>(c) * 3 * n; }
    void eval(int c, double ca, double cb, double* out) const;
};

// Linear-wave solution reconstructed from (data, h): node values of u and the
// affine characteristic derivatives v+ = (d_t - d_x)u, v- = (d_t + d_x)u per cell.
struct LinearSolution {
    LineData data;
    Field h;
    AffineField vp;
    AffineField vm;
    std::vector<double> node_u;

    const NullLattice& lat() const { return h.lat; }
    int n() const { return h.n; }
    const double* node(int d, int j) const { return node_u.data() + static_cast<std::size_t>(h.lat.node(d, j)) * h.n; }
    // u at offsets (ca, cb) inside cell (d, j)
    void u_in_cell(int d, int j, double ca, double cb, double* out) const;
};

struct SliceTrace {
    double t = 0.0;
    LineData data;          // u nodes and d_t u per segment
    std::vector<double> ux; // d_x u per segment
};

using PointFn = std::function<void(double t, double x, double* out)>;
using LineFn = std::function<void(double x, double* out)>;

// Node samples of u and cell averages of v over the base cells of a lattice.
LineData sample_line(double origin, double h, long k0, int N, int n, const LineFn& u, const LineFn& v);
LineData sample_line(const NullLattice& lat, int n, const LineFn& u, const LineFn& v);
// Cell values taken at cell centroids (absolute time).
Field sample_field(const NullLattice& lat, int n, const PointFn& f);

// ||f||_1 over the whole lattice, or over a compact sub-region aligned with it
// (region given in the lattice's local time).
double l1_norm(const Field& f);
double l1_norm(const Field& f, const Trapezoid& region);

// characteristic transport: v(t,x) = g(x -+ t) + int_0^t f(s, x -+ t +- s) ds,
// sign = +1 for the plus family (constant along x - t), -1 for minus.
AffineField transport_field(const std::vector<double>& g, const Field& f, int sign);

// v+ and v- of the mild solution with data (u0, v0) and inhomogeneity h
std::pair<AffineField, AffineField> characteristic_derivatives(const LineData& data, const Field& h);

SliceTrace trace(const LinearSolution& s, int m_rel);

// sup|u| + sup over lattice slices of int (|d_x u| + |d_t u|); with `other`, the
// norm of the difference of two solutions on the same lattice.
double h_norm(const LinearSolution& s, const LinearSolution* other = nullptr);

// exact int_0^len |p + q s| ds
double abs_linear_integral(double p, double q, double len);

} // namespace wavemap

#endif
