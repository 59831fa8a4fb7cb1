#ifndef WAVEMAP_MARCH_HPP
#define WAVEMAP_MARCH_HPP

// Closed-form coefficients of the characteristic derivatives on one cell, given the
// running column/row sums of the inhomogeneity.  Shared by the linear solver, the
// transport solver and the causal sweep of the nonlinear solver so that every path
// performs the same floating-point operations.

namespace wavemap::detail {

// v+ on cell (j + d, j): g = g+ on base cell j, hb = h on base cell (0, j),
// hs = h on this cell, col = sum of h over cells (j+1..j+d-1, j).
inline void plus_coef(int d, int n, double h, const double* g, const double* hb, const double* hs,
                      const double* col, double* out) {
    double* al = out;
    double* be = out + n;
    double* ga = out + 2 * n;
    if (d == 0) {
        for (int c = 0; c < n; ++c) {
            al[c] = g[c];
            be[c] = 0.5 * hs[c];
            ga[c] = -0.5 * hs[c];
        }
        return;
    }
    for (int c = 0; c < n; ++c) {
        al[c] = g[c] + 0.5 * (hb[c] * h + h * col[c]);
        be[c] = 0.5 * hs[c];
        ga[c] = -0.5 * hb[c];
    }
}

// v- on cell (i, i - d): g = g- on base cell i, hb = h on base cell (0, i),
// hs = h on this cell, row = sum of h over cells (i, i-1 .. i-d+1).
inline void minus_coef(int d, int n, double h, const double* g, const double* hb, const double* hs,
                       const double* row, double* out) {
    double* al = out;
    double* be = out + n;
    double* ga = out + 2 * n;
    if (d == 0) {
        for (int c = 0; c < n; ++c) {
            al[c] = g[c];
            be[c] = 0.5 * hs[c];
            ga[c] = -0.5 * hs[c];
        }
        return;
    }
    for (int c = 0; c < n; ++c) {
        al[c] = g[c] + 0.5 * (hs[c] * h + h * row[c]);
        be[c] = 0.5 * hb[c];
        ga[c] = -0.5 * hs[c];
    }
}

inline void eval_affine(const double* k, int n, double ca, double cb, double* out) {
    for (int c = 0; c < n; ++c) out[c] = k[c] + k[n + c] * ca + k[2 * n + c] * cb;
}

// u at (ca, cb) from the lower-left corner value u0, integrating du = v-/2 da - v+/2 db
inline void u_offset(const double* u0, const double* kp, const double* km, int n, double ca, double cb,
                     double* out) {
    for (int c = 0; c < n; ++c) {
        double am = km[c], bm = km[n + c];
        double ap = kp[c], bp = kp[n + c], gp = kp[2 * n + c];
        out[c] = u0[c] + 0.5 * (am * ca + 0.5 * bm * ca * ca) - 0.5 * (ap * cb + bp * ca * cb + 0.5 * gp * cb * cb);
    }
}

// node above along the column: u(i+1, j) from u(i, j) and v- of cell (i, j)
inline void u_step(const double* u0, const double* km, int n, double h, double* out) {
    for (int c = 0; c < n; ++c) out[c] = u0[c] + 0.5 * h * (km[c] + 0.5 * km[n + c] * h);
}

} // namespace wavemap::detail

#endif
