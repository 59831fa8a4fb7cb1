#ifndef WAVEMAP_LINEAR_WAVE_HPP
#define WAVEMAP_LINEAR_WAVE_HPP

#include <functional>

#include "wavemap/fields.hpp"

namespace wavemap {

// u(t,x) = (u0(x+t) + u0(x-t))/2 + 1/2 int_{x-t}^{x+t} v0 + 1/2 iint_T(t,x) h, evaluated
// exactly for piecewise-linear u0, piecewise-constant v0 and h.
LinearSolution dalembert_solve(const LineData& data, const Field& h);

enum class Direction { Plus, Minus };

// v(t,x) = g(x -+ t) + int_0^t f(s, x -+ t +- s) ds; g has one value per base cell.
AffineField transport_solve(const std::vector<double>& g, const Field& f, Direction dir);

// Smooth test function given with its derivatives (in the lattice's local time).
struct TestFunction {
    std::function<double(double t, double x)> phi;
    std::function<double(double t, double x)> phi_t;
    std::function<double(double t, double x)> box; // phi_tt - phi_xx
};

// Product bump (1-s^2)^4 in t and x around (tc, xc) with radii (rt, rx).
TestFunction product_bump(double tc, double xc, double rt, double rx);

// |iint u (phi_tt - phi_xx) - iint phi h + int u0 phi_t(0,.) - int v0 phi(0,.)|, summed
// over components.
double weak_form_residual(const LinearSolution& s, const TestFunction& phi);

} // namespace wavemap

#endif
