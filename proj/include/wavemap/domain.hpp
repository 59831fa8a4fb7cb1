#ifndef WAVEMAP_DOMAIN_HPP
#define WAVEMAP_DOMAIN_HPP

#include <limits>
#include <utility>
#include <vector>

namespace wavemap {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = -1.0;
    bool empty() const { return !(lo <= hi); }
    double length() const { return empty() ? 0.0 : hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct Trapezoid {
    enum class Kind { Compact, Unbounded, SemiBoundedUp, SemiBoundedDown };

    Kind kind = Kind::Compact;
    double x0 = 0.0;     // Compact: base centre
    double L = 0.0;      // Compact: half-length of the base
    double height = 0.0; // time extent (Compact: t0 <= L)
    double edge = 0.0;   // SemiBoundedUp: b, SemiBoundedDown: a

    static Trapezoid compact(double x0, double L, double t0);
    static Trapezoid unbounded(double height);
    static Trapezoid semi_bounded_up(double b, double height);
    static Trapezoid semi_bounded_down(double a, double height);

    Interval base() const { return slice(0.0); }
    Interval slice(double t) const;
    bool contains(double t, double x) const;
};

struct DependenceTriangle {
    double t0 = 0.0;
    double x0 = 0.0;
    Interval base;
};

DependenceTriangle dependence_triangle(const Trapezoid& K, double t0, double x0);

// Overlapping cover of the bottom slab of a compact trapezoid.  Tiles have base
// half-width delta, centres spaced delta/2, and height height_fraction*delta.
std::vector<Trapezoid> tile_cover(const Trapezoid& K, double delta, bool strict = true,
                                  double height_fraction = 0.5);

std::pair<double, double> to_null(double t, double x);
std::pair<double, double> from_null(double a, double b);

} // namespace wavemap

#endif
