#ifndef WAVEMAP_GEOMETRY_HPP
#define WAVEMAP_GEOMETRY_HPP

#include <functional>
#include <vector>

#include "wavemap/fields.hpp"

namespace wavemap {

using Vec = std::vector<double>;

// Target manifold embedded in R^n.  The unit sphere has closed-form projections;
// Custom targets supply callbacks honouring the same contracts.
struct Manifold {
    enum class Kind { UnitSphere, Custom };

    Kind kind = Kind::UnitSphere;
    int n = 3;
    double lipschitz_bound_L = 3.0;
    double sup_bound_gamma = 1.0;
    double tubular_radius_eps0 = 0.5;

    // Custom callbacks (points are length-n arrays)
    std::function<double(const double* q)> custom_distance;
    std::function<void(const double* q, double* p)> custom_nearest;
    std::function<void(const double* p, const double* v, double* w)> custom_tangent;
    std::function<void(const double* p, const double* X, const double* Y, double* out)> custom_gamma;

    static Manifold sphere(int n);

    double distance(const double* q) const;
    void nearest_point(const double* q, double* p) const;
    void tangent_project(const double* p, const double* v, double* w) const;
    void normal_project(const double* p, const double* v, double* w) const;
    void christoffel_form(const double* p, const double* X, const double* Y, double* out) const;
    void forcing_project(const double* p, const double* f, double* out) const;

    // Extensions of Gamma and P to all of R^n: nearest-point composition inside the
    // tube, quintic radial cutoff to zero outside.
    double cutoff(const double* q) const;
    void gamma_ext(const double* q, const double* X, const double* Y, double* out) const;
    void forcing_ext(const double* q, const double* f, double* out) const;

    // vector conveniences
    Vec nearest_point(const Vec& q) const;
    Vec tangent_project(const Vec& p, const Vec& v) const;
    Vec normal_project(const Vec& p, const Vec& v) const;
    Vec christoffel_form(const Vec& p, const Vec& X, const Vec& Y) const;
    Vec forcing_project(const Vec& p, const Vec& f) const;
};

struct ExtensionConstants {
    double sup_gamma = 0.0;  // sup |Gamma(q)(X,Y)| / (|X||Y|) and sup |P(q)f| / |f|
    double lipschitz = 0.0;  // largest observed Lipschitz quotient in q
};

// Dense sampling of the extended coefficients over the tube of the given radius
// (Euclidean norms).  Deterministic.
ExtensionConstants measure_extension_constants(const Manifold& M, double radius, int samples);

struct CompatibilityReport {
    double max_defect = 0.0;
    bool ok = true;
};

// u0 is sampled at cell midpoints (projected onto M) and compared with v0 there.
CompatibilityReport check_compatibility(const Manifold& M, const LineData& data, double tol);

// Truncate to [-k, k], mollify at the width chosen from the modulus of continuity,
// then project u onto M and v onto the tangent spaces.
LineData smooth_approximate(const Manifold& M, const LineData& data, int k);

// Bump b(x) = C exp(-1/(1-x^2)) on (-1, 1) with unit mass, and its primitive.
double bump(double x);
double bump_cdf(double x);

// largest distance of a node of u from M
double manifold_defect(const Manifold& M, const LineData& data);

} // namespace wavemap

#endif
