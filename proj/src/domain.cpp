#include "wavemap/domain.hpp"

#include <cmath>

#include "wavemap/error.hpp"

namespace wavemap {

Trapezoid Trapezoid::compact(double x0, double L, double t0) {
    if (!(L > 0.0) || !(t0 >= 0.0) || t0 > L)
        fail(Status::ConfigError, "compact trapezoid needs L > 0 and 0 <= t0 <= L");
    Trapezoid K;
    K.kind = Kind::Compact;
    K.x0 = x0;
    K.L = L;
    K.height = t0;
    return K;
}

Trapezoid Trapezoid::unbounded(double height) {
    if (!(height > 0.0)) fail(Status::ConfigError, "height must be positive");
    Trapezoid K;
    K.kind = Kind::Unbounded;
    K.height = height;
    return K;
}

Trapezoid Trapezoid::semi_bounded_up(double b, double height) {
    if (!(height > 0.0)) fail(Status::ConfigError, "height must be positive");
    Trapezoid K;
    K.kind = Kind::SemiBoundedUp;
    K.edge = b;
    K.height = height;
    return K;
}

Trapezoid Trapezoid::semi_bounded_down(double a, double height) {
    if (!(height > 0.0)) fail(Status::ConfigError, "height must be positive");
    Trapezoid K;
    K.kind = Kind::SemiBoundedDown;
    K.edge = a;
    K.height = height;
    return K;
}

Interval Trapezoid::slice(double t) const {
    if (t < 0.0 || t > height) return {};
    switch (kind) {
    case Kind::Compact: return {x0 - L + t, x0 + L - t};
    case Kind::Unbounded: return {-kInf, kInf};
    case Kind::SemiBoundedUp: return {edge + t, kInf};
    case Kind::SemiBoundedDown: return {-kInf, edge - t};
    }
    return {};
}

bool Trapezoid::contains(double t, double x) const { return slice(t).contains(x); }

DependenceTriangle dependence_triangle(const Trapezoid& K, double t0, double x0) {
    if (!K.contains(t0, x0)) fail(Status::OutsideDomain, "apex outside the trapezoid");
    return {t0, x0, {x0 - t0, x0 + t0}};
}

std::vector<Trapezoid> tile_cover(const Trapezoid& K, double delta, bool strict, double height_fraction) {
    if (K.kind != Trapezoid::Kind::Compact) fail(Status::ConfigError, "tile_cover needs a compact trapezoid");
    if (!(delta > 0.0)) fail(Status::ConfigError, "delta must be positive");
    double tile_h = std::min(height_fraction * delta, K.height);
    if (delta > K.L / 2.0) {
        if (strict) fail(Status::DeltaTooLarge, "delta exceeds half of the half-length");
        double L = K.L;
        return {Trapezoid::compact(K.x0, L, std::min(std::min(delta, L), K.height))};
    }
    std::vector<Trapezoid> tiles;
    double first = K.x0 - K.L + delta;
    double last = K.x0 + K.L - delta;
    double stride = delta / 2.0;
    long count = static_cast<long>(std::floor((last - first) / stride + 1e-9));
    for (long s = 0; s <= count; ++s) {
        double c = first + static_cast<double>(s) * stride;
        if (c > last) c = last;
        tiles.push_back(Trapezoid::compact(c, delta, tile_h));
    }
    if (tiles.back().x0 < last) tiles.push_back(Trapezoid::compact(last, delta, tile_h));
    return tiles;
}

std::pair<double, double> to_null(double t, double x) { return {x + t, x - t}; }

std::pair<double, double> from_null(double a, double b) {
    if (a < b) fail(Status::CausalityViolated, "null point with a < b");
    return {(a - b) / 2.0, (a + b) / 2.0};
}

} // namespace wavemap
