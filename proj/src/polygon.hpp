#ifndef WAVEMAP_SRC_POLYGON_HPP
#define WAVEMAP_SRC_POLYGON_HPP

#include <array>
#include <cmath>
#include <vector>

namespace wavemap::detail {

using P2 = std::array<double, 2>;
using Poly = std::vector<P2>;

// keep the part where c0 + ca*alpha + cb*beta has the given sign (>= 0 for +1)
inline Poly clip(const Poly& P, double c0, double ca, double cb, int sign) {
    Poly out;
    const std::size_t n = P.size();
    if (n == 0) return out;
    auto val = [&](const P2& p) { return sign * (c0 + ca * p[0] + cb * p[1]); };
    for (std::size_t i = 0; i < n; ++i) {
        const P2& A = P[i];
        const P2& B = P[(i + 1) % n];
        double va = val(A), vb = val(B);
        if (va >= 0) out.push_back(A);
        if ((va >= 0) != (vb >= 0)) {
            double r = va / (va - vb);
            out.push_back({A[0] + r * (B[0] - A[0]), A[1] + r * (B[1] - A[1])});
        }
    }
    if (out.size() < 3) out.clear();
    return out;
}

inline double poly_area(const Poly& P) {
    double a = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const P2& A = P[i];
        const P2& B = P[(i + 1) % P.size()];
        a += A[0] * B[1] - A[1] * B[0];
    }
    return 0.5 * std::abs(a);
}

} // namespace wavemap::detail

#endif
