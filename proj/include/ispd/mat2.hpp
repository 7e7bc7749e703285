#ifndef ISPD_MAT2_HPP
#define ISPD_MAT2_HPP

#include <array>
#include <cmath>

namespace ispd {

using Vec2 = std::array<double, 2>;

// Symmetric 2x2 matrix stored densely; used for scores/Hessians of the
// two-parameter correlation model.
struct Mat22 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }

    bool negative_definite() const { return a11 < 0.0 && det() > 0.0; }

    // Solves M x = b. Caller checks det() != 0.
    Vec2 solve(const Vec2& b) const {
        const double d = det();
        return {(a22 * b[0] - a12 * b[1]) / d, (a11 * b[1] - a21 * b[0]) / d};
    }

    Mat22 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    Mat22 negated() const { return {-a11, -a12, -a21, -a22}; }
};

inline double max_abs(const Vec2& v) {
    return std::max(std::abs(v[0]), std::abs(v[1]));
}

}  // namespace ispd

#endif
