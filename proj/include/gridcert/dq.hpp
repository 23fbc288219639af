#pragma once

#include "gridcert/common.hpp"

#include <cmath>

namespace gridcert {

// A direct/quadrature pair in the synchronously rotating frame (p.u.).
struct DqPair {
    double d = 0.0;
    double q = 0.0;

    DqPair() = default;
    DqPair(double d_, double q_) : d(d_), q(q_) {}
    explicit DqPair(const Vector2d& v) : d(v(0)), q(v(1)) {}

    Vector2d vec() const { return {d, q}; }
    double norm() const { return std::hypot(d, q); }
};

// Rotation from the global DQ frame into a local frame at `angle`:
//   T(a) = [[cos a, sin a], [-sin a, cos a]],  T(a)^{-1} = T(a)^T.
inline Matrix2d dq_rotation(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Matrix2d t;
    t << c, s, -s, c;
    return t;
}

} // namespace gridcert
