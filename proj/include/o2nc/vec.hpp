#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace o2nc {

// All iterates live in plain dense R^d vectors.
using Vec = std::vector<double>;

inline Vec zeros(std::size_t dim) { return Vec(dim, 0.0); }

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sq_norm(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(sq_norm(a)); }

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(const Vec& a, double c) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

// a + c*b
inline Vec axpy(const Vec& a, double c, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
    return r;
}

// r += c*b, in place
inline void axpy_inplace(Vec& r, double c, const Vec& b) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * b[i];
}

inline double sq_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace o2nc
