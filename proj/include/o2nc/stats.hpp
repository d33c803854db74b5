#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace o2nc {

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;  // standard error of the mean (0 for n < 2)
    std::size_t n = 0;
};

inline MeanSem mean_sem(const std::vector<double>& xs) {
    MeanSem r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - r.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(r.n - 1);
    r.sem = std::sqrt(var / static_cast<double>(r.n));
    return r;
}

}  // namespace o2nc
