#pragma once

#include <random>

#include "etd/tensor.hpp"

namespace test {

// Random point with r in [rmin, rmax], uniform direction.
inline etd::Point random_point(std::mt19937_64& rng, int d, double rmin, double rmax) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(rmin, rmax);
    etd::Point p = etd::zero_point(d);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        p[i] = n(rng);
        s += p[i] * p[i];
    }
    const double r = u(rng) / std::sqrt(s);
    for (int i = 0; i < d; ++i) p[i] *= r;
    return p;
}

inline etd::Point shifted(const etd::Point& x, int axis, double h) {
    etd::Point y = x;
    y[axis] += h;
    return y;
}

template <class Tn>
double rel_diff(const Tn& a, const Tn& b) {
    const double den = std::max(etd::fnorm(a), etd::fnorm(b));
    return den == 0.0 ? 0.0 : etd::fnorm(etd::sub(a, b)) / den;
}

}  // namespace test
