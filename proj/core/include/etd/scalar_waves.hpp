#pragma once

#include <array>

#include "etd/tensor.hpp"

namespace etd {

// H_n^(1)(x) = J_n(x) + i Y_n(x) for n in 0..5, x > 0.
cplx hankel1(int n, double x);

// H_0 .. H_nmax written to out[0..nmax]; nmax <= 5.
void hankel1_seq(double x, int nmax, cplx* out);

// Outgoing Green function of (Delta + kappa^2): -(i/4) H_0(kappa r) in 2D,
// -exp(i kappa r) / (4 pi r) in 3D.
cplx green_scalar(int d, double kappa, double r);

// f_k(r) = ((1/r) d/dr)^k g(r), k = 0..order, for the radial profile g of G.
std::array<cplx, 5> radial_derivs(int d, double kappa, double r, int order);

// Imaginary parts of f_k; entire functions of r, valid at r = 0.
std::array<double, 5> im_radial_derivs(int d, double kappa, double r, int order);

// Cartesian derivatives of G up to the requested order. g1_i = d_i G,
// g2_ij = d_ij G, and so on; each tensor is symmetric in its indices.
template <class T>
struct DerivSet {
    int d = 2;
    int order = 0;
    T g{};
    Vec<T> g1;
    Mat<T> g2;
    Ten3<T> g3;
    Ten4<T> g4;
};

DerivSet<cplx> green_derivs(int d, double kappa, const Point& x, int order);
DerivSet<double> im_green_derivs(int d, double kappa, const Point& x, int order);

// Radial chain rule: with f_k as above, d_i f_k = x_i f_{k+1}.
template <class T>
DerivSet<T> assemble_radial(const Point& x, const T* f, int order) {
    DerivSet<T> s;
    const int d = x.d;
    s.d = d;
    s.order = order;
    s.g1.d = s.g2.d = s.g3.d = s.g4.d = d;
    s.g = f[0];
    if (order >= 1)
        for (int i = 0; i < d; ++i) s.g1[i] = x[i] * f[1];
    if (order >= 2)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s.g2(i, j) = (i == j ? f[1] : T{}) + x[i] * x[j] * f[2];
    if (order >= 3) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double lin = (i == j ? x[k] : 0.0) + (i == k ? x[j] : 0.0) + (j == k ? x[i] : 0.0);
                    s.g3(i, j, k) = lin * f[2] + x[i] * x[j] * x[k] * f[3];
                }
    }
    if (order >= 4) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) {
                        auto dl = [](int p, int q) { return p == q ? 1.0 : 0.0; };
                        double c0 = dl(i, j) * dl(k, l) + dl(i, k) * dl(j, l) + dl(i, l) * dl(j, k);
                        double c1 = dl(i, j) * x[k] * x[l] + dl(i, k) * x[j] * x[l] + dl(i, l) * x[j] * x[k] +
                                    dl(j, k) * x[i] * x[l] + dl(j, l) * x[i] * x[k] + dl(k, l) * x[i] * x[j];
                        s.g4(i, j, k, l) = c0 * f[2] + c1 * f[3] + x[i] * x[j] * x[k] * x[l] * f[4];
                    }
    }
    return s;
}

}  // namespace etd
