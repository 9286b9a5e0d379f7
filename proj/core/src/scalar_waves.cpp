#include "etd/scalar_waves.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace etd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;
// Below this argument J_0, J_1 come from Miller's backward recurrence and
// Y_0, Y_1 from Neumann series; above it the Hankel asymptotic expansion is
// converged to machine precision.
constexpr double kAsymptoticSwitch = 25.0;
// Below this argument Im f_k is summed from its power series in z^2.
constexpr double kImSeriesSwitch = 4.0;

void h01_miller(double x, cplx& h0, cplx& h1) {
    const int m = 2 * static_cast<int>((x + 10.0 * std::cbrt(x) + 20.0) / 2.0);
    std::array<double, 128> j{};
    j[m + 1] = 0.0;
    j[m] = 1e-300;
    for (int k = m; k > 0; --k) {
        j[k - 1] = 2.0 * k / x * j[k] - j[k + 1];
        if (std::abs(j[k - 1]) > 1e250)
            for (int i = k - 1; i <= m + 1; ++i) j[i] *= 1e-250;
    }
    double norm = j[0];
    for (int k = 2; k <= m; k += 2) norm += 2.0 * j[k];
    for (int k = 0; k <= m + 1; ++k) j[k] /= norm;

    const double lg = std::log(0.5 * x) + kEuler;
    double s0 = 0.0, s1 = 0.0;
    for (int k = 1; 2 * k <= m; ++k) {
        const double sg = (k % 2 == 0) ? 1.0 : -1.0;
        s0 += sg * j[2 * k] / k;
        s1 += sg * (j[2 * k - 1] - j[2 * k + 1]) / k;
    }
    const double y0 = 2.0 / kPi * lg * j[0] - 4.0 / kPi * s0;
    const double y1 = 2.0 / kPi * lg * j[1] - 2.0 / (kPi * x) * j[0] + 2.0 / kPi * s1;
    h0 = {j[0], y0};
    h1 = {j[1], y1};
}

cplx h_asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    cplx sum = 1.0;
    cplx term = 1.0;
    const cplx i(0.0, 1.0);
    double prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        term *= i * f;
        const double mag = std::abs(term);
        if (mag > prev) break;
        sum += term;
        prev = mag;
        if (mag < 1e-18) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * cplx(std::cos(chi), std::sin(chi)) * sum;
}

// Spherical Hankel h_n^(1)(z) from its terminating closed form.
cplx spherical_hankel(int n, double z) {
    const cplx i(0.0, 1.0);
    cplx sum = 0.0;
    cplx ip = 1.0;
    double fact_ratio = 1.0;  // (n+m)! / (m! (n-m)!)
    double pw = 1.0;          // (2z)^m
    for (int m = 0; m <= n; ++m) {
        if (m > 0) {
            fact_ratio *= static_cast<double>((n + m) * (n - m + 1)) / m;
            pw *= 2.0 * z;
            ip *= i;
        }
        sum += ip * (fact_ratio / pw);
    }
    cplx pre = std::pow(-i, n + 1) * cplx(std::cos(z), std::sin(z)) / z;
    return pre * sum;
}

// J_k(z) / z^k = sum_m (-z^2/4)^m / (2^k m! (m+k)!)
double bessel_j_over_pow_series(int k, double z) {
    double fk = 1.0;
    for (int m = 2; m <= k; ++m) fk *= m;
    double term = 1.0 / (std::ldexp(1.0, k) * fk);
    double sum = term;
    const double q = -0.25 * z * z;
    for (int m = 1; m < 60; ++m) {
        term *= q / (m * (m + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// j_k(z) / z^k = sum_m (-z^2/2)^m / (m! (2k+2m+1)!!)
double spherical_j_over_pow_series(int k, double z) {
    double df = 1.0;
    for (int m = 3; m <= 2 * k + 1; m += 2) df *= m;
    double term = 1.0 / df;
    double sum = term;
    const double q = -0.5 * z * z;
    for (int m = 1; m < 60; ++m) {
        term *= q / (m * (2.0 * k + 2.0 * m + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

void check_order(int order) {
    if (order < 0 || order > 4) throw std::invalid_argument("derivative order must be in 0..4");
}

void check_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("wave number must be positive");
}

}  // namespace

void hankel1_seq(double x, int nmax, cplx* out) {
    if (!(x > 0.0)) throw std::domain_error("hankel1: argument must be positive");
    if (nmax < 0 || nmax > 5) throw std::domain_error("hankel1: order must be in 0..5");
    cplx h0, h1;
    if (x < kAsymptoticSwitch) {
        h01_miller(x, h0, h1);
    } else {
        h0 = h_asymptotic(0, x);
        h1 = h_asymptotic(1, x);
    }
    out[0] = h0;
    if (nmax >= 1) out[1] = h1;
    for (int n = 1; n < nmax; ++n) out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
}

cplx hankel1(int n, double x) {
    if (n < 0 || n > 5) throw std::domain_error("hankel1: order must be in 0..5");
    std::array<cplx, 6> h;
    hankel1_seq(x, n, h.data());
    return h[n];
}

cplx green_scalar(int d, double kappa, double r) {
    check_dim(d);
    check_kappa(kappa);
    if (!(r > 0.0)) throw std::domain_error("green_scalar: r must be positive");
    if (d == 2) return cplx(0.0, -0.25) * hankel1(0, kappa * r);
    const double kr = kappa * r;
    return -cplx(std::cos(kr), std::sin(kr)) / (4.0 * kPi * r);
}

std::array<cplx, 5> radial_derivs(int d, double kappa, double r, int order) {
    check_dim(d);
    check_kappa(kappa);
    check_order(order);
    if (!(r > 0.0)) throw std::domain_error("radial_derivs: r must be positive");
    std::array<cplx, 5> f{};
    const double z = kappa * r;
    const double step = -kappa / r;
    double p = 1.0;
    if (d == 2) {
        std::array<cplx, 6> h;
        hankel1_seq(z, order, h.data());
        for (int k = 0; k <= order; ++k, p *= step) f[k] = cplx(0.0, -0.25) * p * h[k];
    } else {
        const cplx pre(0.0, -kappa / (4.0 * kPi));
        for (int k = 0; k <= order; ++k, p *= step) f[k] = pre * p * spherical_hankel(k, z);
    }
    return f;
}

std::array<double, 5> im_radial_derivs(int d, double kappa, double r, int order) {
    check_dim(d);
    check_kappa(kappa);
    check_order(order);
    if (r < 0.0) throw std::domain_error("im_radial_derivs: r must be non-negative");
    std::array<double, 5> f{};
    const double z = kappa * r;
    const double k2 = -kappa * kappa;
    double p = 1.0;
    if (d == 2) {
        if (z < kImSeriesSwitch) {
            for (int k = 0; k <= order; ++k, p *= k2) f[k] = -0.25 * p * bessel_j_over_pow_series(k, z);
        } else {
            std::array<cplx, 6> h;
            hankel1_seq(z, order, h.data());
            double zk = 1.0;
            for (int k = 0; k <= order; ++k, p *= k2, zk *= z) f[k] = -0.25 * p * h[k].real() / zk;
        }
    } else {
        const double pre = -kappa / (4.0 * kPi);
        if (z < kImSeriesSwitch) {
            for (int k = 0; k <= order; ++k, p *= k2) f[k] = pre * p * spherical_j_over_pow_series(k, z);
        } else {
            double zk = 1.0;
            for (int k = 0; k <= order; ++k, p *= k2, zk *= z)
                f[k] = pre * p * spherical_hankel(k, z).real() / zk;
        }
    }
    return f;
}

DerivSet<cplx> green_derivs(int d, double kappa, const Point& x, int order) {
    check_dim(d);
    if (x.d != d) throw std::invalid_argument("green_derivs: point dimension mismatch");
    const double r = norm(x);
    if (!(r > 0.0)) throw std::domain_error("green_derivs: singular at x = 0");
    auto f = radial_derivs(d, kappa, r, order);
    return assemble_radial<cplx>(x, f.data(), order);
}

DerivSet<double> im_green_derivs(int d, double kappa, const Point& x, int order) {
    check_dim(d);
    if (x.d != d) throw std::invalid_argument("im_green_derivs: point dimension mismatch");
    auto f = im_radial_derivs(d, kappa, norm(x), order);
    return assemble_radial<double>(x, f.data(), order);
}

}  // namespace etd
