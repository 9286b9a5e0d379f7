#pragma once

#include <numbers>

#include "etd/scalar_waves.hpp"
#include "etd/tensor.hpp"

namespace etd {

enum class Mode { P, S };

const char* mode_name(Mode m);
Mode parse_mode(const char* s);

// Homogeneous isotropic background.
struct Medium {
    double lambda0 = 9.0;
    double mu0 = 1.0;
    double rho0 = 1.0;
    double omega = 2.0 * std::numbers::pi;

    double cP() const;
    double cS() const;
    double kappaP() const;
    double kappaS() const;
    double c(Mode m) const { return m == Mode::P ? cP() : cS(); }
    double kappa(Mode m) const { return m == Mode::P ? kappaP() : kappaS(); }
    double wavelength(Mode m) const;

    // Throws std::invalid_argument if the Lame conditions fail in dimension d.
    void validate(int d) const;
};

// Modal kernels assembled from Green derivative sets of G_alpha.
// P:  Gamma_P = -(1/(mu0 kS^2)) D G_P
// S:  Gamma_S =  (1/(mu0 kS^2)) (kS^2 I + D) G_S
template <class T>
Mat<T> modal_gamma(const Medium& med, Mode m, const DerivSet<T>& g) {
    const double c = 1.0 / (med.mu0 * med.kappaS() * med.kappaS());
    const double ks2 = med.kappaS() * med.kappaS();
    Mat<T> r;
    r.d = g.d;
    for (int j = 0; j < g.d; ++j)
        for (int l = 0; l < g.d; ++l) {
            if (m == Mode::P)
                r(j, l) = -c * g.g2(j, l);
            else
                r(j, l) = c * ((j == l ? ks2 * g.g : T{}) + g.g2(j, l));
        }
    return r;
}

// (grad Gamma)_{kjl} = d_k Gamma_{jl}
template <class T>
Ten3<T> modal_grad(const Medium& med, Mode m, const DerivSet<T>& g) {
    const double c = 1.0 / (med.mu0 * med.kappaS() * med.kappaS());
    const double ks2 = med.kappaS() * med.kappaS();
    Ten3<T> r;
    r.d = g.d;
    for (int k = 0; k < g.d; ++k)
        for (int j = 0; j < g.d; ++j)
            for (int l = 0; l < g.d; ++l) {
                if (m == Mode::P)
                    r(k, j, l) = -c * g.g3(k, j, l);
                else
                    r(k, j, l) = c * ((j == l ? ks2 * g.g1[k] : T{}) + g.g3(k, j, l));
            }
    return r;
}

// (hess Gamma)_{ijkl} = d_ik Gamma_{jl}
template <class T>
Ten4<T> modal_hess(const Medium& med, Mode m, const DerivSet<T>& g) {
    const double c = 1.0 / (med.mu0 * med.kappaS() * med.kappaS());
    const double ks2 = med.kappaS() * med.kappaS();
    Ten4<T> r;
    r.d = g.d;
    const int d = g.d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    if (m == Mode::P)
                        r(i, j, k, l) = -c * g.g4(i, k, j, l);
                    else
                        r(i, j, k, l) = c * ((j == l ? ks2 * g.g2(i, k) : T{}) + g.g4(i, k, j, l));
                }
    return r;
}

Mat<cplx> gamma_alpha(const Medium& med, Mode m, const Point& x);
Mat<cplx> gamma_full(const Medium& med, const Point& x);
Mat<double> im_gamma_alpha(const Medium& med, Mode m, const Point& x);

Ten3<cplx> grad_gamma_alpha(const Medium& med, Mode m, const Point& x);
Ten3<double> im_grad_gamma_alpha(const Medium& med, Mode m, const Point& x);

Ten4<cplx> hess_gamma_alpha(const Medium& med, Mode m, const Point& x);
Ten4<double> im_hess_gamma_alpha(const Medium& med, Mode m, const Point& x);

// Both modal kernels (and optionally their gradients) from one pair of
// Hankel evaluations; used by the backpropagation hot loop.
struct ModalKernels {
    Mat<cplx> gP, gS;
    Ten3<cplx> dP, dS;
};

ModalKernels modal_kernels(const Medium& med, const Point& x, bool with_grad);

}  // namespace etd
