#include "etd/kupradze.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

namespace etd {

const char* mode_name(Mode m) { return m == Mode::P ? "P" : "S"; }

Mode parse_mode(const char* s) {
    if (std::strcmp(s, "P") == 0 || std::strcmp(s, "p") == 0) return Mode::P;
    if (std::strcmp(s, "S") == 0 || std::strcmp(s, "s") == 0) return Mode::S;
    throw std::invalid_argument(std::string("unknown wave mode: ") + s);
}

double Medium::cP() const { return std::sqrt((lambda0 + 2.0 * mu0) / rho0); }
double Medium::cS() const { return std::sqrt(mu0 / rho0); }
double Medium::kappaP() const { return omega / cP(); }
double Medium::kappaS() const { return omega / cS(); }
double Medium::wavelength(Mode m) const { return 2.0 * std::numbers::pi / kappa(m); }

void Medium::validate(int d) const {
    check_dim(d);
    if (!(mu0 > 0.0)) throw std::invalid_argument("medium.mu0 must be positive");
    if (!(d * lambda0 + 2.0 * mu0 > 0.0)) throw std::invalid_argument("medium: d*lambda0 + 2*mu0 must be positive");
    if (!(rho0 > 0.0)) throw std::invalid_argument("medium.rho0 must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("medium.omega must be positive");
    if (!(lambda0 + mu0 > 0.0)) throw std::invalid_argument("medium: cP must exceed cS (lambda0 + mu0 > 0)");
}

namespace {

void require_nonzero(const Point& x, const char* what) {
    if (!(norm(x) > 0.0)) throw std::domain_error(std::string(what) + ": singular at x = 0");
}

}  // namespace

Mat<cplx> gamma_alpha(const Medium& med, Mode m, const Point& x) {
    require_nonzero(x, "gamma_alpha");
    return modal_gamma(med, m, green_derivs(x.d, med.kappa(m), x, 2));
}

Mat<cplx> gamma_full(const Medium& med, const Point& x) {
    require_nonzero(x, "gamma_full");
    const auto gp = green_derivs(x.d, med.kappaP(), x, 2);
    const auto gs = green_derivs(x.d, med.kappaS(), x, 2);
    const double c = 1.0 / (med.rho0 * med.omega * med.omega);
    Mat<cplx> r;
    r.d = x.d;
    for (int j = 0; j < x.d; ++j)
        for (int l = 0; l < x.d; ++l)
            r(j, l) = (j == l ? gs.g / med.mu0 : cplx{}) - c * (gp.g2(j, l) - gs.g2(j, l));
    return r;
}

Mat<double> im_gamma_alpha(const Medium& med, Mode m, const Point& x) {
    return modal_gamma(med, m, im_green_derivs(x.d, med.kappa(m), x, 2));
}

Ten3<cplx> grad_gamma_alpha(const Medium& med, Mode m, const Point& x) {
    require_nonzero(x, "grad_gamma_alpha");
    return modal_grad(med, m, green_derivs(x.d, med.kappa(m), x, 3));
}

Ten3<double> im_grad_gamma_alpha(const Medium& med, Mode m, const Point& x) {
    return modal_grad(med, m, im_green_derivs(x.d, med.kappa(m), x, 3));
}

Ten4<cplx> hess_gamma_alpha(const Medium& med, Mode m, const Point& x) {
    require_nonzero(x, "hess_gamma_alpha");
    return modal_hess(med, m, green_derivs(x.d, med.kappa(m), x, 4));
}

Ten4<double> im_hess_gamma_alpha(const Medium& med, Mode m, const Point& x) {
    return modal_hess(med, m, im_green_derivs(x.d, med.kappa(m), x, 4));
}

ModalKernels modal_kernels(const Medium& med, const Point& x, bool with_grad) {
    require_nonzero(x, "modal_kernels");
    const int order = with_grad ? 3 : 2;
    const auto gp = green_derivs(x.d, med.kappaP(), x, order);
    const auto gs = green_derivs(x.d, med.kappaS(), x, order);
    ModalKernels k;
    k.gP = modal_gamma(med, Mode::P, gp);
    k.gS = modal_gamma(med, Mode::S, gs);
    if (with_grad) {
        k.dP = modal_grad(med, Mode::P, gp);
        k.dS = modal_grad(med, Mode::S, gs);
    }
    return k;
}

}  // namespace etd
