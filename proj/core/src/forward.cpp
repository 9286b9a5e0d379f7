#include "etd/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "etd/rng.hpp"

namespace etd {

ComplexVecField zero_field(int d, std::size_t n) {
    ComplexVecField f;
    f.d = d;
    Vec<cplx> z;
    z.d = d;
    f.values.assign(n, z);
    return f;
}

ComplexVecField filtered_data(const Medium& med, const Inclusion& inc, const PlaneWave& probe,
                              const BoundaryGrid& grid) {
    const int d = grid.d;
    if (inc.za.d != d) throw std::invalid_argument("filtered_data: inclusion dimension mismatch");
    ComplexVecField out = zero_field(d, grid.size());
    const auto pw = plane_wave_value(probe, med, inc.za);
    const double scale_d = std::pow(inc.delta, d);
    const double dens = med.omega * med.omega * (med.rho0 - inc.rho1) * inc.volumeB;
    const bool elastic = !inc.emt.is_zero();
    // A_pq = sum_ij d_iU_j(za) m_ijpq; the elastic term is sum_pq A_pq d_{za,p} Gamma_kq.
    Mat<cplx> A = zero_mat<cplx>(d);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A(p, q) += pw.gradU(i, j) * inc.emt(i, j, p, q);

    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Point x = grid.points[n] - inc.za;
        const auto gp = green_derivs(d, med.kappaP(), x, elastic ? 3 : 2);
        const auto gs = green_derivs(d, med.kappaS(), x, elastic ? 3 : 2);
        const Mat<cplx> G = add(modal_gamma(med, Mode::P, gp), modal_gamma(med, Mode::S, gs));
        Vec<cplx>& v = out.values[n];
        for (int k = 0; k < d; ++k) {
            cplx s = 0.0;
            for (int i = 0; i < d; ++i) s += G(k, i) * pw.U[i];
            v[k] = dens * s;
        }
        if (elastic) {
            const Ten3<cplx> dG = add(modal_grad(med, Mode::P, gp), modal_grad(med, Mode::S, gs));
            for (int k = 0; k < d; ++k) {
                cplx s = 0.0;
                // d_{za,p} Gamma(x - za) = -(d_p Gamma)(x - za)
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q) s -= A(p, q) * dG(p, k, q);
                v[k] += s;
            }
        }
        for (int k = 0; k < d; ++k) v[k] *= scale_d;
    }
    return out;
}

ComplexVecField add_measurement_noise(const ComplexVecField& data, const BoundaryGrid& grid, double sigma,
                                      std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
    if (data.size() != grid.size()) throw std::invalid_argument("noise: data and grid sizes differ");
    ComplexVecField out = data;
    if (sigma == 0.0) return out;
    NormalStream rng(seed);
    for (std::size_t n = 0; n < out.size(); ++n) {
        // real and imaginary parts each carry half of (sigma^2/4)/w
        const double s = sigma * std::sqrt(1.0 / (8.0 * grid.weights[n]));
        for (int j = 0; j < out.d; ++j) {
            const double re = rng();
            const double im = rng();
            out.values[n][j] += cplx(s * re, s * im);
        }
    }
    return out;
}

}  // namespace etd
