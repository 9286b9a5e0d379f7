#pragma once

#include <cstdint>
#include <vector>

#include "etd/scene.hpp"

namespace etd {

// Complex d-vector samples, one per boundary node.
struct ComplexVecField {
    int d = 2;
    std::vector<Vec<cplx>> values;

    std::size_t size() const { return values.size(); }
};

ComplexVecField zero_field(int d, std::size_t n);

// Leading-order filtered scattered data at the boundary nodes:
// delta^d [ gradU(za) : M grad_za Gamma(x - za) + w^2 (rho0 - rho1)|B| Gamma(x - za) U(za) ]
// with (gradU : M grad_za Gamma)_k = sum_ijpq d_iU_j m_ijpq d_{za,p} Gamma_kq.
ComplexVecField filtered_data(const Medium& med, const Inclusion& inc, const PlaneWave& probe,
                              const BoundaryGrid& grid);

// Adds independent circular complex Gaussian noise with E|nu_{k,j}|^2 =
// (sigma^2/4) / w_k at node k, component j. Deterministic in seed.
ComplexVecField add_measurement_noise(const ComplexVecField& data, const BoundaryGrid& grid, double sigma,
                                      std::uint64_t seed);

}  // namespace etd
