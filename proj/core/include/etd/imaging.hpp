#pragma once

#include <vector>

#include "etd/backprop.hpp"

namespace etd {

// Real image over the points of a SearchGrid.
struct ImageGrid {
    std::vector<double> values;
    Mode probe_mode = Mode::P;
    int n_probes = 0;

    std::size_t size() const { return values.size(); }
    std::size_t argmax() const;
    double max() const;
    double min() const;
};

// All functionals take the field backpropagated from the scattered data
// u - U (as returned by backpropagate); the misfit direction is U - u, so
// they are evaluated on -w.

// -Re{ gradU : M' grad w + w^2 (rho0 - rho1') |B'| U . w } with the full kernel.
ImageGrid itd(const Medium& med, const TrialInclusion& trial, const PlaneWave& probe, const BackField& wfull,
              const SearchGrid& targets);

// c_P Re{ -grad H^P[U] : M' grad w^P + w^2 (rho1'/rho0 - 1)|B'| H^P[U] . w^P } + (same for S).
// Plane waves are pure modes, so only the probe's own branch survives and
// the other modal field may be empty.
ImageGrid iw(const Medium& med, const TrialInclusion& trial, const PlaneWave& probe, const BackField& wP,
             const BackField& wS, const SearchGrid& targets);

// Direction average of iw (shear polarizations of one direction are summed), backpropagating each dataset with its probe's modal kernel.
ImageGrid iwf(const Medium& med, const TrialInclusion& trial, const std::vector<PlaneWave>& probes,
              const std::vector<ComplexVecField>& datasets, const BoundaryGrid& grid, const SearchGrid& targets,
              int threads = 1);

// iwf from already backpropagated modal fields, fields[j] belonging to probes[j].
ImageGrid iwf_from_fields(const Medium& med, const TrialInclusion& trial, const std::vector<PlaneWave>& probes,
                          const std::vector<const BackField*>& fields, const SearchGrid& targets);

// Direction average of itd.
ImageGrid itd_mean(const Medium& med, const TrialInclusion& trial, const std::vector<PlaneWave>& probes,
                   const std::vector<ComplexVecField>& datasets, const BoundaryGrid& grid, const SearchGrid& targets,
                   int threads = 1);

// C = delta^d (rho0 - rho1')(rho0 - rho1) |B'| |B|
double contrast_constant(const Medium& med, const Inclusion& inc, const TrialInclusion& trial, int d);

// 4 mu0 C w^3 (pi/k_mode)^(d-2) (kS/k_mode)^2 |Im Gamma_mode(z - za)|^2
ImageGrid predicted_peak(const Medium& med, Mode mode, double C, const Point& za, const SearchGrid& targets);

// Elasticity analogue: 4 delta^d (mu0/w) (pi/k)^(d-2) (kS/k)^2 J_{mode,mode}(z).
ImageGrid predicted_peak_elastic(const Medium& med, Mode mode, const Inclusion& inc, const SearchGrid& targets);

// Direction-averaged itd including the P-S coupling terms. Density-only or
// elasticity-only configurations; mixed contrasts are rejected.
ImageGrid predicted_td_sum(const Medium& med, Mode mode, const Inclusion& inc, const TrialInclusion& trial,
                           const SearchGrid& targets);

// J_{a,b}(x) = (M Im hess Gamma_a(x)) : (M Im hess Gamma_b(x))^T
double j_tensor(const Medium& med, const EMT4& emt, Mode a, Mode b, const Point& x);

double j_pp_closed(const Medium& med, double a, double b, const Point& x);
// Shear closed form with the full |grad^4 Im G_S|^2 term.
double j_ss_closed(const Medium& med, double a, const Point& x);
// Shear form with the off-diagonal sum over k != l and weight (d-2)/4 on
// |grad^2 Im G_S|^2, evaluated exactly as written.
double j_ss_closed_alt(const Medium& med, double a, const Point& x);

// Im Gamma_P(x) : Im Gamma_S(x)
double coupling_strength(const Medium& med, const Point& x);

}  // namespace etd
