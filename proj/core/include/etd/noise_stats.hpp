#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "etd/imaging.hpp"

namespace etd {

// Monte Carlo ensemble of images over a common set of targets.
struct MCEnsemble {
    int trials = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<ImageGrid> images;

    // Throws unless trials >= 2, sizes agree and seeds are pairwise distinct.
    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;

    // |value - target| <= k se
    bool within(double target, double k = 3.0) const;
    double zscore(double target) const;
};

struct ComplexEstimate {
    cplx value;
    double se_re = 0.0;
    double se_im = 0.0;
};

// Unbiased sample covariance of paired samples and the standard error of
// the mean of centred products.
Estimate sample_covariance(const std::vector<double>& x, const std::vector<double>& y);
ComplexEstimate sample_covariance(const std::vector<cplx>& x, const std::vector<cplx>& y);

// Covariance of the image values at targets iz and jz.
Estimate empirical_covariance(const MCEnsemble& ens, std::size_t iz, std::size_t jz);

// ---------------------------------------------------------------- medium

// Stationary Gaussian density fluctuation on a regular lattice covering the
// disk / ball of the given radius (spacing h), masked to the domain.
struct GaussianFieldSpec {
    int d = 2;
    double sigma_gamma = 0.0;
    double corr_len = 0.5;
    double radius = 10.0;
    double h = 0.125;
};

void validate_field_spec(const GaussianFieldSpec& spec);
std::vector<std::string> field_spec_warnings(const GaussianFieldSpec& spec);

// sigma^2 exp(-|dy|^2 / (2 l^2))
double gaussian_covariance(const GaussianFieldSpec& spec, double dist);

// Circulant-embedding sampler: the lattice covariance is reproduced exactly
// (up to clipping of round-off negative eigenvalues).
class GaussianFieldSampler {
public:
    explicit GaussianFieldSampler(const GaussianFieldSpec& spec);
    ~GaussianFieldSampler();
    GaussianFieldSampler(GaussianFieldSampler&&) noexcept;
    GaussianFieldSampler& operator=(GaussianFieldSampler&&) noexcept;

    // Masked cells with zero values.
    const VolumeField& geometry() const;
    const GaussianFieldSpec& spec() const;
    int nodes_per_axis() const;
    // Most negative embedding eigenvalue relative to the largest.
    double clipped_fraction() const;

    VolumeField sample(std::uint64_t seed) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

VolumeField sample_gamma(const GaussianFieldSpec& spec, std::uint64_t seed);

// Linear map from a fluctuation field to the speckle part of the direction
// averaged weighted image: I(z) = sum_c gamma_c G_z(c), where the modal
// backpropagation of the medium noise is taken in its Helmholtz-Kirchhoff
// reduced form (see medium_speckle).
class MediumSpeckleImager {
public:
    MediumSpeckleImager(const VolumeField& geometry, const Medium& med, const TrialInclusion& trial,
                        const std::vector<PlaneWave>& probes, const SearchGrid& targets, int threads = 1);

    std::vector<double> image(const VolumeField& gamma) const;
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<std::vector<double>> weights_;  // [target][cell]
};

// Kernel of the medium-noise image: |Im Gamma_mode(x)|^2 for a density trial,
// Q^2_mode[M'](x) for an elasticity trial.
double medium_kernel(const Medium& med, const TrialInclusion& trial, Mode mode, const Point& x);

// C_mode^2 b'^2, the constant in front of the double volume integral.
double medium_cov_constant(const Medium& med, const TrialInclusion& trial, Mode mode, int d);

// Double lattice quadrature of C^2 b'^2 int int C_gamma(y,y') K(z-y) K(z'-y').
// Uses the separability of the Gaussian correlation.
double medium_noise_image_cov(const GaussianFieldSpec& spec, const Medium& med, Mode mode,
                              const TrialInclusion& trial, const Point& z, const Point& zp);

// Limit l -> 0 with sigma^2 (2 pi l^2)^(d/2) held as the white-noise weight:
// C^2 b'^2 sigma^2 (2 pi l^2)^(d/2) int K(z-y) K(z'-y) dy.
double medium_noise_image_cov_white(const GaussianFieldSpec& spec, const Medium& med, Mode mode,
                                    const TrialInclusion& trial, const Point& z, const Point& zp);

// Q^2_mode[M](x) = Im grad Gamma : [M Im grad Gamma] by generic contraction,
// and the closed forms for an isotropic tensor.
double q_squared(const Medium& med, const EMT4& emt, Mode mode, const Point& x);
double q_squared(const Medium& med, const IsoEMT& emt, Mode mode, const Point& x);

// ----------------------------------------------------------- measurement

// -(sigma^2 / (4 c w)) Im Gamma_mode(x - x')
Mat<double> predicted_speckle_cov(const Medium& med, Mode mode, double sigma, const Point& x, const Point& xp);

// Density trial: C' (sigma^2 / 2n) |Im Gamma_mode(z - z')|^2.
double predicted_image_cov(const Medium& med, const TrialInclusion& trial, Mode mode, int n, double sigma,
                           const Point& z, const Point& zp);

// Elasticity trial, as printed: mu0 (c/w)^p (pi/k)^(d-2) (kS/k)^2 (sigma^2/2n) J_mode(z - z'),
// with p = 3; the exponent obtained by carrying the density-case reduction
// through is p = 1.
enum class CovConstant { Displayed, Derived };
double predicted_image_cov_elastic(const Medium& med, const TrialInclusion& trial, Mode mode, int n, double sigma,
                                   const Point& z, const Point& zp, CovConstant which);

// Closed-form SNR at za: density contrast uses the printed formula, an
// elasticity contrast the printed elasticity analogue.
double predicted_snr(const Medium& med, const Inclusion& inc, Mode mode, int n, double sigma);

// SNR assembled from predicted_peak and the image variance; for elasticity
// the variance constant is selectable.
double assembled_snr(const Medium& med, const Inclusion& inc, const TrialInclusion& trial, Mode mode, int n,
                     double sigma, CovConstant which = CovConstant::Derived);

// clean / sample std of noisy values; throws if the spread is zero.
double empirical_snr(const std::vector<double>& noisy, double clean);
// Same, with the image index of za into every ensemble member.
double empirical_snr(const MCEnsemble& ens, const ImageGrid& clean, std::size_t iza);

// Noisy weighted images at a small target set: every trial draws fresh
// measurement noise for all probes (streams derived from root seed, probe
// and trial) and applies iwf. The result does not depend on threads.
MCEnsemble measurement_noise_ensemble(const Medium& med, const TrialInclusion& trial,
                                      const std::vector<PlaneWave>& probes,
                                      const std::vector<ComplexVecField>& clean, const BoundaryGrid& grid,
                                      const SearchGrid& targets, double sigma, int trials, std::uint64_t root_seed,
                                      int threads = 1);

// Modal backpropagation of pure measurement noise: w[trial][target].
struct SpeckleSamples {
    Mode mode = Mode::P;
    std::vector<std::vector<Vec<cplx>>> w;
};

SpeckleSamples measurement_speckle(const Medium& med, Mode mode, const BoundaryGrid& grid,
                                   const SearchGrid& targets, double sigma, int trials, std::uint64_t root_seed,
                                   int threads = 1);

// E[w_j(x_a) conj(w_k(x_b))] estimated from the samples.
ComplexEstimate speckle_covariance(const SpeckleSamples& s, std::size_t a, std::size_t b, int j, int k);

// ----------------------------------------------------------- resolution

// Full width at half maximum of the slice of a lattice image through the
// node nearest za along axis, with linear interpolation between nodes.
double fwhm(const ImageGrid& image, const SearchGrid& grid, const Point& za, int axis);

// Lag at which a sampled correlation profile (corr[0] at lag 0) first drops
// to half of corr[0], linear interpolation. Throws if it never does.
double half_width(const std::vector<double>& lags, const std::vector<double>& corr);

}  // namespace etd
