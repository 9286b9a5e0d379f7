#include "etd/noise_stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

#include "etd/parallel.hpp"
#include "etd/rng.hpp"

namespace etd {

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

bool density_trial(const Medium& med, const TrialInclusion& trial) {
    const bool dens = trial.rho1p != med.rho0;
    const bool elas = !trial.emtp.is_zero();
    if (dens == elas) throw std::invalid_argument("noise statistics need a density-only or elasticity-only trial");
    return dens;
}

// (pi/k)^(d-2) (kS/k)^2
double mode_factor(const Medium& med, Mode mode, int d) {
    const double k = med.kappa(mode);
    return std::pow(std::numbers::pi / k, d - 2) * std::pow(med.kappaS() / k, 2);
}

// Regular lattice nodes -R + i h, i = 0..m-1, on every axis.
struct Lattice {
    int d = 2;
    int m = 0;
    double R = 0.0, h = 0.0;
    std::vector<std::size_t> cell_node;  // flat lattice index of each masked cell
    VolumeField cells;

    std::size_t nodes() const {
        std::size_t n = 1;
        for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m);
        return n;
    }
};

Lattice make_lattice_field(const GaussianFieldSpec& spec) {
    validate_field_spec(spec);
    Lattice L;
    L.d = spec.d;
    L.R = spec.radius;
    L.h = spec.h;
    L.m = static_cast<int>(std::floor(2.0 * spec.radius / spec.h + 1e-9)) + 1;
    L.cells.d = spec.d;
    const int m = L.m;
    const int m2 = spec.d == 3 ? m : 1;
    const double vol = std::pow(spec.h, spec.d);
    for (int i0 = 0; i0 < m; ++i0)
        for (int i1 = 0; i1 < m; ++i1)
            for (int i2 = 0; i2 < m2; ++i2) {
                Point y = spec.d == 3 ? make_point(-L.R + i0 * L.h, -L.R + i1 * L.h, -L.R + i2 * L.h)
                                      : make_point(-L.R + i0 * L.h, -L.R + i1 * L.h);
                if (norm(y) > L.R * (1.0 + 1e-12)) continue;
                L.cell_node.push_back((static_cast<std::size_t>(i0) * m + i1) * m2 + i2);
                L.cells.cells.push_back(y);
                L.cells.vol.push_back(vol);
            }
    L.cells.value.assign(L.cells.size(), 0.0);
    return L;
}

// Kernel values on the full lattice, zero outside the domain.
std::vector<double> lattice_kernel(const Lattice& L, const Medium& med, const TrialInclusion& trial, Mode mode,
                                   const Point& z) {
    std::vector<double> k(L.nodes(), 0.0);
    for (std::size_t c = 0; c < L.cells.size(); ++c)
        k[L.cell_node[c]] = medium_kernel(med, trial, mode, z - L.cells.cells[c]);
    return k;
}

// In-place convolution of a lattice array with exp(-(i h)^2 / (2 l^2)) along every axis.
void gaussian_smooth(std::vector<double>& f, const Lattice& L, double ell) {
    const int m = L.m;
    const int reach = std::min(m - 1, static_cast<int>(std::ceil(9.0 * ell / L.h)));
    std::vector<double> g(reach + 1);
    for (int t = 0; t <= reach; ++t) g[t] = std::exp(-0.5 * std::pow(t * L.h / ell, 2));
    const std::size_t m1 = static_cast<std::size_t>(m);
    const std::size_t m2 = L.d == 3 ? m1 : 1;
    std::array<std::size_t, 3> stride{m1 * m2, m2, 1};
    std::vector<double> line(m), conv(m);
    for (int ax = 0; ax < L.d; ++ax) {
        const std::size_t s = stride[ax];
        const std::size_t lines = L.nodes() / m1;
        for (std::size_t q = 0; q < lines; ++q) {
            // base index of the q-th line along ax
            std::size_t base = 0, rem = q;
            for (int b = L.d - 1; b >= 0; --b) {
                if (b == ax) continue;
                base += (rem % m1) * stride[b];
                rem /= m1;
            }
            for (int i = 0; i < m; ++i) line[i] = f[base + i * s];
            for (int i = 0; i < m; ++i) {
                double acc = 0.0;
                const int lo = std::max(0, i - reach), hi = std::min(m - 1, i + reach);
                for (int j = lo; j <= hi; ++j) acc += g[std::abs(i - j)] * line[j];
                conv[i] = acc;
            }
            for (int i = 0; i < m; ++i) f[base + i * s] = conv[i];
        }
    }
}

// Smallest size >= n of the form 2^a 3^b 5^c.
int good_fft_size(int n) {
    for (int s = std::max(n, 1);; ++s) {
        int r = s;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return s;
    }
}

}  // namespace

// ---------------------------------------------------------------- estimates

void MCEnsemble::validate() const {
    if (trials < 2) throw std::invalid_argument("ensemble needs at least 2 trials");
    if (static_cast<int>(images.size()) != trials || static_cast<int>(seeds.size()) != trials)
        throw std::invalid_argument("ensemble sizes do not match trial count");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw std::invalid_argument("ensemble seeds are not pairwise distinct");
    for (const auto& im : images)
        if (im.size() != images.front().size()) throw std::invalid_argument("ensemble images differ in size");
}

bool Estimate::within(double target, double k) const { return std::abs(value - target) <= k * se; }

double Estimate::zscore(double target) const {
    if (se == 0.0) return value == target ? 0.0 : std::numeric_limits<double>::infinity();
    return (value - target) / se;
}

Estimate sample_covariance(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t T = x.size();
    if (T < 2 || y.size() != T) throw std::invalid_argument("covariance needs >= 2 paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= T;
    my /= T;
    std::vector<double> p(T);
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        p[t] = (x[t] - mx) * (y[t] - my);
        sum += p[t];
    }
    const double mean_p = sum / T;
    double ss = 0.0;
    for (double v : p) ss += (v - mean_p) * (v - mean_p);
    Estimate e;
    e.value = sum / static_cast<double>(T - 1);
    e.se = std::sqrt(ss / static_cast<double>(T - 1) / static_cast<double>(T));
    return e;
}

ComplexEstimate sample_covariance(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    const std::size_t T = x.size();
    if (T < 2 || y.size() != T) throw std::invalid_argument("covariance needs >= 2 paired samples");
    cplx mx = 0.0, my = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= static_cast<double>(T);
    my /= static_cast<double>(T);
    std::vector<cplx> p(T);
    cplx sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        p[t] = (x[t] - mx) * std::conj(y[t] - my);
        sum += p[t];
    }
    const cplx mean_p = sum / static_cast<double>(T);
    double sr = 0.0, si = 0.0;
    for (const auto& v : p) {
        sr += std::pow(v.real() - mean_p.real(), 2);
        si += std::pow(v.imag() - mean_p.imag(), 2);
    }
    ComplexEstimate e;
    e.value = sum / static_cast<double>(T - 1);
    e.se_re = std::sqrt(sr / static_cast<double>(T - 1) / static_cast<double>(T));
    e.se_im = std::sqrt(si / static_cast<double>(T - 1) / static_cast<double>(T));
    return e;
}

Estimate empirical_covariance(const MCEnsemble& ens, std::size_t iz, std::size_t jz) {
    ens.validate();
    if (iz >= ens.images.front().size() || jz >= ens.images.front().size())
        throw std::out_of_range("empirical_covariance: target index out of range");
    std::vector<double> x(ens.trials), y(ens.trials);
    for (int t = 0; t < ens.trials; ++t) {
        x[t] = ens.images[t].values[iz];
        y[t] = ens.images[t].values[jz];
    }
    return sample_covariance(x, y);
}

// ---------------------------------------------------------------- medium

void validate_field_spec(const GaussianFieldSpec& spec) {
    check_dim(spec.d);
    if (!(spec.sigma_gamma >= 0.0)) throw std::invalid_argument("sigma_gamma must be >= 0");
    if (!(spec.corr_len > 0.0)) throw std::invalid_argument("corr_len must be > 0");
    if (!(spec.radius > 0.0) || !(spec.h > 0.0) || spec.h >= spec.radius)
        throw std::invalid_argument("field lattice needs 0 < h < radius");
}

std::vector<std::string> field_spec_warnings(const GaussianFieldSpec& spec) {
    std::vector<std::string> w;
    if (spec.sigma_gamma > 0.1) w.push_back("sigma_gamma > 0.1: Born approximation may be inaccurate");
    if (spec.corr_len < spec.h) w.push_back("corr_len below lattice spacing: correlation not resolved");
    return w;
}

double gaussian_covariance(const GaussianFieldSpec& spec, double dist) {
    return spec.sigma_gamma * spec.sigma_gamma * std::exp(-0.5 * std::pow(dist / spec.corr_len, 2));
}

struct GaussianFieldSampler::Impl {
    GaussianFieldSpec spec;
    Lattice lat;
    int M = 0;
    std::size_t total = 0;
    std::vector<double> amp;  // sqrt(lambda / M^d) on the embedding torus
    std::vector<std::size_t> cell_embed;
    double clipped = 0.0;
    fftw_plan plan = nullptr;
};

GaussianFieldSampler::GaussianFieldSampler(const GaussianFieldSpec& spec) : impl_(std::make_unique<Impl>()) {
    Impl& I = *impl_;
    I.spec = spec;
    I.lat = make_lattice_field(spec);
    const int m = I.lat.m;
    const int reach = std::min(m - 1, static_cast<int>(std::ceil(8.0 * spec.corr_len / spec.h)));
    I.M = good_fft_size(std::max(m + reach, 2));
    const int M = I.M;
    const int d = spec.d;
    // 1D eigenvalues of the circulant row g(min(t, M - t)).
    std::vector<double> lam(M, 0.0);
    for (int k = 0; k < M; ++k) {
        double s = 0.0;
        for (int t = 0; t < M; ++t) {
            const double lag = std::min(t, M - t) * spec.h;
            s += std::exp(-0.5 * std::pow(lag / spec.corr_len, 2)) *
                 std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * t / M);
        }
        lam[k] = s;
    }
    const double lmax = *std::max_element(lam.begin(), lam.end());
    const double lmin = *std::min_element(lam.begin(), lam.end());
    I.clipped = lmin < 0.0 ? -lmin / lmax : 0.0;
    for (auto& v : lam) v = std::max(v, 0.0);
    I.total = 1;
    for (int i = 0; i < d; ++i) I.total *= static_cast<std::size_t>(M);
    I.amp.resize(I.total);
    const double norm_d = static_cast<double>(I.total);
    const double s2 = spec.sigma_gamma * spec.sigma_gamma;
    const int M2 = d == 3 ? M : 1;
    for (int k0 = 0; k0 < M; ++k0)
        for (int k1 = 0; k1 < M; ++k1)
            for (int k2 = 0; k2 < M2; ++k2) {
                double l = s2 * lam[k0] * lam[k1];
                if (d == 3) l *= lam[k2];
                I.amp[(static_cast<std::size_t>(k0) * M + k1) * M2 + k2] = std::sqrt(l / norm_d);
            }
    const std::size_t m1 = static_cast<std::size_t>(m);
    const std::size_t mm2 = d == 3 ? m1 : 1;
    for (std::size_t node : I.lat.cell_node) {
        const std::size_t i2 = node % mm2, i1 = (node / mm2) % m1, i0 = node / (mm2 * m1);
        I.cell_embed.push_back((i0 * M + i1) * M2 + i2);
    }
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    fftw_complex* buf = fftw_alloc_complex(I.total);
    int dims[3] = {M, M, M};
    I.plan = fftw_plan_dft(d, dims, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!I.plan) throw std::runtime_error("FFTW plan creation failed");
}

GaussianFieldSampler::~GaussianFieldSampler() {
    if (impl_ && impl_->plan) {
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        fftw_destroy_plan(impl_->plan);
    }
}

GaussianFieldSampler::GaussianFieldSampler(GaussianFieldSampler&&) noexcept = default;
GaussianFieldSampler& GaussianFieldSampler::operator=(GaussianFieldSampler&&) noexcept = default;

const VolumeField& GaussianFieldSampler::geometry() const { return impl_->lat.cells; }
const GaussianFieldSpec& GaussianFieldSampler::spec() const { return impl_->spec; }
int GaussianFieldSampler::nodes_per_axis() const { return impl_->lat.m; }
double GaussianFieldSampler::clipped_fraction() const { return impl_->clipped; }

VolumeField GaussianFieldSampler::sample(std::uint64_t seed) const {
    const Impl& I = *impl_;
    VolumeField f = I.lat.cells;
    if (I.spec.sigma_gamma == 0.0) return f;
    fftw_complex* buf = fftw_alloc_complex(I.total);
    NormalStream rng(seed);
    for (std::size_t k = 0; k < I.total; ++k) {
        const double re = rng(), im = rng();
        buf[k][0] = I.amp[k] * re;
        buf[k][1] = I.amp[k] * im;
    }
    fftw_execute_dft(I.plan, buf, buf);
    for (std::size_t c = 0; c < f.size(); ++c) f.value[c] = buf[I.cell_embed[c]][0];
    fftw_free(buf);
    return f;
}

VolumeField sample_gamma(const GaussianFieldSpec& spec, std::uint64_t seed) {
    return GaussianFieldSampler(spec).sample(seed);
}

MediumSpeckleImager::MediumSpeckleImager(const VolumeField& geometry, const Medium& med, const TrialInclusion& trial,
                                         const std::vector<PlaneWave>& probes, const SearchGrid& targets,
                                         int threads) {
    if (probes.empty()) throw std::invalid_argument("medium speckle imager needs probes");
    const bool dens = density_trial(med, trial);
    const int d = targets.d;
    if (geometry.d != d) throw std::invalid_argument("medium speckle imager: dimension mismatch");
    weights_.assign(targets.size(), std::vector<double>(geometry.size(), 0.0));
    // per-probe, per-target factors: U_j(z) and T_pq = sum_ab dU_ab(z) m'_abpq
    std::set<std::pair<int, std::array<double, 3>>> dirs;
    for (const auto& p : probes) dirs.insert({static_cast<int>(p.mode), {p.direction[0], p.direction[1], p.direction[2]}});
    const double inv_n = 1.0 / static_cast<double>(dirs.size());
    const std::size_t NP = probes.size(), NT = targets.size();
    std::vector<PlaneWaveValue> uz(NP * NT);
    std::vector<Mat<cplx>> tz(dens ? 0 : NP * NT);
    for (std::size_t j = 0; j < NP; ++j)
        for (std::size_t t = 0; t < NT; ++t) {
            uz[j * NT + t] = plane_wave_value(probes[j], med, targets.points[t]);
            if (!dens) tz[j * NT + t] = emt_apply(trial.emtp, uz[j * NT + t].gradU);
        }
    const double dens_fac = -med.omega * med.omega * (trial.rho1p / med.rho0 - 1.0) * trial.volumeBp;
    parallel_for(geometry.size(), threads, [&](std::size_t c) {
        const Point& y = geometry.cells[c];
        // source factors per probe
        std::vector<Vec<cplx>> src(NP);
        for (std::size_t j = 0; j < NP; ++j) {
            const Mode mode = probes[j].mode;
            const double pre = -med.rho0 * med.omega / med.c(mode) * geometry.vol[c];
            const auto uy = plane_wave_value(probes[j], med, y);
            src[j].d = d;
            for (int l = 0; l < d; ++l) src[j][l] = pre * std::conj(uy.U[l]);
        }
        for (std::size_t t = 0; t < NT; ++t) {
            const Point x = targets.points[t] - y;
            // modal kernels at x, computed once per mode
            std::array<bool, 2> have{false, false};
            std::array<Mat<double>, 2> G;
            std::array<Ten3<double>, 2> dG;
            double acc = 0.0;
            for (std::size_t j = 0; j < NP; ++j) {
                const Mode mode = probes[j].mode;
                const int mi = mode == Mode::P ? 0 : 1;
                if (!have[mi]) {
                    const auto g = im_green_derivs(d, med.kappa(mode), x, dens ? 2 : 3);
                    if (dens) G[mi] = modal_gamma(med, mode, g);
                    else dG[mi] = modal_grad(med, mode, g);
                    have[mi] = true;
                }
                cplx v = 0.0;
                if (dens) {
                    cplx s = 0.0;
                    for (int a = 0; a < d; ++a)
                        for (int l = 0; l < d; ++l) s += uz[j * NT + t].U[a] * G[mi](a, l) * src[j][l];
                    v = dens_fac * s;
                } else {
                    const Mat<cplx>& T = tz[j * NT + t];
                    for (int p = 0; p < d; ++p)
                        for (int q = 0; q < d; ++q)
                            for (int l = 0; l < d; ++l) v += T(p, q) * dG[mi](p, q, l) * src[j][l];
                }
                acc += med.c(mode) * v.real();
            }
            weights_[t][c] = acc * inv_n;
        }
    });
}

std::vector<double> MediumSpeckleImager::image(const VolumeField& gamma) const {
    std::vector<double> out(weights_.size(), 0.0);
    for (std::size_t t = 0; t < weights_.size(); ++t) {
        if (gamma.size() != weights_[t].size()) throw std::invalid_argument("fluctuation field does not match imager");
        double s = 0.0;
        for (std::size_t c = 0; c < gamma.size(); ++c) s += weights_[t][c] * gamma.value[c];
        out[t] = s;
    }
    return out;
}

double medium_kernel(const Medium& med, const TrialInclusion& trial, Mode mode, const Point& x) {
    if (density_trial(med, trial)) return norm2(im_gamma_alpha(med, mode, x));
    return q_squared(med, trial.emtp, mode, x);
}

double medium_cov_constant(const Medium& med, const TrialInclusion& trial, Mode mode, int d) {
    const double c = med.c(mode);
    const double b = med.rho0 * med.omega / c;
    const double bp = b * planesum_factor(med, mode, d);
    const double C = density_trial(med, trial)
                         ? c * med.omega * med.omega * trial.volumeBp * (trial.rho1p / med.rho0 - 1.0)
                         : c;
    return C * C * bp * bp;
}

double medium_noise_image_cov(const GaussianFieldSpec& spec, const Medium& med, Mode mode,
                              const TrialInclusion& trial, const Point& z, const Point& zp) {
    if (spec.sigma_gamma == 0.0) return 0.0;
    const Lattice L = make_lattice_field(spec);
    const auto kz = lattice_kernel(L, med, trial, mode, z);
    auto kzp = lattice_kernel(L, med, trial, mode, zp);
    gaussian_smooth(kzp, L, spec.corr_len);
    double s = 0.0;
    for (std::size_t i = 0; i < kz.size(); ++i) s += kz[i] * kzp[i];
    const double vol = std::pow(spec.h, spec.d);
    return medium_cov_constant(med, trial, mode, spec.d) * spec.sigma_gamma * spec.sigma_gamma * vol * vol * s;
}

double medium_noise_image_cov_white(const GaussianFieldSpec& spec, const Medium& med, Mode mode,
                                    const TrialInclusion& trial, const Point& z, const Point& zp) {
    const Lattice L = make_lattice_field(spec);
    double s = 0.0;
    for (std::size_t c = 0; c < L.cells.size(); ++c)
        s += medium_kernel(med, trial, mode, z - L.cells.cells[c]) * medium_kernel(med, trial, mode, zp - L.cells.cells[c]) *
             L.cells.vol[c];
    const double w = spec.sigma_gamma * spec.sigma_gamma *
                     std::pow(2.0 * std::numbers::pi * spec.corr_len * spec.corr_len, 0.5 * spec.d);
    return medium_cov_constant(med, trial, mode, spec.d) * w * s;
}

double q_squared(const Medium& med, const EMT4& emt, Mode mode, const Point& x) {
    const int d = x.d;
    const Ten3<double> G = im_grad_gamma_alpha(med, mode, x);
    double s = 0.0;
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double t = 0.0;
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q) t += emt(i, j, p, q) * G(p, q, l);
                s += G(i, j, l) * t;
            }
    return s;
}

double q_squared(const Medium& med, const IsoEMT& emt, Mode mode, const Point& x) {
    const int d = x.d;
    const Ten3<double> G = im_grad_gamma_alpha(med, mode, x);
    double full = 0.0, swap = 0.0, div = 0.0;
    for (int l = 0; l < d; ++l) {
        double tr = 0.0;
        for (int i = 0; i < d; ++i) {
            tr += G(i, i, l);
            for (int j = 0; j < d; ++j) {
                full += G(i, j, l) * G(i, j, l);
                swap += G(i, j, l) * G(j, i, l);
            }
        }
        div += tr * tr;
    }
    if (mode == Mode::P) return emt.a * full + emt.b * div;
    return 0.5 * emt.a * full + 0.5 * emt.a * swap + emt.b * div;
}

// ----------------------------------------------------------- measurement

Mat<double> predicted_speckle_cov(const Medium& med, Mode mode, double sigma, const Point& x, const Point& xp) {
    return scale(im_gamma_alpha(med, mode, x - xp), -sigma * sigma / (4.0 * med.c(mode) * med.omega));
}

double predicted_image_cov(const Medium& med, const TrialInclusion& trial, Mode mode, int n, double sigma,
                           const Point& z, const Point& zp) {
    if (n < 1) throw std::invalid_argument("predicted_image_cov: n >= 1 required");
    const int d = z.d;
    const double Cp = med.c(mode) * std::pow(med.omega, 3) * med.mu0 * trial.volumeBp * trial.volumeBp *
                      std::pow(trial.rho1p / med.rho0 - 1.0, 2) * mode_factor(med, mode, d);
    return Cp * sigma * sigma / (2.0 * n) * norm2(im_gamma_alpha(med, mode, z - zp));
}

double predicted_image_cov_elastic(const Medium& med, const TrialInclusion& trial, Mode mode, int n, double sigma,
                                   const Point& z, const Point& zp, CovConstant which) {
    if (n < 1) throw std::invalid_argument("predicted_image_cov_elastic: n >= 1 required");
    const int d = z.d;
    const double p = which == CovConstant::Displayed ? 3.0 : 1.0;
    return med.mu0 * std::pow(med.c(mode) / med.omega, p) * mode_factor(med, mode, d) * sigma * sigma / (2.0 * n) *
           j_tensor(med, trial.emtp, mode, mode, z - zp);
}

double predicted_snr(const Medium& med, const Inclusion& inc, Mode mode, int n, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("predicted_snr: sigma must be > 0");
    const int d = inc.za.d;
    const double c = med.c(mode);
    const Point o = zero_point(d);
    if (inc.emt.is_zero()) {
        const double im0 = std::sqrt(norm2(im_gamma_alpha(med, mode, o)));
        return 4.0 *
               std::sqrt(2.0 * std::pow(std::numbers::pi, d - 2) * n * std::pow(med.omega, 5 - d) *
                         std::pow(med.rho0, 3) * std::pow(c, d - 1)) *
               std::pow(inc.delta, d) * inc.volumeB * std::abs(inc.rho1 - med.rho0) / sigma * im0;
    }
    const double k = med.kappa(mode);
    const double J = j_tensor(med, inc.emt, mode, mode, o);
    return std::pow(inc.delta, d) * std::sqrt(med.mu0 * med.omega) / std::sqrt(c * c * c) *
           std::pow(std::numbers::pi / k, 0.5 * (d - 2)) * (med.kappaS() / k) * (4.0 * std::sqrt(2.0 * n) / sigma) *
           std::sqrt(J);
}

double assembled_snr(const Medium& med, const Inclusion& inc, const TrialInclusion& trial, Mode mode, int n,
                     double sigma, CovConstant which) {
    if (!(sigma > 0.0)) throw std::invalid_argument("assembled_snr: sigma must be > 0");
    const SearchGrid at = make_point_set({inc.za});
    if (density_trial(med, trial)) {
        const double peak =
            predicted_peak(med, mode, contrast_constant(med, inc, trial, inc.za.d), inc.za, at).values[0];
        return peak / std::sqrt(predicted_image_cov(med, trial, mode, n, sigma, inc.za, inc.za));
    }
    const double peak = predicted_peak_elastic(med, mode, inc, at).values[0];
    return peak / std::sqrt(predicted_image_cov_elastic(med, trial, mode, n, sigma, inc.za, inc.za, which));
}

double empirical_snr(const std::vector<double>& noisy, double clean) {
    const Estimate v = sample_covariance(noisy, noisy);
    if (!(v.value > 0.0)) throw std::domain_error("empirical_snr: noisy samples have zero spread");
    return clean / std::sqrt(v.value);
}

double empirical_snr(const MCEnsemble& ens, const ImageGrid& clean, std::size_t iza) {
    ens.validate();
    if (iza >= clean.size()) throw std::out_of_range("empirical_snr: index out of range");
    std::vector<double> v(ens.trials);
    for (int t = 0; t < ens.trials; ++t) v[t] = ens.images[t].values.at(iza);
    return empirical_snr(v, clean.values[iza]);
}

MCEnsemble measurement_noise_ensemble(const Medium& med, const TrialInclusion& trial,
                                      const std::vector<PlaneWave>& probes,
                                      const std::vector<ComplexVecField>& clean, const BoundaryGrid& grid,
                                      const SearchGrid& targets, double sigma, int trials, std::uint64_t root_seed,
                                      int threads) {
    if (trials < 2) throw std::invalid_argument("measurement_noise_ensemble: trials >= 2 required");
    if (probes.size() != clean.size() || probes.empty())
        throw std::invalid_argument("measurement_noise_ensemble: probes and data must be aligned");
    const bool elastic = !trial.emtp.is_zero();
    const BackpropOperator opP(grid, med, targets, {Kernel::P}, elastic);
    const BackpropOperator opS(grid, med, targets, {Kernel::S}, elastic);
    MCEnsemble ens;
    ens.trials = trials;
    ens.seeds.resize(trials);
    ens.images.resize(trials);
    for (int t = 0; t < trials; ++t) ens.seeds[t] = derive_seed(root_seed, static_cast<std::uint64_t>(t), 0, 1);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        std::vector<ComplexVecField> dP, dS;
        std::vector<std::size_t> iP, iS;
        for (std::size_t j = 0; j < probes.size(); ++j) {
            auto noisy = add_measurement_noise(clean[j], grid, sigma, derive_seed(ens.seeds[t], j));
            if (probes[j].mode == Mode::P) {
                dP.push_back(std::move(noisy));
                iP.push_back(j);
            } else {
                dS.push_back(std::move(noisy));
                iS.push_back(j);
            }
        }
        const auto fP = opP.apply(dP);
        const auto fS = opS.apply(dS);
        std::vector<const BackField*> fields(probes.size());
        for (std::size_t j = 0; j < iP.size(); ++j) fields[iP[j]] = &fP[0][j];
        for (std::size_t j = 0; j < iS.size(); ++j) fields[iS[j]] = &fS[0][j];
        ens.images[t] = iwf_from_fields(med, trial, probes, fields, targets);
    });
    return ens;
}

SpeckleSamples measurement_speckle(const Medium& med, Mode mode, const BoundaryGrid& grid,
                                   const SearchGrid& targets, double sigma, int trials, std::uint64_t root_seed,
                                   int threads) {
    if (trials < 2) throw std::invalid_argument("measurement_speckle: trials >= 2 required");
    const BackpropOperator op(grid, med, targets, {mode == Mode::P ? Kernel::P : Kernel::S}, false);
    const ComplexVecField zero = zero_field(grid.d, grid.size());
    SpeckleSamples s;
    s.mode = mode;
    s.w.resize(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const auto noise = add_measurement_noise(zero, grid, sigma, derive_seed(root_seed, t, 0, 2));
        s.w[t] = op.apply({noise})[0][0].w;
    });
    return s;
}

ComplexEstimate speckle_covariance(const SpeckleSamples& s, std::size_t a, std::size_t b, int j, int k) {
    std::vector<cplx> x(s.w.size()), y(s.w.size());
    for (std::size_t t = 0; t < s.w.size(); ++t) {
        x[t] = s.w[t].at(a)[j];
        y[t] = s.w[t].at(b)[k];
    }
    return sample_covariance(x, y);
}

// ----------------------------------------------------------- resolution

double fwhm(const ImageGrid& image, const SearchGrid& grid, const Point& za, int axis) {
    if (!grid.is_lattice()) throw std::invalid_argument("fwhm needs a lattice image");
    if (image.size() != grid.size()) throw std::invalid_argument("fwhm: image and grid differ in size");
    if (axis < 0 || axis >= grid.d) throw std::invalid_argument("fwhm: bad axis");
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < grid.d; ++a) {
        idx[a] = static_cast<int>(std::lround((za[a] - grid.origin[a]) / grid.h));
        if (idx[a] < 0 || idx[a] >= grid.n[a]) throw std::invalid_argument("fwhm: za outside the image");
    }
    const int n = grid.n[axis];
    auto at = [&](int i) {
        auto q = idx;
        q[axis] = i;
        return image.values[grid.index(q[0], q[1], q[2])];
    };
    int ip = idx[axis];
    for (int i = std::max(0, idx[axis] - 2); i <= std::min(n - 1, idx[axis] + 2); ++i)
        if (at(i) > at(ip)) ip = i;
    const double peak = at(ip);
    if (!(peak > 0.0)) throw std::domain_error("fwhm: no positive peak near za");
    const double half = 0.5 * peak;
    double left = 0.0, right = 0.0;
    bool lf = false, rf = false;
    for (int i = ip; i > 0; --i)
        if (at(i - 1) <= half) {
            left = (i - 1) + (half - at(i - 1)) / (at(i) - at(i - 1));
            lf = true;
            break;
        }
    for (int i = ip; i < n - 1; ++i)
        if (at(i + 1) <= half) {
            right = i + (at(i) - half) / (at(i) - at(i + 1));
            rf = true;
            break;
        }
    if (!lf || !rf) throw std::domain_error("fwhm: no half-maximum crossing inside the image");
    return (right - left) * grid.h;
}

double half_width(const std::vector<double>& lags, const std::vector<double>& corr) {
    if (lags.size() != corr.size() || lags.size() < 2) throw std::invalid_argument("half_width: bad profile");
    const double half = 0.5 * corr[0];
    for (std::size_t i = 1; i < corr.size(); ++i)
        if (corr[i] <= half)
            return lags[i - 1] + (lags[i] - lags[i - 1]) * (corr[i - 1] - half) / (corr[i - 1] - corr[i]);
    throw std::domain_error("half_width: profile never drops to half");
}

}  // namespace etd
