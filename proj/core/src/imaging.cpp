#include "etd/imaging.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace etd {

namespace {

// sum_ij d_iU_j sum_pq m_ijpq d_p w_q
cplx elastic_pairing(const EMT4& M, const Mat<cplx>& gradU, const Mat<cplx>& gradw) {
    const int d = M.dim();
    cplx s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (gradU(i, j) == cplx{}) continue;
            cplx t = 0.0;
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) t += M(i, j, p, q) * gradw(p, q);
            s += gradU(i, j) * t;
        }
    return s;
}

cplx dot_u(const Vec<cplx>& U, const Vec<cplx>& w) {
    cplx s = 0.0;
    for (int j = 0; j < U.d; ++j) s += U[j] * w[j];
    return s;
}

void check_field(const BackField& f, const SearchGrid& targets, bool need_grad, const char* what) {
    if (f.size() != targets.size()) throw std::invalid_argument(std::string(what) + ": field and search grid differ in size");
    if (need_grad && !f.has_grad()) throw std::invalid_argument(std::string(what) + ": gradient of w required");
}

// Modal image term for one probe and its own modal field.
double iw_value(const Medium& med, const TrialInclusion& trial, const PlaneWaveValue& pv, const Vec<cplx>& w,
                const Mat<cplx>* gradw, double c) {
    // evaluated on the misfit field -w
    cplx v = -med.omega * med.omega * (trial.rho1p / med.rho0 - 1.0) * trial.volumeBp * dot_u(pv.U, w);
    if (gradw) v += elastic_pairing(trial.emtp, pv.gradU, *gradw);
    return c * v.real();
}

Mode other(Mode m) { return m == Mode::P ? Mode::S : Mode::P; }

// Number of distinct (mode, direction) pairs; the two shear polarizations of
// one direction in 3D count once.
double direction_count(const std::vector<PlaneWave>& probes) {
    std::vector<std::pair<int, std::array<double, 3>>> seen;
    for (const auto& p : probes) {
        std::pair<int, std::array<double, 3>> key{static_cast<int>(p.mode), {p.direction[0], p.direction[1], p.direction[2]}};
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
    }
    return static_cast<double>(seen.size());
}

}  // namespace

std::size_t ImageGrid::argmax() const {
    if (values.empty()) throw std::invalid_argument("argmax of empty image");
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double ImageGrid::max() const { return *std::max_element(values.begin(), values.end()); }
double ImageGrid::min() const { return *std::min_element(values.begin(), values.end()); }

ImageGrid itd(const Medium& med, const TrialInclusion& trial, const PlaneWave& probe, const BackField& wfull,
              const SearchGrid& targets) {
    const bool elastic = !trial.emtp.is_zero();
    check_field(wfull, targets, elastic, "itd");
    ImageGrid img;
    img.probe_mode = probe.mode;
    img.n_probes = 1;
    img.values.resize(targets.size());
    const double dens = med.omega * med.omega * (med.rho0 - trial.rho1p) * trial.volumeBp;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto pv = plane_wave_value(probe, med, targets.points[t]);
        // -Re{...} at -w equals +Re{...} at w
        cplx v = dens * dot_u(pv.U, wfull.w[t]);
        if (elastic) v += elastic_pairing(trial.emtp, pv.gradU, wfull.gradw[t]);
        img.values[t] = v.real();
    }
    return img;
}

ImageGrid iw(const Medium& med, const TrialInclusion& trial, const PlaneWave& probe, const BackField& wP,
             const BackField& wS, const SearchGrid& targets) {
    const bool elastic = !trial.emtp.is_zero();
    const BackField& w = probe.mode == Mode::P ? wP : wS;
    check_field(w, targets, elastic, "iw");
    ImageGrid img;
    img.probe_mode = probe.mode;
    img.n_probes = 1;
    img.values.resize(targets.size());
    const double c = med.c(probe.mode);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto pv = plane_wave_value(probe, med, targets.points[t]);
        // -gradU : M' grad(-w) = +gradU : M' grad w
        img.values[t] = iw_value(med, trial, pv, w.w[t], elastic ? &w.gradw[t] : nullptr, c);
    }
    return img;
}

ImageGrid iwf_from_fields(const Medium& med, const TrialInclusion& trial, const std::vector<PlaneWave>& probes,
                          const std::vector<const BackField*>& fields, const SearchGrid& targets) {
    if (probes.size() != fields.size() || probes.empty())
        throw std::invalid_argument("iwf: probes and fields must be non-empty and aligned");
    ImageGrid out;
    out.probe_mode = probes.front().mode;
    out.n_probes = static_cast<int>(probes.size());
    out.values.assign(targets.size(), 0.0);
    const BackField empty;
    for (std::size_t j = 0; j < probes.size(); ++j) {
        const BackField& w = *fields[j];
        const ImageGrid img = probes[j].mode == Mode::P ? iw(med, trial, probes[j], w, empty, targets)
                                                        : iw(med, trial, probes[j], empty, w, targets);
        for (std::size_t t = 0; t < targets.size(); ++t) out.values[t] += img.values[t];
    }
    const double nd = direction_count(probes);
    for (auto& v : out.values) v /= nd;
    return out;
}

ImageGrid iwf(const Medium& med, const TrialInclusion& trial, const std::vector<PlaneWave>& probes,
              const std::vector<ComplexVecField>& datasets, const BoundaryGrid& grid, const SearchGrid& targets,
              int threads) {
    if (probes.size() != datasets.size() || probes.empty())
        throw std::invalid_argument("iwf: probes and datasets must be non-empty and aligned");
    const bool elastic = !trial.emtp.is_zero();
    std::vector<BackField> fields(probes.size());
    for (Mode m : {Mode::P, Mode::S}) {
        std::vector<ComplexVecField> sub;
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < probes.size(); ++j)
            if (probes[j].mode == m) {
                sub.push_back(datasets[j]);
                idx.push_back(j);
            }
        if (sub.empty()) continue;
        const Kernel k = m == Mode::P ? Kernel::P : Kernel::S;
        auto res = backpropagate_batch(sub, grid, med, targets, {k}, elastic, threads);
        for (std::size_t j = 0; j < idx.size(); ++j) fields[idx[j]] = std::move(res[0][j]);
    }
    std::vector<const BackField*> ptr;
    for (const auto& f : fields) ptr.push_back(&f);
    return iwf_from_fields(med, trial, probes, ptr, targets);
}

ImageGrid itd_mean(const Medium& med, const TrialInclusion& trial, const std::vector<PlaneWave>& probes,
                   const std::vector<ComplexVecField>& datasets, const BoundaryGrid& grid, const SearchGrid& targets,
                   int threads) {
    if (probes.size() != datasets.size() || probes.empty())
        throw std::invalid_argument("itd_mean: probes and datasets must be non-empty and aligned");
    const bool elastic = !trial.emtp.is_zero();
    auto fields = backpropagate_batch(datasets, grid, med, targets, {Kernel::Full}, elastic, threads);
    ImageGrid out;
    out.probe_mode = probes.front().mode;
    out.n_probes = static_cast<int>(probes.size());
    out.values.assign(targets.size(), 0.0);
    for (std::size_t j = 0; j < probes.size(); ++j) {
        const ImageGrid img = itd(med, trial, probes[j], fields[0][j], targets);
        for (std::size_t t = 0; t < targets.size(); ++t) out.values[t] += img.values[t];
    }
    const double nd = direction_count(probes);
    for (auto& v : out.values) v /= nd;
    return out;
}

double contrast_constant(const Medium& med, const Inclusion& inc, const TrialInclusion& trial, int d) {
    return std::pow(inc.delta, d) * (med.rho0 - trial.rho1p) * (med.rho0 - inc.rho1) * trial.volumeBp * inc.volumeB;
}

ImageGrid predicted_peak(const Medium& med, Mode mode, double C, const Point& za, const SearchGrid& targets) {
    const int d = targets.d;
    const double fac = planesum_factor(med, mode, d) * C * std::pow(med.omega, 3);
    ImageGrid img;
    img.probe_mode = mode;
    img.values.resize(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t)
        img.values[t] = fac * norm2(im_gamma_alpha(med, mode, targets.points[t] - za));
    return img;
}

ImageGrid predicted_peak_elastic(const Medium& med, Mode mode, const Inclusion& inc, const SearchGrid& targets) {
    const int d = targets.d;
    const double fac = planesum_factor(med, mode, d) * std::pow(inc.delta, d) / med.omega;
    ImageGrid img;
    img.probe_mode = mode;
    img.values.resize(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t)
        img.values[t] = fac * j_tensor(med, inc.emt, mode, mode, targets.points[t] - inc.za);
    return img;
}

ImageGrid predicted_td_sum(const Medium& med, Mode mode, const Inclusion& inc, const TrialInclusion& trial,
                           const SearchGrid& targets) {
    const int d = targets.d;
    const bool density = inc.rho1 != med.rho0 || trial.rho1p != med.rho0;
    const bool elastic = !inc.emt.is_zero() || !trial.emtp.is_zero();
    if (density == elastic)
        throw std::invalid_argument("predicted_td_sum needs a density-only or elasticity-only configuration");
    const Mode o = other(mode);
    const double ca = med.c(mode), co = med.c(o);
    ImageGrid img;
    img.probe_mode = mode;
    img.values.resize(targets.size());
    if (density) {
        const double fac =
            planesum_factor(med, mode, d) * contrast_constant(med, inc, trial, d) * std::pow(med.omega, 3);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const Point x = targets.points[t] - inc.za;
            const auto ga = im_gamma_alpha(med, mode, x);
            const auto go = im_gamma_alpha(med, o, x);
            img.values[t] = fac * (norm2(ga) / ca + contract(ga, go) / co);
        }
    } else {
        if (trial.emtp.m.a != inc.emt.m.a)
            throw std::invalid_argument("predicted_td_sum: elasticity case assumes the trial EMT equals the inclusion EMT");
        const double fac = planesum_factor(med, mode, d) * std::pow(inc.delta, d) / med.omega;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const Point x = targets.points[t] - inc.za;
            img.values[t] =
                fac * (j_tensor(med, inc.emt, mode, mode, x) / ca + j_tensor(med, inc.emt, o, mode, x) / co);
        }
    }
    return img;
}

double j_tensor(const Medium& med, const EMT4& emt, Mode a, Mode b, const Point& x) {
    const Ten4<double> A = emt_apply(emt, im_hess_gamma_alpha(med, a, x));
    const Ten4<double> B = emt_apply(emt, im_hess_gamma_alpha(med, b, x));
    return contract(A, pair_transpose(B));
}

double j_pp_closed(const Medium& med, double a, double b, const Point& x) {
    const int d = x.d;
    const Ten4<double> H = im_hess_gamma_alpha(med, Mode::P, x);
    Mat<double> lap = zero_mat<double>(d);
    for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i) lap(j, l) += H(i, j, i, l);
    const double lap_tr = trace(lap);
    return a * a * norm2(H) + 2.0 * a * b * norm2(lap) + b * b * lap_tr * lap_tr;
}

double j_ss_closed(const Medium& med, double a, const Point& x) {
    const int d = x.d;
    const double ks = med.kappaS();
    const auto g = im_green_derivs(d, ks, x, 4);
    return a * a / (med.mu0 * med.mu0) *
           (norm2(g.g4) / std::pow(ks, 4) + (d - 6.0) / 4.0 * norm2(g.g2) + std::pow(ks, 4) / 4.0 * g.g * g.g);
}

double j_ss_closed_alt(const Medium& med, double a, const Point& x) {
    const int d = x.d;
    const double ks = med.kappaS();
    const auto g = im_green_derivs(d, ks, x, 4);
    double off = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    if (k != l) off += g.g4(i, j, k, l) * g.g4(i, j, k, l);
    return a * a / (med.mu0 * med.mu0) *
           (off / std::pow(ks, 4) + (d - 2.0) / 4.0 * norm2(g.g2) + std::pow(ks, 4) / 4.0 * g.g * g.g);
}

double coupling_strength(const Medium& med, const Point& x) {
    return contract(im_gamma_alpha(med, Mode::P, x), im_gamma_alpha(med, Mode::S, x));
}

}  // namespace etd
