#include "etd_app/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "etd/rng.hpp"

namespace etd::app {

namespace {

Point random_point(std::mt19937_64& rng, int d, double rmin, double rmax) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(rmin, rmax);
    Point p = zero_point(d);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        p[i] = n(rng);
        s += p[i] * p[i];
    }
    const double r = u(rng) / std::sqrt(s);
    for (int i = 0; i < d; ++i) p[i] *= r;
    return p;
}

Point shifted(const Point& x, int axis, double h) {
    Point y = x;
    y[axis] += h;
    return y;
}

template <class Tn>
double rel_diff(const Tn& a, const Tn& b) {
    const double den = std::max(fnorm(a), fnorm(b));
    return den == 0.0 ? 0.0 : fnorm(sub(a, b)) / den;
}

Mat<cplx> as_complex(const Mat<double>& m) {
    Mat<cplx> r = zero_mat<cplx>(m.d);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = m.a[k];
    return r;
}

// relative residual of mu0 Lap G + (lambda0 + mu0) grad div G + rho0 w^2 G
double helmholtz_residual(const Medium& med, const Point& x, double h) {
    const int d = x.d;
    auto G = [&](const Point& y) { return gamma_full(med, y); };
    const auto G0 = G(x);
    std::array<std::array<Mat<cplx>, 3>, 3> D2;
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            if (a == b) {
                D2[a][a] = scale(add(sub(G(shifted(x, a, h)), scale(G0, 2.0)), G(shifted(x, a, -h))), 1.0 / (h * h));
            } else {
                const auto pp = G(shifted(shifted(x, a, h), b, h));
                const auto pm = G(shifted(shifted(x, a, h), b, -h));
                const auto mp = G(shifted(shifted(x, a, -h), b, h));
                const auto mm = G(shifted(shifted(x, a, -h), b, -h));
                D2[a][b] = D2[b][a] = scale(add(sub(pp, pm), sub(mm, mp)), 1.0 / (4.0 * h * h));
            }
        }
    const double rw2 = med.rho0 * med.omega * med.omega;
    Mat<cplx> res = scale(G0, rw2);
    for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
            cplx lap = 0.0, gd = 0.0;
            for (int i = 0; i < d; ++i) {
                lap += D2[i][i](j, l);
                gd += D2[j][i](i, l);
            }
            res(j, l) += med.mu0 * lap + (med.lambda0 + med.mu0) * gd;
        }
    return fnorm(res) / (rw2 * fnorm(G0));
}

}  // namespace

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void SuiteReport::add(std::string name, double measured, double tolerance) {
    checks.push_back({std::move(name), measured, tolerance, measured <= tolerance, "<="});
}

void SuiteReport::add_range(std::string name, double measured, double lo, double hi) {
    Check c{std::move(name), measured, hi, measured >= lo && measured <= hi, "in [" + std::to_string(lo) + ", " +
                                                                                  std::to_string(hi) + "]"};
    checks.push_back(std::move(c));
}

nlohmann::json SuiteReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["pass"] = pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back(
            {{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"relation", c.relation}, {"pass", c.pass}});
    return j;
}

SuiteReport suite_kernels(const ExperimentConfig& c, int points) {
    SuiteReport r{"kernels", {}};
    const Medium med = make_medium(c);
    const int d = c.dim;
    std::mt19937_64 rng(derive_seed(c.mc.seed, 101));
    double split = 0.0, recip = 0.0, helm = 0.0;
    for (int t = 0; t < points; ++t) {
        const Point x = random_point(rng, d, 0.05, 8.0);
        const auto full = gamma_full(med, x);
        split = std::max(split, rel_diff(full, add(gamma_alpha(med, Mode::P, x), gamma_alpha(med, Mode::S, x))));
        recip = std::max(recip, std::max(rel_diff(full, transpose(full)), rel_diff(full, gamma_full(med, -x))));
        helm = std::max(helm, helmholtz_residual(med, random_point(rng, d, 0.5, 6.0), 1e-3));
    }
    r.add("full_equals_P_plus_S", split, 1e-10);
    r.add("reciprocity", recip, 1e-13);
    r.add("elastic_helmholtz_fd_residual", helm, 1e-4);
    double wr = 0.0;
    for (double x : {0.05, 1.0, 13.0, 40.0, 90.0})
        for (int n = 0; n < 5; ++n) {
            const cplx a = hankel1(n, x), b = hankel1(n + 1, x);
            const double w = b.real() * a.imag() - a.real() * b.imag();
            wr = std::max(wr, std::abs(w * std::numbers::pi * x / 2.0 - 1.0));
        }
    r.add("hankel_wronskian", wr, 1e-12);
    return r;
}

SuiteReport suite_hk(const ExperimentConfig& c) {
    SuiteReport r{"hk", {}};
    const Medium med = make_medium(c);
    const auto grid = make_boundary(c);
    const Point za = make_inclusion(c).za;
    const int d = c.dim;
    std::mt19937_64 rng(derive_seed(c.mc.seed, 102));
    const double pp0 = fnorm(hk_integral(med, Mode::P, Mode::P, grid, za, za).predicted);
    const double ss0 = fnorm(hk_integral(med, Mode::S, Mode::S, grid, za, za).predicted);
    for (Mode m : {Mode::P, Mode::S}) {
        const double lam = med.wavelength(m);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            const Point zs = za + random_point(rng, d, 0.0, 2.0 * lam);
            if (norm(zs) > grid.R - c.boundary.margin) continue;
            const auto h = hk_integral(med, m, m, grid, za, zs);
            worst = std::max(worst, fnorm(sub(h.numeric, as_complex(h.predicted))) / (m == Mode::P ? pp0 : ss0));
        }
        r.add(std::string("same_mode_") + mode_name(m), worst, 0.10);
    }
    double cross = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Point zs = za + random_point(rng, d, 0.0, 2.0 * med.wavelength(Mode::S));
        cross = std::max(cross, fnorm(hk_integral(med, Mode::P, Mode::S, grid, za, zs).numeric) / std::sqrt(pp0 * ss0));
    }
    r.add("cross_mode_PS", cross, 0.10);

    // plane-wave direction sum with n = 256 (2D) or 4000 (3D) directions
    const int n = d == 2 ? 256 : 4000;
    for (Mode m : {Mode::P, Mode::S}) {
        const double ref = fnorm(planewave_sum_check(n, m, med, zero_point(d)).rhs);
        double worst = 0.0;
        for (int t = 0; t < 30; ++t) {
            const double rad = std::uniform_real_distribution<double>(0.0, 8.0)(rng) / med.kappa(m);
            const auto s = planewave_sum_check(n, m, med, random_point(rng, d, rad, rad));
            worst = std::max(worst, fnorm(sub(s.lhs, as_complex(s.rhs))) / ref);
        }
        r.add(std::string("planesum_") + mode_name(m), worst, 0.05);
        if (d == 2) {
            const auto s0 = planewave_sum_check(n, m, med, zero_point(2));
            const Mat<cplx> half = scale(identity<cplx>(2), 0.5);
            r.add(std::string("planesum_origin_") + mode_name(m),
                  std::max(fnorm(sub(s0.lhs, half)), fnorm(sub(as_complex(s0.rhs), half))), 1e-13);
        }
    }
    return r;
}

SuiteReport suite_emt(const ExperimentConfig& c) {
    SuiteReport r{"emt", {}};
    const int d = c.dim;
    const IsoEMT iso{c.trial.emt.type == "iso" ? c.trial.emt.a : 1.0, c.trial.emt.type == "iso" ? c.trial.emt.b : 1.0};
    const EMT4 M = emt_from_iso(iso, d);
    r.add("symmetry_defect", emt_symmetry_defect(M), 0.0);
    std::mt19937_64 rng(derive_seed(c.mc.seed, 103));
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        Mat<double> A = zero_mat<double>(d);
        for (auto& v : A.a) v = g(rng);
        const auto MA = emt_apply(M, A);
        Mat<double> ref = scale(identity<double>(d), iso.b * trace(A));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) ref(i, j) += 0.5 * iso.a * (A(i, j) + A(j, i));
        worst = std::max(worst, fnorm(sub(MA, ref)) / fnorm(ref));
        // M is self-adjoint for the Frobenius pairing
        Mat<double> B = zero_mat<double>(d);
        for (auto& v : B.a) v = g(rng);
        worst = std::max(worst, std::abs(emt_form(M, A, B) - emt_form(M, B, A)) / (fnorm(A) * fnorm(B)));
    }
    r.add("iso_action", worst, 1e-14);
    return r;
}

SuiteReport suite_noise(const ExperimentConfig& c, int trials, int threads) {
    SuiteReport r{"noise", {}};
    const Medium med = make_medium(c);
    const auto grid = make_boundary(c);
    const Mode mode = probe_mode(c);
    const double sigma = c.noise.sigma_noise > 0.0 ? c.noise.sigma_noise : 1.0;
    const int d = c.dim;

    // generator: normalized samples nu sqrt(4 w_k) / sigma have mean 0, E|.|^2 = 1
    const ComplexVecField zero = zero_field(d, grid.size());
    cplx mean = 0.0;
    double second = 0.0, second2 = 0.0;
    const std::size_t count = static_cast<std::size_t>(trials) * grid.size() * d;
    for (int t = 0; t < trials; ++t) {
        const auto nu = add_measurement_noise(zero, grid, sigma, derive_seed(c.mc.seed, t, 0, 4));
        for (std::size_t k = 0; k < grid.size(); ++k)
            for (int j = 0; j < d; ++j) {
                const cplx v = nu.values[k][j] * std::sqrt(4.0 * grid.weights[k]) / sigma;
                mean += v;
                second += std::norm(v);
                second2 += std::norm(v) * std::norm(v);
            }
    }
    mean /= static_cast<double>(count);
    r.add("generator_mean", std::abs(mean), 3.0 / std::sqrt(static_cast<double>(trials) * grid.size()));
    const double m2 = second / count;
    const double se2 = std::sqrt((second2 / count - m2 * m2) / count);
    r.add("generator_second_moment_z", std::abs(m2 - 1.0) / se2, 3.0);

    // speckle covariance at za paired with za + s e_1 for 5 separations
    const Point za = make_inclusion(c).za;
    const double lam = med.wavelength(mode);
    std::vector<Point> pts{za};
    const std::vector<double> lags{0.0, 0.1, 0.25, 0.5, 1.0};
    for (std::size_t i = 1; i < lags.size(); ++i) pts.push_back(shifted(za, 0, lags[i] * lam));
    const auto samples = measurement_speckle(med, mode, grid, make_point_set(pts), sigma, trials,
                                             derive_seed(c.mc.seed, 104), threads);
    for (std::size_t b = 0; b < pts.size(); ++b) {
        const auto P = predicted_speckle_cov(med, mode, sigma, pts[0], pts[b]);
        for (int j = 0; j < d; ++j) {
            const auto e = speckle_covariance(samples, 0, b, j, j);
            const double z = std::abs(e.value.real() - P(j, j)) / e.se_re;
            r.add("speckle_cov_lag" + std::to_string(b) + "_" + std::to_string(j) + std::to_string(j) + "_z", z, 3.0);
        }
    }
    return r;
}

SuiteReport run_suite(const std::string& name, const ExperimentConfig& c, int trials, int threads) {
    if (name == "kernels") return suite_kernels(c);
    if (name == "hk") return suite_hk(c);
    if (name == "emt") return suite_emt(c);
    if (name == "noise") return suite_noise(c, trials, threads);
    throw std::invalid_argument("unknown suite '" + name + "' (expected hk, kernels, emt or noise)");
}

}  // namespace etd::app
