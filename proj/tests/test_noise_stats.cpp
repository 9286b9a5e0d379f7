#include <gtest/gtest.h>

#include <map>
#include <numbers>
#include <random>

#include "etd/noise_stats.hpp"
#include "etd/rng.hpp"
#include "support.hpp"

using namespace etd;

namespace {

TrialInclusion elastic_trial(int d, double a = 1.0, double b = 1.0) {
    const Medium med;
    TrialInclusion t;
    t.rho1p = med.rho0;
    t.emtp = emt_from_iso({a, b}, d);
    return t;
}

}  // namespace

TEST(SampleCovariance, KnownData) {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
    const auto c = sample_covariance(x, y);
    EXPECT_NEAR(c.value, 2.0 * 5.0 / 3.0, 1e-14);
    EXPECT_GT(c.se, 0.0);
    const std::vector<cplx> z{{1, 1}, {-1, 0}, {0, -1}, {0, 0}};
    const auto cz = sample_covariance(z, z);
    // sum |z - mean|^2 / (n - 1), mean = 0
    EXPECT_NEAR(cz.value.real(), 4.0 / 3.0, 1e-14);
    EXPECT_NEAR(cz.value.imag(), 0.0, 1e-14);
    EXPECT_THROW(sample_covariance(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(SampleCovariance, EstimateHelpers) {
    const Estimate e{1.0, 0.1};
    EXPECT_TRUE(e.within(1.25));
    EXPECT_FALSE(e.within(1.35));
    EXPECT_NEAR(e.zscore(0.8), 2.0, 1e-12);
}

TEST(MCEnsemble, Validation) {
    MCEnsemble e;
    e.trials = 2;
    e.seeds = {1, 2};
    e.images.resize(2);
    e.images[0].values = {1.0, 2.0};
    e.images[1].values = {3.0, 4.0};
    EXPECT_NO_THROW(e.validate());
    EXPECT_NEAR(empirical_covariance(e, 0, 1).value, 2.0, 1e-14);
    e.seeds = {1, 1};
    EXPECT_THROW(e.validate(), std::invalid_argument);
    e.seeds = {1, 2};
    e.images[1].values.pop_back();
    EXPECT_THROW(e.validate(), std::invalid_argument);
}

TEST(GaussianField, VarianceAndCorrelation) {
    GaussianFieldSpec spec;
    spec.sigma_gamma = 1.3;
    spec.corr_len = 0.5;
    spec.radius = 3.0;
    spec.h = 0.125;
    const GaussianFieldSampler s(spec);
    EXPECT_LT(s.clipped_fraction(), 1e-8);
    const auto& geo = s.geometry();
    // pairs of cells four nodes apart along the first axis (lag = l)
    std::map<std::pair<long, long>, std::size_t> at;
    for (std::size_t c = 0; c < geo.size(); ++c)
        at[{std::lround(geo.cells[c][0] / spec.h), std::lround(geo.cells[c][1] / spec.h)}] = c;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [k, c] : at) {
        const auto it = at.find({k.first + 4, k.second});
        if (it != at.end()) pairs.emplace_back(c, it->second);
    }
    ASSERT_GT(pairs.size(), 100u);
    double var = 0.0, lag = 0.0;
    const int draws = 1000;
    for (int t = 0; t < draws; ++t) {
        const auto g = s.sample(derive_seed(7, t));
        double v = 0.0, p = 0.0;
        for (double x : g.value) v += x * x;
        for (const auto& [a, b] : pairs) p += g.value[a] * g.value[b];
        var += v / g.size();
        lag += p / pairs.size();
    }
    const double s2 = spec.sigma_gamma * spec.sigma_gamma;
    EXPECT_NEAR(var / draws / s2, 1.0, 0.05);
    EXPECT_NEAR(lag / draws / s2 / std::exp(-0.5), 1.0, 0.10);
    EXPECT_NEAR(gaussian_covariance(spec, spec.corr_len), s2 * std::exp(-0.5), 1e-14);
}

TEST(GaussianField, DeterministicMaskedAndZeroForZeroSigma) {
    GaussianFieldSpec spec;
    spec.sigma_gamma = 0.2;
    spec.radius = 2.0;
    const GaussianFieldSampler s(spec);
    const auto a = s.sample(5), b = s.sample(5), c = s.sample(6);
    EXPECT_EQ(a.value, b.value);
    EXPECT_NE(a.value, c.value);
    for (const auto& p : a.cells) EXPECT_LE(norm(p), spec.radius);
    spec.sigma_gamma = 0.0;
    for (double v : sample_gamma(spec, 5).value) EXPECT_EQ(v, 0.0);
    GaussianFieldSpec bad;
    bad.h = 0.0;
    EXPECT_THROW(validate_field_spec(bad), std::invalid_argument);
    bad = GaussianFieldSpec{};
    bad.corr_len = 0.05;  // below the lattice spacing
    EXPECT_FALSE(field_spec_warnings(bad).empty());
}

TEST(MediumSpeckle, ImagerIsTheWeightedImageOfTheSpeckleField) {
    const Medium med;
    for (bool elastic : {false, true})
        for (Mode m : {Mode::P, Mode::S}) {
            GaussianFieldSpec spec;
            spec.sigma_gamma = 0.1;
            spec.radius = 2.0;
            spec.h = 0.25;
            const auto gamma = sample_gamma(spec, 3);
            const TrialInclusion trial = elastic ? elastic_trial(2) : TrialInclusion{};
            const auto probes = make_probes(m, uniform_directions(6, 2));
            const auto targets = make_point_set({make_point(0.1, 0.2), make_point(-0.5, 0.3)});
            const MediumSpeckleImager imager(gamma, med, trial, probes, targets, 2);
            const auto got = imager.image(gamma);
            std::vector<BackField> fields;
            for (const auto& p : probes) fields.push_back(medium_speckle(gamma, p, med, m, targets, elastic));
            std::vector<const BackField*> ptr;
            for (const auto& f : fields) ptr.push_back(&f);
            const auto ref = iwf_from_fields(med, trial, probes, ptr, targets);
            for (std::size_t t = 0; t < targets.size(); ++t)
                EXPECT_NEAR(got[t], ref.values[t], 1e-10 * std::abs(ref.values[t])) << elastic << mode_name(m);
        }
}

TEST(MediumKernel, IsotropicClosedFormMatchesContraction) {
    const Medium med;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> coef(0.1, 2.0);
    for (int d : {2, 3})
        for (Mode m : {Mode::P, Mode::S})
            for (int t = 0; t < 20; ++t) {
                const Point x = test::random_point(rng, d, 0.0, 3.0);
                const IsoEMT iso{coef(rng), coef(rng)};
                const double g = q_squared(med, emt_from_iso(iso, d), m, x);
                EXPECT_NEAR(q_squared(med, iso, m, x), g, 1e-12 * std::abs(g) + 1e-300);
                EXPECT_GE(g, 0.0);
            }
    EXPECT_EQ(q_squared(med, IsoEMT{0.0, 0.0}, Mode::S, make_point(0.3, 0.1)), 0.0);
    // density trials use |Im Gamma|^2
    const Point x = make_point(0.2, -0.4);
    EXPECT_EQ(medium_kernel(med, TrialInclusion{}, Mode::P, x), norm2(im_gamma_alpha(med, Mode::P, x)));
}

TEST(MediumCovariance, SeparableQuadratureMatchesDirectDoubleSum) {
    const Medium med;
    GaussianFieldSpec spec;
    spec.sigma_gamma = 0.3;
    spec.corr_len = 0.3;
    spec.radius = 1.5;
    spec.h = 0.1;
    const GaussianFieldSampler s(spec);
    const auto& geo = s.geometry();
    const Point z = make_point(0.1, 0.0), zp = make_point(-0.2, 0.15);
    for (bool elastic : {false, true}) {
        const TrialInclusion trial = elastic ? elastic_trial(2, 1.0, 0.5) : TrialInclusion{};
        const Mode m = Mode::S;
        double ref = 0.0;
        for (std::size_t a = 0; a < geo.size(); ++a) {
            const double ka = medium_kernel(med, trial, m, z - geo.cells[a]);
            for (std::size_t b = 0; b < geo.size(); ++b)
                ref += ka * gaussian_covariance(spec, norm(geo.cells[a] - geo.cells[b])) *
                       medium_kernel(med, trial, m, zp - geo.cells[b]) * geo.vol[a] * geo.vol[b];
        }
        ref *= medium_cov_constant(med, trial, m, 2);
        const double got = medium_noise_image_cov(spec, med, m, trial, z, zp);
        EXPECT_NEAR(got, ref, 1e-9 * std::abs(ref));
    }
    spec.sigma_gamma = 0.0;
    EXPECT_EQ(medium_noise_image_cov(spec, med, Mode::P, TrialInclusion{}, z, zp), 0.0);
}

TEST(MediumCovariance, ApproachesWhiteLimitForShortCorrelation) {
    const Medium med;
    GaussianFieldSpec spec;
    spec.sigma_gamma = 0.3;
    spec.radius = 2.0;
    const Point z = make_point(0.1, 0.0), zp = make_point(0.3, 0.1);
    double prev = 1.0;
    for (double ell : {0.1, 0.05, 0.025}) {
        spec.corr_len = ell;
        spec.h = ell / 4.0;
        const double c = medium_noise_image_cov(spec, med, Mode::S, TrialInclusion{}, z, zp);
        const double w = medium_noise_image_cov_white(spec, med, Mode::S, TrialInclusion{}, z, zp);
        const double err = std::abs(c / w - 1.0);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 0.02);
}

TEST(MediumCovariance, MonteCarloMatchesQuadrature) {
    const Medium med;
    GaussianFieldSpec spec;
    spec.sigma_gamma = 0.05;
    spec.corr_len = 0.4;
    spec.radius = 3.0;
    spec.h = 0.1;
    const GaussianFieldSampler s(spec);
    const TrialInclusion trial;
    const auto probes = make_probes(Mode::P, uniform_directions(64, 2));
    const Point z = make_point(0.0, 0.0), zp = make_point(0.4, 0.0);
    const auto targets = make_point_set({z, zp});
    const MediumSpeckleImager imager(s.geometry(), med, trial, probes, targets, 2);
    const int draws = 400;
    std::vector<double> a(draws), b(draws);
    for (int t = 0; t < draws; ++t) {
        const auto img = imager.image(s.sample(derive_seed(11, t)));
        a[t] = img[0];
        b[t] = img[1];
    }
    for (const auto& [x, y, p, q] : {std::tuple{&a, &a, z, z}, std::tuple{&a, &b, z, zp}}) {
        const auto e = sample_covariance(*x, *y);
        const double pred = medium_noise_image_cov(spec, med, Mode::P, trial, p, q);
        EXPECT_TRUE(e.within(pred, 3.0)) << e.value << " +- " << e.se << " vs " << pred;
    }
}

TEST(MeasurementNoise, SpeckleCovarianceMatchesPrediction) {
    const Medium med;
    const auto grid = circle_boundary(10.0, 256);
    const double sigma = 0.5;
    const auto targets = make_point_set({make_point(0.0, 0.0), make_point(0.3, 0.2)});
    const auto s = measurement_speckle(med, Mode::S, grid, targets, sigma, 400, 9, 2);
    for (std::size_t b = 0; b < 2; ++b) {
        const auto P = predicted_speckle_cov(med, Mode::S, sigma, targets.points[0], targets.points[b]);
        double e = 0.0, m = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const auto c = speckle_covariance(s, 0, b, j, k);
                e += std::norm(c.value - P(j, k));
                m += P(j, k) * P(j, k);
            }
        EXPECT_LT(std::sqrt(e / m), 0.15) << "pair " << b;
    }
}

TEST(MeasurementNoise, ImageVarianceMatchesDensityPrediction) {
    const Medium med;
    Inclusion inc;
    inc.za = make_point(0.3, -0.2);
    const TrialInclusion trial;
    const auto grid = circle_boundary(10.0, 256);
    const int n = 16;
    const auto probes = make_probes(Mode::S, uniform_directions(n, 2));
    std::vector<ComplexVecField> clean;
    for (const auto& p : probes) clean.push_back(filtered_data(med, inc, p, grid));
    const auto targets = make_point_set({inc.za, inc.za + make_point(0.25, 0.0)});
    const double sigma = 1e-4;
    const auto ens = measurement_noise_ensemble(med, trial, probes, clean, grid, targets, sigma, 300, 21, 2);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto e = empirical_covariance(ens, 0, j);
        const double pred = predicted_image_cov(med, trial, Mode::S, n, sigma, targets.points[0], targets.points[j]);
        EXPECT_TRUE(e.within(pred, 3.0)) << e.value << " +- " << e.se << " vs " << pred;
    }
}

TEST(MeasurementNoise, EnsembleIsThreadInvariant) {
    const Medium med;
    Inclusion inc;
    const auto grid = circle_boundary(10.0, 64);
    const auto probes = make_probes(Mode::P, uniform_directions(4, 2));
    std::vector<ComplexVecField> clean;
    for (const auto& p : probes) clean.push_back(filtered_data(med, inc, p, grid));
    const auto targets = make_point_set({make_point(0.0, 0.0), make_point(0.2, 0.1)});
    const auto a = measurement_noise_ensemble(med, TrialInclusion{}, probes, clean, grid, targets, 0.01, 6, 4, 1);
    const auto b = measurement_noise_ensemble(med, TrialInclusion{}, probes, clean, grid, targets, 0.01, 6, 4, 3);
    for (int t = 0; t < 6; ++t) EXPECT_EQ(a.images[t].values, b.images[t].values);
    EXPECT_THROW(measurement_noise_ensemble(med, TrialInclusion{}, probes, clean, grid, targets, 0.01, 1, 4),
                 std::invalid_argument);
}

TEST(SNR, ScalingAndAssembly) {
    const Medium med;
    for (Mode m : {Mode::P, Mode::S}) {
        Inclusion inc;
        const double s16 = predicted_snr(med, inc, m, 16, 0.1);
        EXPECT_NEAR(predicted_snr(med, inc, m, 64, 0.1) / s16, 2.0, 1e-12);
        EXPECT_NEAR(predicted_snr(med, inc, m, 16, 0.2) / s16, 0.5, 1e-12);
        Inclusion twice = inc;
        twice.rho1 = med.rho0 + 2.0 * (inc.rho1 - med.rho0);
        EXPECT_NEAR(predicted_snr(med, twice, m, 16, 0.1) / s16, 2.0, 1e-12);
        // closed form and peak / sqrt(var) agree for a density contrast
        EXPECT_NEAR(assembled_snr(med, inc, TrialInclusion{}, m, 16, 0.1) / s16, 1.0, 1e-10);
        Inclusion el;
        el.rho1 = med.rho0;
        el.emt = emt_from_iso({1.0, 1.0}, 2);
        const TrialInclusion et = elastic_trial(2);
        const double e16 = predicted_snr(med, el, m, 16, 0.1);
        EXPECT_NEAR(assembled_snr(med, el, et, m, 16, 0.1, CovConstant::Displayed) / e16, 1.0, 1e-10);
        const double k = med.kappa(m);
        EXPECT_NEAR(assembled_snr(med, el, et, m, 16, 0.1, CovConstant::Derived) / e16, 1.0 / k, 1e-10);
    }
    EXPECT_THROW(predicted_snr(med, Inclusion{}, Mode::P, 16, 0.0), std::invalid_argument);
    EXPECT_THROW(empirical_snr(std::vector<double>{1.0, 1.0, 1.0}, 1.0), std::domain_error);
    EXPECT_NEAR(empirical_snr(std::vector<double>{1.0, 3.0}, 4.0), 4.0 / std::sqrt(2.0), 1e-14);
}

TEST(Resolution, FwhmOfGaussianProfile) {
    const double s = 0.3, h = 0.01;
    const Point za = make_point(0.05, -0.03);
    const auto grid = make_lattice(za, 201, h);
    ImageGrid img;
    for (const auto& p : grid.points) {
        const Point r = p - za;
        img.values.push_back(std::exp(-(r[0] * r[0] + 4.0 * r[1] * r[1]) / (2 * s * s)));
    }
    const double w = 2.0 * std::sqrt(2.0 * std::log(2.0)) * s;
    EXPECT_NEAR(fwhm(img, grid, za, 0), w, 2e-3 * w);
    EXPECT_NEAR(fwhm(img, grid, za, 1), 0.5 * w, 2e-3 * w);
    EXPECT_THROW(fwhm(img, make_point_set({za}), za, 0), std::invalid_argument);
    EXPECT_THROW(fwhm(img, grid, za + make_point(5.0, 0.0), 0), std::invalid_argument);
    ImageGrid flat;
    flat.values.assign(grid.size(), 1.0);
    EXPECT_THROW(fwhm(flat, grid, za, 0), std::domain_error);
}

TEST(Resolution, HalfWidth) {
    EXPECT_NEAR(half_width({0.0, 1.0, 2.0}, {1.0, 0.8, 0.2}), 1.5, 1e-14);
    EXPECT_THROW(half_width({0.0, 1.0}, {1.0, 0.9}), std::domain_error);
    EXPECT_THROW(half_width({0.0}, {1.0}), std::invalid_argument);
}
