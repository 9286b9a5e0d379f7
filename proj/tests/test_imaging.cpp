#include <gtest/gtest.h>

#include <random>

#include "etd/imaging.hpp"
#include "support.hpp"

using namespace etd;

namespace {

struct Scene {
    Medium med;
    BoundaryGrid grid = circle_boundary(10.0, 512);
    Inclusion inc;
    TrialInclusion trial;
    std::vector<PlaneWave> probes;
    std::vector<ComplexVecField> data;

    Scene(Mode m, bool elastic, int n = 64) {
        inc.za = make_point(0.4, -0.25);
        if (elastic) {
            inc.rho1 = med.rho0;
            inc.emt = emt_from_iso({1.0, 1.0}, 2);
            trial.rho1p = med.rho0;
            trial.emtp = inc.emt;
        }
        probes = make_probes(m, uniform_directions(n, 2));
        for (const auto& p : probes) data.push_back(filtered_data(med, inc, p, grid));
    }
};

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0, m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e += (a[i] - b[i]) * (a[i] - b[i]);
        m += b[i] * b[i];
    }
    return std::sqrt(e / m);
}

}  // namespace

TEST(JTensor, ClosedFormsMatchContraction) {
    const Medium med;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> coef(0.2, 2.0);
    for (int d : {2, 3})
        for (int t = 0; t < 20; ++t) {
            const Point x = test::random_point(rng, d, 0.05, 3.0);
            const double a = coef(rng), b = coef(rng);
            const EMT4 M = emt_from_iso({a, b}, d);
            const double jp = j_tensor(med, M, Mode::P, Mode::P, x);
            EXPECT_NEAR(j_pp_closed(med, a, b, x), jp, 1e-8 * std::abs(jp));
            const double js = j_tensor(med, M, Mode::S, Mode::S, x);
            EXPECT_NEAR(j_ss_closed(med, a, x), js, 1e-8 * std::abs(js));
        }
}

TEST(JTensor, ShearFormsDifferOnlyByDiagonalBlock) {
    // the first form equals the k != l form once the k = l block is
    // contracted with the Helmholtz equation: d_ijkk G = -kS^2 d_ij G
    const Medium med;
    std::mt19937_64 rng(2);
    const double ks = med.kappaS();
    for (int d : {2, 3})
        for (int t = 0; t < 20; ++t) {
            const Point x = test::random_point(rng, d, 0.05, 3.0);
            const auto g = im_green_derivs(d, ks, x, 4);
            double diag = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double tr = 0.0;
                    for (int k = 0; k < d; ++k) {
                        tr += g.g4(i, j, k, k);
                        diag += g.g4(i, j, k, k) * g.g4(i, j, k, k);
                    }
                    EXPECT_NEAR(tr, -ks * ks * g.g2(i, j), 1e-10 * ks * ks * fnorm(g.g2));
                }
            const double lit = j_ss_closed_alt(med, 1.0, x) - j_ss_closed(med, 1.0, x);
            const double expect = (norm2(g.g2) - diag / std::pow(ks, 4)) / (med.mu0 * med.mu0);
            EXPECT_NEAR(lit, expect, 1e-10 * j_ss_closed(med, 1.0, x));
        }
}

TEST(JTensor, NonNegativeAtOriginAndZeroForZeroTensor) {
    const Medium med;
    for (int d : {2, 3}) {
        const EMT4 M = emt_from_iso({1.0, 1.0}, d);
        EXPECT_GT(j_tensor(med, M, Mode::P, Mode::P, zero_point(d)), 0.0);
        EXPECT_GT(j_tensor(med, M, Mode::S, Mode::S, zero_point(d)), 0.0);
        EXPECT_EQ(j_tensor(med, zero_emt(d), Mode::S, Mode::S, zero_point(d)), 0.0);
    }
}

TEST(Coupling, NonzeroAtInclusion) {
    const Medium med;
    EXPECT_GT(std::abs(coupling_strength(med, zero_point(2))), 1e-4);
    EXPECT_GT(std::abs(coupling_strength(med, zero_point(3))), 1e-4);
}

class WeightedImage : public ::testing::TestWithParam<std::tuple<Mode, bool>> {};

TEST_P(WeightedImage, PeaksAtInclusionAndMatchesPrediction) {
    const auto [mode, elastic] = GetParam();
    Scene s(mode, elastic);
    const double h = 0.04;
    const auto targets = make_lattice(s.inc.za, 21, h);
    const auto img = iwf(s.med, s.trial, s.probes, s.data, s.grid, targets);
    const Point zmax = targets.points[img.argmax()];
    EXPECT_LE(std::abs(zmax[0] - s.inc.za[0]), h * 1.01);
    EXPECT_LE(std::abs(zmax[1] - s.inc.za[1]), h * 1.01);
    const auto pred = elastic ? predicted_peak_elastic(s.med, mode, s.inc, targets)
                              : predicted_peak(s.med, mode, contrast_constant(s.med, s.inc, s.trial, 2), s.inc.za,
                                               targets);
    EXPECT_GT(correlation(img.values, pred.values), 0.95);
    EXPECT_LT(rel_l2(img.values, pred.values), 0.10);
}

INSTANTIATE_TEST_SUITE_P(Modes, WeightedImage,
                         ::testing::Combine(::testing::Values(Mode::P, Mode::S), ::testing::Bool()));

TEST(TopologicalDerivative, MatchesPredictionWithCoupling) {
    for (Mode m : {Mode::P, Mode::S})
        for (bool elastic : {false, true}) {
            Scene s(m, elastic);
            const auto targets = make_lattice(s.inc.za, 15, 0.06);
            const auto img = itd_mean(s.med, s.trial, s.probes, s.data, s.grid, targets);
            const auto pred = predicted_td_sum(s.med, m, s.inc, s.trial, targets);
            EXPECT_LT(rel_l2(img.values, pred.values), 0.10) << mode_name(m) << " elastic=" << elastic;
        }
}

TEST(TopologicalDerivative, PredictionRejectsMixedContrast) {
    Scene s(Mode::P, false, 16);
    s.inc.emt = emt_from_iso({1.0, 1.0}, 2);
    const auto targets = make_lattice(s.inc.za, 3, 0.1);
    EXPECT_THROW(predicted_td_sum(s.med, Mode::P, s.inc, s.trial, targets), std::invalid_argument);
}

TEST(Imaging, ZeroDataGivesZeroImage) {
    Scene s(Mode::S, true, 16);
    for (auto& d : s.data) d = zero_field(2, s.grid.size());
    const auto targets = make_lattice(s.inc.za, 5, 0.1);
    for (double v : iwf(s.med, s.trial, s.probes, s.data, s.grid, targets).values) EXPECT_EQ(v, 0.0);
    for (double v : itd_mean(s.med, s.trial, s.probes, s.data, s.grid, targets).values) EXPECT_EQ(v, 0.0);
}

TEST(Imaging, ThreeDimensionalShearAverageCountsDirections) {
    // summing both polarizations per direction and dividing by directions
    // reproduces the prediction scale
    Medium med;
    Inclusion inc;
    inc.za = make_point(0.2, -0.1, 0.15);
    TrialInclusion trial;
    const auto grid = sphere_boundary(6.0, 40, 80);
    const auto probes = make_probes(Mode::S, uniform_directions(150, 3));
    std::vector<ComplexVecField> data;
    for (const auto& p : probes) data.push_back(filtered_data(med, inc, p, grid));
    const auto targets = make_point_set({inc.za});
    const auto img = iwf(med, trial, probes, data, grid, targets);
    const auto pred = predicted_peak(med, Mode::S, contrast_constant(med, inc, trial, 3), inc.za, targets);
    EXPECT_NEAR(img.values[0] / pred.values[0], 1.0, 0.1);
}
