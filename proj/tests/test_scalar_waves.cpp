#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <numbers>
#include <random>

#include "etd/scalar_waves.hpp"
#include "support.hpp"

using namespace etd;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

cplx reference_hankel(int n, double x) {
    const mp X(x);
    const mp j = boost::math::cyl_bessel_j(n, X);
    const mp y = boost::math::cyl_neumann(n, X);
    return {static_cast<double>(j), static_cast<double>(y)};
}

}  // namespace

TEST(Hankel, MatchesHighPrecisionReference) {
    std::vector<double> xs;
    for (double x = 0.01; x < 120.0; x *= 1.17) xs.push_back(x);
    for (double x : {3.99, 4.0, 4.01, 11.99, 12.0, 12.01, 24.99, 25.0, 25.01}) xs.push_back(x);
    double worst = 0.0;
    for (double x : xs)
        for (int n = 0; n <= 5; ++n) {
            const cplx ref = reference_hankel(n, x);
            const cplx got = hankel1(n, x);
            // J and Y separately, relative to |H|
            const double err = std::max(std::abs(got.real() - ref.real()), std::abs(got.imag() - ref.imag())) /
                               std::abs(ref);
            worst = std::max(worst, err);
            EXPECT_LT(err, 1e-12) << "n=" << n << " x=" << x;
        }
    RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(Hankel, SequenceMatchesSingleOrder) {
    cplx seq[6];
    for (double x : {0.3, 7.5, 31.0}) {
        hankel1_seq(x, 5, seq);
        for (int n = 0; n <= 5; ++n) EXPECT_EQ(seq[n], hankel1(n, x));
    }
}

TEST(Hankel, Wronskian) {
    // J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x)
    for (double x : {0.05, 1.0, 13.0, 40.0, 90.0})
        for (int n = 0; n < 5; ++n) {
            const cplx a = hankel1(n, x), b = hankel1(n + 1, x);
            const double w = b.real() * a.imag() - a.real() * b.imag();
            EXPECT_NEAR(w * std::numbers::pi * x / 2.0, 1.0, 1e-12) << n << " " << x;
        }
}

TEST(Hankel, RejectsBadArguments) {
    EXPECT_THROW(hankel1(0, 0.0), std::domain_error);
    EXPECT_THROW(hankel1(0, -1.0), std::domain_error);
    EXPECT_THROW(hankel1(6, 1.0), std::domain_error);
    EXPECT_THROW(hankel1(-1, 1.0), std::domain_error);
}

TEST(ScalarGreen, ClosedForms) {
    const double k = 2.3;
    for (double r : {0.1, 1.0, 7.0}) {
        const cplx g2 = green_scalar(2, k, r);
        EXPECT_NEAR(std::abs(g2 - cplx(0.0, -0.25) * hankel1(0, k * r)), 0.0, 1e-15);
        const cplx g3 = green_scalar(3, k, r);
        const cplx ref = -std::exp(cplx(0.0, k * r)) / (4.0 * std::numbers::pi * r);
        EXPECT_NEAR(std::abs(g3 - ref), 0.0, 1e-14 * std::abs(ref));
    }
}

TEST(ScalarGreen, ImaginaryPartAtOrigin) {
    const double k = 1.7;
    EXPECT_NEAR(im_green_derivs(2, k, zero_point(2), 0).g, -0.25, 1e-15);
    EXPECT_NEAR(im_green_derivs(3, k, zero_point(3), 0).g, -k / (4.0 * std::numbers::pi), 1e-15);
}

class ScalarGreenDim : public ::testing::TestWithParam<int> {};

TEST_P(ScalarGreenDim, HelmholtzResidualByFiniteDifferences) {
    const int d = GetParam();
    const double k = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(11);
    const double h = 1e-3;
    for (int t = 0; t < 50; ++t) {
        const Point x = test::random_point(rng, d, 0.2, 6.0);
        const auto g = green_derivs(d, k, x, 2);
        cplx lap = 0.0;
        for (int i = 0; i < d; ++i)
            lap += (green_derivs(d, k, test::shifted(x, i, h), 0).g - 2.0 * g.g +
                    green_derivs(d, k, test::shifted(x, i, -h), 0).g) /
                   (h * h);
        EXPECT_LT(std::abs(lap + k * k * g.g), 1e-4 * k * k * std::abs(g.g));
        // the analytic Hessian trace gives the same Laplacian
        cplx tr = 0.0;
        for (int i = 0; i < d; ++i) tr += g.g2(i, i);
        EXPECT_LT(std::abs(tr + k * k * g.g), 1e-10 * k * k * std::abs(g.g));
    }
}

TEST_P(ScalarGreenDim, DerivativesMatchFiniteDifferences) {
    const int d = GetParam();
    const double k = 3.1;
    std::mt19937_64 rng(5);
    const double h = 1e-5;
    for (int t = 0; t < 30; ++t) {
        const Point x = test::random_point(rng, d, 0.3, 5.0);
        const auto g = green_derivs(d, k, x, 4);
        for (int i = 0; i < d; ++i) {
            const auto gp = green_derivs(d, k, test::shifted(x, i, h), 4);
            const auto gm = green_derivs(d, k, test::shifted(x, i, -h), 4);
            const double scale1 = std::sqrt(norm2(g.g1)) + std::abs(g.g);
            EXPECT_LT(std::abs((gp.g - gm.g) / (2 * h) - g.g1[i]), 1e-7 * scale1);
            for (int j = 0; j < d; ++j) {
                EXPECT_LT(std::abs((gp.g1[j] - gm.g1[j]) / (2 * h) - g.g2(i, j)), 1e-7 * fnorm(g.g2));
                for (int l = 0; l < d; ++l) {
                    EXPECT_LT(std::abs((gp.g2(j, l) - gm.g2(j, l)) / (2 * h) - g.g3(i, j, l)), 1e-7 * fnorm(g.g3));
                    for (int m = 0; m < d; ++m)
                        EXPECT_LT(std::abs((gp.g3(j, l, m) - gm.g3(j, l, m)) / (2 * h) - g.g4(i, j, l, m)),
                                  1e-7 * fnorm(g.g4));
                }
            }
        }
    }
}

TEST_P(ScalarGreenDim, ImaginaryDerivativesAreImagOfFull) {
    const int d = GetParam();
    const double k = 1.3;
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
        // spans both the series and the Bessel branches
        const Point x = test::random_point(rng, d, 0.01, 9.0);
        const auto f = green_derivs(d, k, x, 4);
        const auto g = im_green_derivs(d, k, x, 4);
        EXPECT_NEAR(g.g, f.g.imag(), 1e-13 * std::abs(f.g));
        EXPECT_LT(test::rel_diff(g.g2, imag_part(f.g2)), 1e-10);
        EXPECT_LT(test::rel_diff(g.g4, imag_part(f.g4)), 1e-9);
    }
}

TEST_P(ScalarGreenDim, ImaginaryDerivativesContinuousAtOrigin) {
    const int d = GetParam();
    const double k = 2.0;
    const auto g0 = im_green_derivs(d, k, zero_point(d), 4);
    Point x = zero_point(d);
    x[0] = 1e-6;
    const auto g1 = im_green_derivs(d, k, x, 4);
    EXPECT_NEAR(g0.g, g1.g, 1e-12);
    EXPECT_LT(fnorm(sub(g0.g2, g1.g2)), 1e-9);
    EXPECT_LT(fnorm(sub(g0.g4, g1.g4)), 1e-9);
    EXPECT_THROW(green_derivs(d, k, zero_point(d), 0), std::domain_error);
}

INSTANTIATE_TEST_SUITE_P(Dims, ScalarGreenDim, ::testing::Values(2, 3));
