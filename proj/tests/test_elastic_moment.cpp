#include <gtest/gtest.h>

#include <random>

#include "etd/elastic_moment.hpp"

using namespace etd;

namespace {

Mat<double> random_mat(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> n;
    Mat<double> A = zero_mat<double>(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = n(rng);
    return A;
}

}  // namespace

class EmtDim : public ::testing::TestWithParam<int> {};

TEST_P(EmtDim, IsotropicTensorHasFullSymmetry) {
    const int d = GetParam();
    EXPECT_EQ(emt_symmetry_defect(emt_from_iso({1.3, -0.4}, d)), 0.0);
    EXPECT_TRUE(zero_emt(d).is_zero());
    EXPECT_FALSE(emt_from_iso({1.0, 0.0}, d).is_zero());
    EXPECT_TRUE(emt_from_iso({0.0, 0.0}, d).is_zero());
}

TEST_P(EmtDim, ActionOnMatrices) {
    // M A = a sym(A) + b tr(A) I
    const int d = GetParam();
    const double a = 1.7, b = 0.6;
    const EMT4 M = emt_from_iso({a, b}, d);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto A = random_mat(rng, d);
        const auto MA = emt_apply(M, A);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double ref = 0.5 * a * (A(i, j) + A(j, i)) + (i == j ? b * trace(A) : 0.0);
                EXPECT_NEAR(MA(i, j), ref, 1e-14);
            }
        const auto B = random_mat(rng, d);
        // the bilinear form is symmetric
        EXPECT_NEAR(emt_form(M, A, B), emt_form(M, B, A), 1e-13);
    }
}

TEST_P(EmtDim, FourthOrderActionMatchesMatrixAction) {
    const int d = GetParam();
    const EMT4 M = emt_from_iso({0.8, 1.1}, d);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    Ten4<double> T;
    T.d = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) T(i, j, k, l) = n(rng);
    const auto MT = emt_apply(M, T);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            Mat<double> slice = zero_mat<double>(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) slice(i, j) = T(i, j, k, l);
            const auto Ms = emt_apply(M, slice);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) EXPECT_NEAR(MT(i, j, k, l), Ms(i, j), 1e-14);
        }
}

TEST_P(EmtDim, ComplexAction) {
    const int d = GetParam();
    const EMT4 M = emt_from_iso({2.0, 0.5}, d);
    Mat<cplx> A = zero_mat<cplx>(d);
    A(0, 1) = cplx(0.0, 2.0);
    const auto MA = emt_apply(M, A);
    EXPECT_NEAR(std::abs(MA(0, 1) - cplx(0.0, 2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(MA(1, 0) - cplx(0.0, 2.0)), 0.0, 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Dims, EmtDim, ::testing::Values(2, 3));

TEST(Emt, DetectsBrokenSymmetry) {
    EMT4 M = emt_from_iso({1.0, 1.0}, 2);
    M.m(0, 1, 0, 0) += 0.25;
    EXPECT_NEAR(emt_symmetry_defect(M), 0.25, 1e-15);
    EXPECT_THROW(zero_emt(4), std::invalid_argument);
}
