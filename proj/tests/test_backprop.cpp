#include <gtest/gtest.h>

#include <random>

#include "etd/backprop.hpp"
#include "support.hpp"

using namespace etd;

namespace {

ComplexVecField random_field(std::mt19937_64& rng, int d, std::size_t n) {
    std::normal_distribution<double> g;
    ComplexVecField f = zero_field(d, n);
    for (auto& v : f.values)
        for (int k = 0; k < d; ++k) v[k] = cplx(g(rng), g(rng));
    return f;
}

Mat<cplx> kernel_of(const Medium& med, Kernel k, const Point& x) {
    if (k == Kernel::Full) return gamma_full(med, x);
    return gamma_alpha(med, k == Kernel::P ? Mode::P : Mode::S, x);
}

// Direct sum w_j(z) = sum_n w_n Gamma_jl(z - x_n) conj(f_l(x_n)).
Vec<cplx> direct_w(const Medium& med, Kernel k, const BoundaryGrid& grid, const ComplexVecField& f, const Point& z) {
    Vec<cplx> w;
    w.d = grid.d;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto G = kernel_of(med, k, z - grid.points[n]);
        for (int j = 0; j < grid.d; ++j)
            for (int l = 0; l < grid.d; ++l) w[j] += grid.weights[n] * G(j, l) * std::conj(f.values[n][l]);
    }
    return w;
}

// |a - b| / |b|
double vec_rel(const Vec<cplx>& a, const Vec<cplx>& b) {
    double e = 0.0, mag = 0.0;
    for (int j = 0; j < a.d; ++j) {
        e += std::norm(a[j] - b[j]);
        mag += std::norm(b[j]);
    }
    return std::sqrt(e / mag);
}

}  // namespace

TEST(Backprop, MatchesDirectSumAndFiniteDifferenceGradient) {
    const Medium med;
    std::mt19937_64 rng(1);
    for (int d : {2, 3}) {
        const auto grid = d == 2 ? circle_boundary(10.0, 48) : sphere_boundary(10.0, 5, 10);
        const auto data = random_field(rng, d, grid.size());
        std::vector<Point> pts;
        for (int t = 0; t < 5; ++t) pts.push_back(test::random_point(rng, d, 0.0, 4.0));
        const auto targets = make_point_set(pts);
        for (Kernel k : {Kernel::Full, Kernel::P, Kernel::S}) {
            const auto f = backpropagate(data, grid, med, targets, k, true);
            ASSERT_TRUE(f.has_grad());
            for (std::size_t t = 0; t < pts.size(); ++t) {
                EXPECT_LT(vec_rel(f.w[t], direct_w(med, k, grid, data, pts[t])), 1e-11);
                const double h = 1e-5;
                for (int i = 0; i < d; ++i) {
                    const auto wp = direct_w(med, k, grid, data, test::shifted(pts[t], i, h));
                    const auto wm = direct_w(med, k, grid, data, test::shifted(pts[t], i, -h));
                    for (int j = 0; j < d; ++j)
                        EXPECT_LT(std::abs((wp[j] - wm[j]) / (2 * h) - f.gradw[t](i, j)), 1e-6 * fnorm(f.gradw[t]));
                }
            }
        }
    }
}

TEST(Backprop, BatchModesAndThreadsAgree) {
    const Medium med;
    std::mt19937_64 rng(2);
    const auto grid = circle_boundary(10.0, 64);
    std::vector<ComplexVecField> data;
    for (int p = 0; p < 5; ++p) data.push_back(random_field(rng, 2, grid.size()));
    const auto targets = make_lattice(make_point(0.1, 0.2), 11, 0.3);  // 121 targets, two blocks
    const auto one = backpropagate_batch(data, grid, med, targets, {Kernel::Full, Kernel::P, Kernel::S}, true, 1);
    const auto three = backpropagate_batch(data, grid, med, targets, {Kernel::Full, Kernel::P, Kernel::S}, true, 3);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t p = 0; p < data.size(); ++p)
            for (std::size_t t = 0; t < targets.size(); ++t) {
                for (int j = 0; j < 2; ++j) EXPECT_EQ(one[k][p].w[t][j], three[k][p].w[t][j]);
                EXPECT_EQ(one[k][p].gradw[t].a, three[k][p].gradw[t].a);
            }
    // Full = P + S
    for (std::size_t p = 0; p < data.size(); ++p)
        for (std::size_t t = 0; t < targets.size(); ++t) {
            Vec<cplx> s = one[1][p].w[t];
            for (int j = 0; j < 2; ++j) s[j] += one[2][p].w[t][j];
            EXPECT_LT(vec_rel(s, one[0][p].w[t]), 1e-12);
        }
    // the precomputed operator reproduces the batch result
    const BackpropOperator op(grid, med, targets, {Kernel::P}, false);
    const auto viaop = op.apply(data);
    for (std::size_t p = 0; p < data.size(); ++p)
        for (std::size_t t = 0; t < targets.size(); ++t) {
            EXPECT_LT(vec_rel(viaop[0][p].w[t], one[1][p].w[t]), 1e-13);
        }
    EXPECT_FALSE(viaop[0][0].has_grad());
}

TEST(Backprop, InputValidation) {
    const Medium med;
    const auto grid = circle_boundary(10.0, 32);
    const auto t3 = make_point_set({make_point(0.0, 0.0, 0.0)});
    EXPECT_THROW(backpropagate(zero_field(2, 32), grid, med, t3, Kernel::Full), std::invalid_argument);
    const auto t2 = make_point_set({make_point(0.0, 0.0)});
    EXPECT_THROW(backpropagate(zero_field(2, 31), grid, med, t2, Kernel::Full), std::invalid_argument);
    EXPECT_THROW(validate_targets(make_point_set({make_point(8.5, 0.0)}), 10.0, 2.0), std::invalid_argument);
    EXPECT_NO_THROW(validate_targets(make_point_set({make_point(7.5, 0.0)}), 10.0, 2.0));
    EXPECT_THROW(make_lattice(make_point(0.0, 0.0), 0, 0.1), std::invalid_argument);
}

TEST(Backprop, LatticeLayout) {
    const auto g = make_lattice(make_point(1.0, -1.0), 5, 0.5);
    EXPECT_EQ(g.size(), 25u);
    EXPECT_NEAR(g.points[g.index(2, 2)][0], 1.0, 1e-15);
    EXPECT_NEAR(g.points[g.index(2, 2)][1], -1.0, 1e-15);
    EXPECT_NEAR(g.points[g.index(4, 0)][0], 2.0, 1e-15);
    EXPECT_NEAR(g.points[g.index(4, 0)][1], -2.0, 1e-15);
}

// Helmholtz-Kirchhoff: cross-mode normalised by the geometric mean of the
// two same-mode values at zero separation.
TEST(HelmholtzKirchhoff, SameModeAndCrossMode2D) {
    const Medium med;
    const double R = 10.0 * med.wavelength(Mode::S);
    const auto grid = circle_boundary(R, 512);
    std::mt19937_64 rng(3);
    const Point za = make_point(0.4, -0.25);
    const double pp0 = fnorm(hk_integral(med, Mode::P, Mode::P, grid, za, za).predicted);
    const double ss0 = fnorm(hk_integral(med, Mode::S, Mode::S, grid, za, za).predicted);
    for (Mode m : {Mode::P, Mode::S}) {
        const double lam = med.wavelength(m);
        for (int t = 0; t < 10; ++t) {
            const Point zs = za + test::random_point(rng, 2, 0.0, 2.0 * lam);
            const auto r = hk_integral(med, m, m, grid, za, zs);
            Mat<cplx> pred = zero_mat<cplx>(2);
            for (int k = 0; k < 9; ++k) pred.a[k] = r.predicted.a[k];
            const double ref = m == Mode::P ? pp0 : ss0;
            EXPECT_LT(fnorm(sub(r.numeric, pred)), 0.10 * ref);
        }
    }
    for (int t = 0; t < 10; ++t) {
        const Point zs = za + test::random_point(rng, 2, 0.0, 2.0);
        const auto r = hk_integral(med, Mode::P, Mode::S, grid, za, zs);
        EXPECT_LT(fnorm(r.numeric), 0.10 * std::sqrt(pp0 * ss0));
        EXPECT_EQ(fnorm(r.predicted), 0.0);
    }
}

TEST(MediumSpeckle, MatchesDirectSum) {
    const Medium med;
    VolumeField gamma;
    gamma.d = 2;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int c = 0; c < 30; ++c) {
        gamma.cells.push_back(test::random_point(rng, 2, 0.0, 3.0));
        gamma.vol.push_back(0.01);
        gamma.value.push_back(g(rng));
    }
    const auto probe = make_probes(Mode::S, uniform_directions(4, 2))[1];
    const auto targets = make_point_set({make_point(0.3, 0.1), make_point(-1.0, 0.5)});
    const auto f = medium_speckle(gamma, probe, med, Mode::S, targets, true);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        Vec<cplx> ref;
        ref.d = 2;
        for (std::size_t c = 0; c < gamma.size(); ++c) {
            const auto G = im_gamma_alpha(med, Mode::S, targets.points[t] - gamma.cells[c]);
            const auto U = plane_wave_value(probe, med, gamma.cells[c]);
            for (int j = 0; j < 2; ++j)
                for (int l = 0; l < 2; ++l)
                    ref[j] += -med.rho0 * med.omega / med.cS() * gamma.vol[c] * gamma.value[c] * G(j, l) *
                              std::conj(U.U[l]);
        }
        EXPECT_LT(vec_rel(f.w[t], ref), 1e-12);
    }
}
