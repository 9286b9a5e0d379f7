#include "etd/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace etd {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

Point normalized(const Point& p) { return (1.0 / norm(p)) * p; }

}  // namespace

BoundaryGrid circle_boundary(double R, int N) {
    if (!(R > 0.0)) throw std::invalid_argument("boundary.R must be positive");
    if (N < 8) throw std::invalid_argument("boundary.N must be at least 8");
    BoundaryGrid g;
    g.d = 2;
    g.R = R;
    g.points.reserve(N);
    for (int k = 0; k < N; ++k) {
        const double t = 2.0 * kPi * k / N;
        const Point n = make_point(std::cos(t), std::sin(t));
        g.normals.push_back(n);
        g.points.push_back(R * n);
        g.weights.push_back(2.0 * kPi * R / N);
    }
    return g;
}

BoundaryGrid sphere_boundary(double R, int ntheta, int nphi) {
    if (!(R > 0.0)) throw std::invalid_argument("boundary.R must be positive");
    if (ntheta < 2 || nphi < 8) throw std::invalid_argument("sphere boundary needs ntheta >= 2 and nphi >= 8");
    std::vector<double> ct, wt;
    gauss_legendre(ntheta, ct, wt);
    BoundaryGrid g;
    g.d = 3;
    g.R = R;
    for (int i = 0; i < ntheta; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - ct[i] * ct[i]));
        for (int j = 0; j < nphi; ++j) {
            const double ph = 2.0 * kPi * j / nphi;
            const Point n = make_point(st * std::cos(ph), st * std::sin(ph), ct[i]);
            g.normals.push_back(n);
            g.points.push_back(R * n);
            g.weights.push_back(R * R * wt[i] * 2.0 * kPi / nphi);
        }
    }
    return g;
}

std::vector<Point> uniform_directions(int n, int d) {
    check_dim(d);
    if (n < 1) throw std::invalid_argument("number of directions must be positive");
    std::vector<Point> dirs;
    dirs.reserve(n);
    if (d == 2) {
        for (int j = 0; j < n; ++j) {
            const double t = 2.0 * kPi * j / n;
            dirs.push_back(make_point(std::cos(t), std::sin(t)));
        }
    } else {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < n; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double ph = golden * j;
            dirs.push_back(make_point(r * std::cos(ph), r * std::sin(ph), z));
        }
    }
    return dirs;
}

std::vector<Point> shear_polarizations(const Point& e) {
    if (e.d == 2) return {make_point(-e[1], e[0])};
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(e[i]) < std::abs(e[axis])) axis = i;
    Point a = zero_point(3);
    a[axis] = 1.0;
    const Point p1 = normalized(a - dot(a, e) * e);
    const Point p2 = make_point(e[1] * p1[2] - e[2] * p1[1], e[2] * p1[0] - e[0] * p1[2], e[0] * p1[1] - e[1] * p1[0]);
    return {p1, p2};
}

std::vector<PlaneWave> make_probes(Mode mode, const std::vector<Point>& directions) {
    std::vector<PlaneWave> probes;
    for (const auto& e : directions) {
        if (mode == Mode::P) {
            probes.push_back({Mode::P, e, e});
        } else {
            for (const auto& p : shear_polarizations(e)) probes.push_back({Mode::S, e, p});
        }
    }
    return probes;
}

PlaneWaveValue plane_wave_value(const PlaneWave& pw, const Medium& med, const Point& x) {
    const int d = x.d;
    const double k = med.kappa(pw.mode);
    const double ph = k * dot(x, pw.direction);
    const cplx e(std::cos(ph), std::sin(ph));
    PlaneWaveValue v;
    v.U.d = d;
    v.gradU.d = d;
    for (int j = 0; j < d; ++j) v.U[j] = e * pw.polarization[j];
    const cplx ik(0.0, k);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v.gradU(i, j) = ik * pw.direction[i] * v.U[j];
    return v;
}

double planesum_factor(const Medium& med, Mode mode, int d) {
    const double k = med.kappa(mode);
    const double ratio = med.kappaS() / k;
    return 4.0 * med.mu0 * std::pow(kPi / k, d - 2) * ratio * ratio;
}

PlaneSumCheck planewave_sum_check(int n, Mode mode, const Medium& med, const Point& x) {
    if (n < 16) throw std::invalid_argument("planewave_sum_check needs n >= 16");
    const int d = x.d;
    const auto probes = make_probes(mode, uniform_directions(n, d));
    PlaneSumCheck out;
    out.lhs = zero_mat<cplx>(d);
    const double k = med.kappa(mode);
    for (const auto& pw : probes) {
        const double ph = k * dot(x, pw.direction);
        const cplx e(std::cos(ph), std::sin(ph));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) out.lhs(i, j) += e * pw.polarization[i] * pw.polarization[j];
    }
    out.lhs = scale(out.lhs, 1.0 / n);
    out.rhs = scale(im_gamma_alpha(med, mode, x), -planesum_factor(med, mode, d));
    return out;
}

void validate_scene(const Medium& med, const Inclusion& inc, const TrialInclusion& trial, const BoundaryGrid& grid,
                    double margin) {
    med.validate(grid.d);
    if (inc.za.d != grid.d) throw std::invalid_argument("inclusion.za dimension does not match boundary");
    if (inc.emt.dim() != grid.d || trial.emtp.dim() != grid.d)
        throw std::invalid_argument("EMT dimension does not match boundary");
    if (!(inc.delta > 0.0)) throw std::invalid_argument("inclusion.delta must be positive");
    if (!(inc.rho1 > 0.0)) throw std::invalid_argument("inclusion.rho1 must be positive");
    if (!(inc.volumeB >= 0.0) || !(trial.volumeBp >= 0.0)) throw std::invalid_argument("volumes must be non-negative");
    const double r = norm(inc.za);
    if (r >= grid.R) throw std::invalid_argument("inclusion.za lies outside the domain");
    if (grid.R - r < margin) throw std::invalid_argument("inclusion.za is closer than the margin to the boundary");
    if ((med.rho0 - trial.rho1p) * (med.rho0 - inc.rho1) < 0.0)
        throw std::invalid_argument("trial.rho1 must lie on the same side of rho0 as inclusion.rho1");
}

std::vector<std::string> scene_warnings(const Medium& med, const Inclusion& inc) {
    std::vector<std::string> w;
    if (inc.delta * med.kappaS() > 0.2)
        w.push_back("delta * kappaS = " + std::to_string(inc.delta * med.kappaS()) +
                    " exceeds 0.2; leading-order data may be inaccurate");
    if (med.rho0 != 1.0)
        w.push_back("rho0 = " + std::to_string(med.rho0) +
                    " differs from 1; closed-form predictions assume unit reference density");
    return w;
}

}  // namespace etd
