#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "etd/elastic_moment.hpp"
#include "etd/kupradze.hpp"
#include "etd/tensor.hpp"

namespace etd {

// D = delta B + za, with density rho1 and elastic moment tensor emt (the
// zero tensor for a pure density contrast).
struct Inclusion {
    Point za = make_point(0.0, 0.0);
    double delta = 0.01;
    double volumeB = std::numbers::pi;
    double rho1 = 2.0;
    EMT4 emt = zero_emt(2);
};

struct TrialInclusion {
    double rho1p = 2.0;
    EMT4 emtp = zero_emt(2);
    double volumeBp = std::numbers::pi;
};

// Quadrature on the boundary of the disk / ball of radius R.
struct BoundaryGrid {
    int d = 2;
    double R = 0.0;
    std::vector<Point> points;
    std::vector<Point> normals;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

BoundaryGrid circle_boundary(double R, int N);
BoundaryGrid sphere_boundary(double R, int ntheta, int nphi);

struct PlaneWave {
    Mode mode = Mode::P;
    Point direction;
    Point polarization;
};

struct PlaneWaveValue {
    Vec<cplx> U;
    Mat<cplx> gradU;  // gradU_{ij} = d_i U_j
};

// 2D: angles 2 pi j / n. 3D: Fibonacci sphere.
std::vector<Point> uniform_directions(int n, int d);

// Unit vectors orthogonal to e: one in 2D (e rotated by +90 degrees), two
// in 3D from a fixed Gram-Schmidt rule.
std::vector<Point> shear_polarizations(const Point& e);

// One probe per direction for P; one per direction and polarization for S.
std::vector<PlaneWave> make_probes(Mode mode, const std::vector<Point>& directions);

PlaneWaveValue plane_wave_value(const PlaneWave& pw, const Medium& med, const Point& x);

struct PlaneSumCheck {
    Mat<cplx> lhs;
    Mat<double> rhs;
};

// lhs = (1/n) sum_j exp(i kappa x.e_j) pol_j (x) pol_j, summed over both
// shear polarizations in 3D; rhs is the Im Gamma_mode expression it tends to.
PlaneSumCheck planewave_sum_check(int n, Mode mode, const Medium& med, const Point& x);

// Constant multiplying Im Gamma_mode in the plane-wave direction sum:
// 4 mu0 (pi/k)^(d-2) (kS/k)^2.
double planesum_factor(const Medium& med, Mode mode, int d);

// Throws on dimension mismatch, za outside the disk/ball or closer than
// margin to its boundary, invalid sizes, or trial contrast of the wrong sign.
void validate_scene(const Medium& med, const Inclusion& inc, const TrialInclusion& trial, const BoundaryGrid& grid,
                    double margin);

// Non-fatal diagnostics (asymptotic validity of the small-inclusion model).
std::vector<std::string> scene_warnings(const Medium& med, const Inclusion& inc);

}  // namespace etd
