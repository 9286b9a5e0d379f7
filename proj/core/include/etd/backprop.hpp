#pragma once

#include <array>
#include <memory>
#include <vector>

#include "etd/forward.hpp"
#include "etd/scene.hpp"

namespace etd {

// Search points z^S. A regular lattice carries its shape; a plain point set
// has shape {size, 1, 1} and no spacing.
struct SearchGrid {
    int d = 2;
    Point origin;
    double h = 0.0;
    std::array<int, 3> n{0, 1, 1};
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
    bool is_lattice() const { return h > 0.0; }
    // Flat index of lattice node (i0, i1, i2); i0 varies slowest.
    std::size_t index(int i0, int i1, int i2 = 0) const {
        return (static_cast<std::size_t>(i0) * n[1] + i1) * n[2] + i2;
    }
};

// Lattice centred at `center` with `count` nodes per axis and spacing h.
SearchGrid make_lattice(const Point& center, int count, double h);
SearchGrid make_point_set(const std::vector<Point>& pts);

// Throws if any target is closer than margin to the boundary of the
// radius-R domain.
void validate_targets(const SearchGrid& targets, double R, double margin);

enum class Kernel { Full, P, S };

const char* kernel_name(Kernel k);

struct BackField {
    Kernel mode = Kernel::Full;
    int d = 2;
    std::vector<Vec<cplx>> w;
    std::vector<Mat<cplx>> gradw;  // gradw_{ij} = d_i w_j; empty if not requested

    std::size_t size() const { return w.size(); }
    bool has_grad() const { return !gradw.empty(); }
};

// w(z) = sum_k w_k Gamma_mode(z - x_k) conj(data_k), and its gradient.
BackField backpropagate(const ComplexVecField& data, const BoundaryGrid& grid, const Medium& med,
                        const SearchGrid& targets, Kernel mode, bool with_grad = true, int threads = 1);

// Backpropagation of many datasets sharing grid and targets. Kernels are
// evaluated once per (target, node) pair and applied to all datasets by
// blocked matrix products. out[kernel index][dataset index].
std::vector<std::vector<BackField>> backpropagate_batch(const std::vector<ComplexVecField>& data,
                                                        const BoundaryGrid& grid, const Medium& med,
                                                        const SearchGrid& targets,
                                                        const std::vector<Kernel>& kernels, bool with_grad,
                                                        int threads = 1);

// Precomputed weighted kernels for a small target set, reused across many
// datasets (Monte Carlo ensembles).
class BackpropOperator {
public:
    BackpropOperator(const BoundaryGrid& grid, const Medium& med, const SearchGrid& targets,
                     std::vector<Kernel> kernels, bool with_grad);
    ~BackpropOperator();
    BackpropOperator(BackpropOperator&&) noexcept;
    BackpropOperator& operator=(BackpropOperator&&) noexcept;

    std::vector<std::vector<BackField>> apply(const std::vector<ComplexVecField>& data) const;
    const std::vector<Kernel>& kernels() const { return kernels_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::vector<Kernel> kernels_;
};

struct HKResult {
    Mat<cplx> numeric;
    Mat<double> predicted;
};

// Boundary quadrature of conj(Gamma_a)(x - za) Gamma_b(x - zs) against its
// asymptotic value -(1/(c_a w)) Im Gamma_a(zs - za) for a = b, 0 otherwise.
HKResult hk_integral(const Medium& med, Mode a, Mode b, const BoundaryGrid& grid, const Point& za, const Point& zs);

// Scalar field sampled on volume cells.
struct VolumeField {
    int d = 2;
    std::vector<Point> cells;
    std::vector<double> vol;
    std::vector<double> value;

    std::size_t size() const { return cells.size(); }
};

// w(z) = -(rho0 w / c_mode) sum_c vol_c gamma_c Im Gamma_mode(z - y_c) conj(U)(y_c)
BackField medium_speckle(const VolumeField& gamma, const PlaneWave& probe, const Medium& med, Mode mode,
                         const SearchGrid& targets, bool with_grad = false);

}  // namespace etd
