#include "etd/backprop.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "etd/parallel.hpp"

namespace etd {

namespace {

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

constexpr std::size_t kBlock = 64;

int kernel_slot(Kernel k) { return k == Kernel::Full ? 0 : (k == Kernel::P ? 1 : 2); }

// Weighted kernel matrices for one block of targets: for kernel kind s,
// gam[s][j*d+l](b, n) = w_n Gamma_jl(z_b - x_n) and
// grad[s][(i*d+j)*d+l](b, n) = w_n d_i Gamma_jl(z_b - x_n).
struct KernelBlock {
    int d = 2;
    std::size_t t0 = 0, t1 = 0;
    std::array<std::vector<CMatrix>, 3> gam;
    std::array<std::vector<CMatrix>, 3> grad;
    std::array<bool, 3> want{false, false, false};
    bool with_grad = false;
};

KernelBlock build_block(const BoundaryGrid& grid, const Medium& med, const SearchGrid& targets,
                        const std::vector<Kernel>& kernels, bool with_grad, std::size_t t0, std::size_t t1) {
    KernelBlock kb;
    const int d = grid.d;
    kb.d = d;
    kb.t0 = t0;
    kb.t1 = t1;
    kb.with_grad = with_grad;
    for (Kernel k : kernels) kb.want[kernel_slot(k)] = true;
    const Eigen::Index B = static_cast<Eigen::Index>(t1 - t0);
    const Eigen::Index N = static_cast<Eigen::Index>(grid.size());
    for (int s = 0; s < 3; ++s) {
        if (!kb.want[s]) continue;
        kb.gam[s].assign(d * d, CMatrix(B, N));
        if (with_grad) kb.grad[s].assign(d * d * d, CMatrix(B, N));
    }
    for (Eigen::Index b = 0; b < B; ++b) {
        const Point& z = targets.points[t0 + b];
        for (Eigen::Index n = 0; n < N; ++n) {
            const double wn = grid.weights[n];
            const ModalKernels mk = modal_kernels(med, z - grid.points[n], with_grad);
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l) {
                    const cplx p = wn * mk.gP(j, l), q = wn * mk.gS(j, l);
                    if (kb.want[0]) kb.gam[0][j * d + l](b, n) = p + q;
                    if (kb.want[1]) kb.gam[1][j * d + l](b, n) = p;
                    if (kb.want[2]) kb.gam[2][j * d + l](b, n) = q;
                }
            if (!with_grad) continue;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int l = 0; l < d; ++l) {
                        const int c = (i * d + j) * d + l;
                        const cplx p = wn * mk.dP(i, j, l), q = wn * mk.dS(i, j, l);
                        if (kb.want[0]) kb.grad[0][c](b, n) = p + q;
                        if (kb.want[1]) kb.grad[1][c](b, n) = p;
                        if (kb.want[2]) kb.grad[2][c](b, n) = q;
                    }
        }
    }
    return kb;
}

// conj(data) arranged as one N x P matrix per component.
std::vector<CMatrix> data_matrices(const std::vector<ComplexVecField>& data, std::size_t N, int d) {
    std::vector<CMatrix> D(d, CMatrix(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(data.size())));
    for (std::size_t p = 0; p < data.size(); ++p) {
        if (data[p].size() != N || data[p].d != d)
            throw std::invalid_argument("backpropagate: dataset does not match boundary grid");
        for (std::size_t n = 0; n < N; ++n)
            for (int l = 0; l < d; ++l) D[l](n, p) = std::conj(data[p].values[n][l]);
    }
    return D;
}

void apply_block(const KernelBlock& kb, const std::vector<CMatrix>& D, const std::vector<Kernel>& kernels,
                 std::vector<std::vector<BackField>>& out) {
    const int d = kb.d;
    const Eigen::Index B = static_cast<Eigen::Index>(kb.t1 - kb.t0);
    const Eigen::Index P = D[0].cols();
    CMatrix acc(B, P);
    for (std::size_t ki = 0; ki < kernels.size(); ++ki) {
        const int s = kernel_slot(kernels[ki]);
        auto& fields = out[ki];
        for (int j = 0; j < d; ++j) {
            acc.setZero();
            for (int l = 0; l < d; ++l) acc.noalias() += kb.gam[s][j * d + l] * D[l];
            for (Eigen::Index p = 0; p < P; ++p)
                for (Eigen::Index b = 0; b < B; ++b) fields[p].w[kb.t0 + b][j] = acc(b, p);
        }
        if (!kb.with_grad) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                acc.setZero();
                for (int l = 0; l < d; ++l) acc.noalias() += kb.grad[s][(i * d + j) * d + l] * D[l];
                for (Eigen::Index p = 0; p < P; ++p)
                    for (Eigen::Index b = 0; b < B; ++b) fields[p].gradw[kb.t0 + b](i, j) = acc(b, p);
            }
    }
}

std::vector<std::vector<BackField>> allocate(const std::vector<Kernel>& kernels, std::size_t ndata, std::size_t M,
                                             int d, bool with_grad) {
    std::vector<std::vector<BackField>> out(kernels.size());
    Vec<cplx> zv;
    zv.d = d;
    for (std::size_t ki = 0; ki < kernels.size(); ++ki) {
        out[ki].resize(ndata);
        for (auto& f : out[ki]) {
            f.mode = kernels[ki];
            f.d = d;
            f.w.assign(M, zv);
            if (with_grad) f.gradw.assign(M, zero_mat<cplx>(d));
        }
    }
    return out;
}

void check_inputs(const BoundaryGrid& grid, const SearchGrid& targets) {
    if (targets.d != grid.d) throw std::invalid_argument("backpropagate: target and boundary dimensions differ");
    if (grid.size() == 0) throw std::invalid_argument("backpropagate: empty boundary grid");
}

}  // namespace

const char* kernel_name(Kernel k) { return k == Kernel::Full ? "full" : (k == Kernel::P ? "P" : "S"); }

SearchGrid make_lattice(const Point& center, int count, double h) {
    if (count < 1 || !(h > 0.0)) throw std::invalid_argument("search lattice needs count >= 1 and spacing > 0");
    SearchGrid g;
    g.d = center.d;
    g.h = h;
    g.n = {count, count, g.d == 3 ? count : 1};
    const double half = 0.5 * (count - 1) * h;
    g.origin = center;
    for (int i = 0; i < g.d; ++i) g.origin[i] -= half;
    g.points.reserve(static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2]);
    for (int i0 = 0; i0 < g.n[0]; ++i0)
        for (int i1 = 0; i1 < g.n[1]; ++i1)
            for (int i2 = 0; i2 < g.n[2]; ++i2) {
                Point p = g.origin;
                p[0] += i0 * h;
                p[1] += i1 * h;
                if (g.d == 3) p[2] += i2 * h;
                g.points.push_back(p);
            }
    return g;
}

SearchGrid make_point_set(const std::vector<Point>& pts) {
    if (pts.empty()) throw std::invalid_argument("empty target set");
    SearchGrid g;
    g.d = pts.front().d;
    g.origin = zero_point(g.d);
    g.n = {static_cast<int>(pts.size()), 1, 1};
    g.points = pts;
    return g;
}

void validate_targets(const SearchGrid& targets, double R, double margin) {
    for (const auto& z : targets.points)
        if (norm(z) > R - margin)
            throw std::invalid_argument("search point closer than the boundary margin (" + std::to_string(margin) +
                                        ")");
}

BackField backpropagate(const ComplexVecField& data, const BoundaryGrid& grid, const Medium& med,
                        const SearchGrid& targets, Kernel mode, bool with_grad, int threads) {
    auto out = backpropagate_batch({data}, grid, med, targets, {mode}, with_grad, threads);
    return std::move(out[0][0]);
}

std::vector<std::vector<BackField>> backpropagate_batch(const std::vector<ComplexVecField>& data,
                                                        const BoundaryGrid& grid, const Medium& med,
                                                        const SearchGrid& targets,
                                                        const std::vector<Kernel>& kernels, bool with_grad,
                                                        int threads) {
    check_inputs(grid, targets);
    const int d = grid.d;
    const std::size_t M = targets.size();
    auto out = allocate(kernels, data.size(), M, d, with_grad);
    if (data.empty() || kernels.empty() || M == 0) return out;
    const auto D = data_matrices(data, grid.size(), d);
    const std::size_t nblocks = (M + kBlock - 1) / kBlock;
    parallel_for(nblocks, threads, [&](std::size_t bi) {
        const std::size_t t0 = bi * kBlock, t1 = std::min(M, t0 + kBlock);
        const KernelBlock kb = build_block(grid, med, targets, kernels, with_grad, t0, t1);
        apply_block(kb, D, kernels, out);
    });
    return out;
}

struct BackpropOperator::Impl {
    std::vector<KernelBlock> blocks;
    std::size_t N = 0;
    std::size_t M = 0;
    int d = 2;
    bool with_grad = false;
};

BackpropOperator::BackpropOperator(const BoundaryGrid& grid, const Medium& med, const SearchGrid& targets,
                                   std::vector<Kernel> kernels, bool with_grad)
    : impl_(std::make_unique<Impl>()), kernels_(std::move(kernels)) {
    check_inputs(grid, targets);
    impl_->N = grid.size();
    impl_->M = targets.size();
    impl_->d = grid.d;
    impl_->with_grad = with_grad;
    for (std::size_t t0 = 0; t0 < impl_->M; t0 += kBlock)
        impl_->blocks.push_back(
            build_block(grid, med, targets, kernels_, with_grad, t0, std::min(impl_->M, t0 + kBlock)));
}

BackpropOperator::~BackpropOperator() = default;
BackpropOperator::BackpropOperator(BackpropOperator&&) noexcept = default;
BackpropOperator& BackpropOperator::operator=(BackpropOperator&&) noexcept = default;

std::vector<std::vector<BackField>> BackpropOperator::apply(const std::vector<ComplexVecField>& data) const {
    auto out = allocate(kernels_, data.size(), impl_->M, impl_->d, impl_->with_grad);
    if (data.empty()) return out;
    const auto D = data_matrices(data, impl_->N, impl_->d);
    for (const auto& kb : impl_->blocks) apply_block(kb, D, kernels_, out);
    return out;
}

HKResult hk_integral(const Medium& med, Mode a, Mode b, const BoundaryGrid& grid, const Point& za, const Point& zs) {
    const int d = grid.d;
    HKResult r;
    r.numeric = zero_mat<cplx>(d);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Mat<cplx> ga = gamma_alpha(med, a, grid.points[n] - za);
        const Mat<cplx> gb = gamma_alpha(med, b, grid.points[n] - zs);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                cplx s = 0.0;
                for (int k = 0; k < d; ++k) s += std::conj(ga(i, k)) * gb(k, j);
                r.numeric(i, j) += grid.weights[n] * s;
            }
    }
    if (a == b)
        r.predicted = scale(im_gamma_alpha(med, a, zs - za), -1.0 / (med.c(a) * med.omega));
    else
        r.predicted = zero_mat<double>(d);
    return r;
}

BackField medium_speckle(const VolumeField& gamma, const PlaneWave& probe, const Medium& med, Mode mode,
                         const SearchGrid& targets, bool with_grad) {
    const int d = targets.d;
    if (gamma.d != d) throw std::invalid_argument("medium_speckle: dimension mismatch");
    BackField f;
    f.mode = mode == Mode::P ? Kernel::P : Kernel::S;
    f.d = d;
    Vec<cplx> zv;
    zv.d = d;
    f.w.assign(targets.size(), zv);
    if (with_grad) f.gradw.assign(targets.size(), zero_mat<cplx>(d));
    const double pre = -med.rho0 * med.omega / med.c(mode);
    // conj(U)(y_c) scaled by the cell weight and fluctuation
    std::vector<Vec<cplx>> src(gamma.size());
    for (std::size_t c = 0; c < gamma.size(); ++c) {
        const auto pw = plane_wave_value(probe, med, gamma.cells[c]);
        src[c].d = d;
        for (int j = 0; j < d; ++j) src[c][j] = pre * gamma.vol[c] * gamma.value[c] * std::conj(pw.U[j]);
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const Point& z = targets.points[t];
        for (std::size_t c = 0; c < gamma.size(); ++c) {
            if (gamma.value[c] == 0.0) continue;
            const auto g = im_green_derivs(d, med.kappa(mode), z - gamma.cells[c], with_grad ? 3 : 2);
            const Mat<double> G = modal_gamma(med, mode, g);
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l) f.w[t][j] += G(j, l) * src[c][l];
            if (!with_grad) continue;
            const Ten3<double> dG = modal_grad(med, mode, g);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int l = 0; l < d; ++l) f.gradw[t](i, j) += dG(i, j, l) * src[c][l];
        }
    }
    return f;
}

}  // namespace etd
