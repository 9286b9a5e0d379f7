#pragma once

#include "etd/tensor.hpp"

namespace etd {

struct IsoEMT {
    double a = 1.0;
    double b = 1.0;
};

// Elastic moment tensor m_{ijpq}, stored like Ten4.
struct EMT4 {
    Ten4<double> m;

    int dim() const { return m.d; }
    double operator()(int i, int j, int p, int q) const { return m(i, j, p, q); }
    bool is_zero() const;
};

EMT4 zero_emt(int d);

// m_{ijkl} = (a/2)(d_ik d_jl + d_il d_jk) + b d_ij d_kl
EMT4 emt_from_iso(const IsoEMT& iso, int d);

// Largest violation of m_{ijpq} = m_{pqij} = m_{jipq} = m_{ijqp}.
double emt_symmetry_defect(const EMT4& M);

// (M A)_{ij} = sum_pq m_{ijpq} A_{pq}
template <class T>
Mat<T> emt_apply(const EMT4& M, const Mat<T>& A) {
    Mat<T> r;
    const int d = M.dim();
    r.d = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            T s{};
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) s += M(i, j, p, q) * A(p, q);
            r(i, j) = s;
        }
    return r;
}

// (M A)_{ijkl} = sum_pq m_{ijpq} A_{pqkl}, acting on the first index pair.
template <class T>
Ten4<T> emt_apply(const EMT4& M, const Ten4<T>& A) {
    Ten4<T> r;
    const int d = M.dim();
    r.d = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    T s{};
                    for (int p = 0; p < d; ++p)
                        for (int q = 0; q < d; ++q) s += M(i, j, p, q) * A(p, q, k, l);
                    r(i, j, k, l) = s;
                }
    return r;
}

// sum_ij A_ij (M B)_ij
template <class T>
T emt_form(const EMT4& M, const Mat<T>& A, const Mat<T>& B) {
    return contract(A, emt_apply(M, B));
}

}  // namespace etd
