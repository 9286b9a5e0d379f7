#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace etd {

using cplx = std::complex<double>;

// Fixed-capacity tensors over a runtime dimension d in {2, 3}.
// Storage is always 3-wide per index; entries beyond d stay zero.

template <class T>
struct Vec {
    int d = 2;
    std::array<T, 3> a{};

    T& operator[](int i) { return a[i]; }
    const T& operator[](int i) const { return a[i]; }
};

template <class T>
struct Mat {
    int d = 2;
    std::array<T, 9> a{};

    T& operator()(int i, int j) { return a[3 * i + j]; }
    const T& operator()(int i, int j) const { return a[3 * i + j]; }
};

template <class T>
struct Ten3 {
    int d = 2;
    std::array<T, 27> a{};

    T& operator()(int i, int j, int k) { return a[9 * i + 3 * j + k]; }
    const T& operator()(int i, int j, int k) const { return a[9 * i + 3 * j + k]; }
};

template <class T>
struct Ten4 {
    int d = 2;
    std::array<T, 81> a{};

    T& operator()(int i, int j, int k, int l) { return a[27 * i + 9 * j + 3 * k + l]; }
    const T& operator()(int i, int j, int k, int l) const { return a[27 * i + 9 * j + 3 * k + l]; }
};

using Point = Vec<double>;

inline void check_dim(int d) {
    if (d != 2 && d != 3) throw std::invalid_argument("dimension must be 2 or 3");
}

inline Point make_point(double x, double y) {
    Point p;
    p.d = 2;
    p.a = {x, y, 0.0};
    return p;
}

inline Point make_point(double x, double y, double z) {
    Point p;
    p.d = 3;
    p.a = {x, y, z};
    return p;
}

inline Point zero_point(int d) {
    Point p;
    p.d = d;
    return p;
}

inline Point operator+(const Point& x, const Point& y) {
    Point r = x;
    for (int i = 0; i < 3; ++i) r.a[i] += y.a[i];
    return r;
}

inline Point operator-(const Point& x, const Point& y) {
    Point r = x;
    for (int i = 0; i < 3; ++i) r.a[i] -= y.a[i];
    return r;
}

inline Point operator-(const Point& x) {
    Point r = x;
    for (int i = 0; i < 3; ++i) r.a[i] = -r.a[i];
    return r;
}

inline Point operator*(double s, const Point& x) {
    Point r = x;
    for (int i = 0; i < 3; ++i) r.a[i] *= s;
    return r;
}

inline double dot(const Point& x, const Point& y) {
    return x.a[0] * y.a[0] + x.a[1] * y.a[1] + x.a[2] * y.a[2];
}

inline double norm(const Point& x) { return std::sqrt(dot(x, x)); }

template <class T>
Mat<T> zero_mat(int d) {
    Mat<T> m;
    m.d = d;
    return m;
}

template <class T>
Mat<T> identity(int d) {
    Mat<T> m;
    m.d = d;
    for (int i = 0; i < d; ++i) m(i, i) = T(1);
    return m;
}

template <class T>
Mat<T> transpose(const Mat<T>& m) {
    Mat<T> r;
    r.d = m.d;
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) r(i, j) = m(j, i);
    return r;
}

template <class T>
T trace(const Mat<T>& m) {
    T s{};
    for (int i = 0; i < m.d; ++i) s += m(i, i);
    return s;
}

// Elementwise helpers shared by all tensor ranks.

template <template <class> class Tn>
Tn<double> real_part(const Tn<cplx>& t) {
    Tn<double> r;
    r.d = t.d;
    for (std::size_t i = 0; i < t.a.size(); ++i) r.a[i] = t.a[i].real();
    return r;
}

template <template <class> class Tn>
Tn<double> imag_part(const Tn<cplx>& t) {
    Tn<double> r;
    r.d = t.d;
    for (std::size_t i = 0; i < t.a.size(); ++i) r.a[i] = t.a[i].imag();
    return r;
}

// Sum of |entry|^2 over all entries (Frobenius norm squared).
template <class Tn>
double norm2(const Tn& t) {
    double s = 0.0;
    for (const auto& v : t.a) s += std::norm(v);
    return s;
}

template <class Tn>
double fnorm(const Tn& t) {
    return std::sqrt(norm2(t));
}

// Full contraction sum_I A_I B_I without conjugation.
template <class Tn>
auto contract(const Tn& x, const Tn& y) {
    typename decltype(x.a)::value_type s{};
    for (std::size_t i = 0; i < x.a.size(); ++i) s += x.a[i] * y.a[i];
    return s;
}

template <class Tn>
Tn add(const Tn& x, const Tn& y) {
    Tn r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

template <class Tn>
Tn sub(const Tn& x, const Tn& y) {
    Tn r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

template <class Tn, class S>
Tn scale(const Tn& x, S s) {
    Tn r = x;
    for (auto& v : r.a) v *= s;
    return r;
}

// Transpose of a 4-tensor swapping index pairs: (A^T)_{ijkl} = A_{klij}.
template <class T>
Ten4<T> pair_transpose(const Ten4<T>& A) {
    Ten4<T> r;
    r.d = A.d;
    const int d = A.d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) r(i, j, k, l) = A(k, l, i, j);
    return r;
}

}  // namespace etd
