#include "etd/elastic_moment.hpp"

#include <algorithm>
#include <cmath>

namespace etd {

bool EMT4::is_zero() const {
    return std::all_of(m.a.begin(), m.a.end(), [](double v) { return v == 0.0; });
}

EMT4 zero_emt(int d) {
    check_dim(d);
    EMT4 M;
    M.m.d = d;
    return M;
}

EMT4 emt_from_iso(const IsoEMT& iso, int d) {
    EMT4 M = zero_emt(d);
    auto dl = [](int p, int q) { return p == q ? 1.0 : 0.0; };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    M.m(i, j, k, l) = 0.5 * iso.a * (dl(i, k) * dl(j, l) + dl(i, l) * dl(j, k)) +
                                      iso.b * dl(i, j) * dl(k, l);
    return M;
}

double emt_symmetry_defect(const EMT4& M) {
    const int d = M.dim();
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    const double v = M(i, j, p, q);
                    worst = std::max({worst, std::abs(v - M(p, q, i, j)), std::abs(v - M(j, i, p, q)),
                                      std::abs(v - M(i, j, q, p))});
                }
    return worst;
}

}  // namespace etd
