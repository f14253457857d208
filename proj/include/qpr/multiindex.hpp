#ifndef QPR_MULTIINDEX_HPP
#define QPR_MULTIINDEX_HPP

#include <cstdlib>
#include <functional>
#include <numeric>
#include <vector>

namespace qpr {

// Multi-index over Z^d (Fourier modes) or N^n (state degrees).
using MultiIndex = std::vector<int>;

// |k| = sum of |k_j|, the order used throughout.
inline int order(const MultiIndex& k) {
    int s = 0;
    for (int kj : k) s += std::abs(kj);
    return s;
}

inline MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline MultiIndex negate(const MultiIndex& k) {
    MultiIndex r(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) r[i] = -k[i];
    return r;
}

inline MultiIndex unit_index(int dim, int j) {
    MultiIndex e(dim, 0);
    e[j] = 1;
    return e;
}

inline bool is_zero(const MultiIndex& k) {
    for (int kj : k)
        if (kj != 0) return false;
    return true;
}

// Visits every k in Z^d with 1 <= |k| <= k_max.
void for_each_mode(int d, int k_max, const std::function<void(const MultiIndex&)>& fn);

// Visits every alpha in N^n with deg_min <= |alpha| <= deg_max.
void for_each_degree(int n, int deg_min, int deg_max,
                     const std::function<void(const MultiIndex&)>& fn);

}  // namespace qpr

#endif
