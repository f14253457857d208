#include "qpr/multiindex.hpp"

namespace qpr {

namespace {

void mode_rec(MultiIndex& k, int pos, int budget, bool nonzero,
              const std::function<void(const MultiIndex&)>& fn) {
    if (pos == static_cast<int>(k.size())) {
        if (nonzero) fn(k);
        return;
    }
    for (int v = -budget; v <= budget; ++v) {
        k[pos] = v;
        mode_rec(k, pos + 1, budget - std::abs(v), nonzero || v != 0, fn);
    }
    k[pos] = 0;
}

void degree_rec(MultiIndex& a, int pos, int budget, int used, int deg_min,
                const std::function<void(const MultiIndex&)>& fn) {
    if (pos == static_cast<int>(a.size())) {
        if (used >= deg_min) fn(a);
        return;
    }
    for (int v = 0; v <= budget; ++v) {
        a[pos] = v;
        degree_rec(a, pos + 1, budget - v, used + v, deg_min, fn);
    }
    a[pos] = 0;
}

}  // namespace

void for_each_mode(int d, int k_max, const std::function<void(const MultiIndex&)>& fn) {
    MultiIndex k(d, 0);
    mode_rec(k, 0, k_max, false, fn);
}

void for_each_degree(int n, int deg_min, int deg_max,
                     const std::function<void(const MultiIndex&)>& fn) {
    MultiIndex a(n, 0);
    degree_rec(a, 0, deg_max, 0, deg_min, fn);
}

}  // namespace qpr
