#pragma once

#include <algorithm>
#include <vector>

#include "rankone/ints.hpp"

namespace rankone {

// Integer vector in Z^d.
using Vec = std::vector<Int>;

inline Vec zero_vec(int d) { return Vec(static_cast<size_t>(d), Int(0)); }

inline Vec unit_vec(int d, int axis) {
    Vec v = zero_vec(d);
    v[static_cast<size_t>(axis)] = 1;
    return v;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec neg(const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline Vec scaled(const Vec& a, const Int& c) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
    return r;
}

inline void add_scaled_inplace(Vec& a, const Vec& b, const Int& c) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i] * c;
}

inline bool is_zero(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](const Int& x) { return x == 0; });
}

// Flip sign so the first nonzero coordinate is positive; used to deduplicate
// probe vectors (v and -v carry the same pairing information).
inline Vec canonical_sign(const Vec& a) {
    for (const Int& x : a) {
        if (x > 0) return a;
        if (x < 0) return neg(a);
    }
    return a;
}

inline Int content(const Vec& a) {
    Int g = 0;
    for (const Int& x : a) g = gcd(g, x);
    return g;
}

inline std::string vec_str(const Vec& a) {
    std::string s = "(";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += a[i].get_str();
    }
    return s + ")";
}

}  // namespace rankone
