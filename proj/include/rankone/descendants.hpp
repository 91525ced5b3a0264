#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rankone/construction.hpp"

namespace rankone {

// Descendants I_{m,n} compose as disjoint sumsets of the per-level
// placements: I_{m,m} = {0} and I_{m,n+1} = I_{m,n} + P_n.  They are
// handled in three exact forms, in decreasing order of fidelity per cost:
// explicit point sets (capped), grid components (products of placement
// progressions, closed-form counting), and residue histograms over a chosen
// quotient Z^d/G (size bounded by the index regardless of depth).

inline Int descendant_count(const ConstructionSpec& spec, int m, int n) {
    if (m < 1 || n < m || n > spec.depth()) throw std::invalid_argument("descendant indices out of range");
    Int t = 1;
    for (int j = m; j < n; ++j) t *= placement_count(spec.placements_into(j + 1));
    return t;
}

namespace detail {

// One choice of placement progression per level: the points
// base + sum_j k_j * step_j with k_j in [0, count_j).
struct Grid {
    Vec base;
    struct Axis {
        int level;
        Vec step;
        Int count;
    };
    std::vector<Axis> axes;
    Int size = 1;
};

inline std::vector<Grid> grid_components(const ConstructionSpec& spec, int m, int n,
                                         const Int& component_cap = Int(4096)) {
    Int n_components = 1;
    for (int j = m; j < n; ++j) n_components *= Int(spec.placements_into(j + 1).size());
    if (n_components > component_cap)
        throw CapExceeded("too many placement components: " + n_components.get_str());
    std::vector<Grid> grids{Grid{zero_vec(spec.dim), {}, 1}};
    for (int j = m; j < n; ++j) {
        std::vector<Grid> next;
        for (const Grid& g : grids)
            for (const ArithProg& a : spec.placements_into(j + 1)) {
                Grid h = g;
                h.base = add(h.base, a.base);
                if (a.count > 1) h.axes.push_back({j, a.step, a.count});
                h.size *= a.count;
                next.push_back(std::move(h));
            }
        grids = std::move(next);
    }
    return grids;
}

inline void grid_points(const Grid& g, std::vector<Vec>& out) {
    auto rec = [&](auto&& self, size_t axis, Vec cur) -> void {
        if (axis == g.axes.size()) {
            out.push_back(std::move(cur));
            return;
        }
        for (Int k = 0; k < g.axes[axis].count; ++k) {
            Vec next = cur;
            add_scaled_inplace(next, g.axes[axis].step, k);
            self(self, axis + 1, std::move(next));
        }
    };
    rec(rec, 0, g.base);
}

// #{x in X : x + v in Y} for two grids whose axes are aligned by level.
// Axes sharing a step collapse to a single difference variable with a
// closed-form weight, so counts stay exact for astronomically large ranges.
inline Int grid_pair_count(const Grid& x, const Grid& y, const Vec& v, long long* budget) {
    struct SolveAxis {
        Vec step;
        Int lo, hi;
        bool merged;
        Int cx, cy;  // weight data for merged axes
    };
    std::vector<SolveAxis> axes;
    size_t ix = 0, iy = 0;
    while (ix < x.axes.size() || iy < y.axes.size()) {
        if (ix < x.axes.size() && (iy == y.axes.size() || x.axes[ix].level < y.axes[iy].level)) {
            axes.push_back({neg(x.axes[ix].step), Int(0), x.axes[ix].count - 1, false, 0, 0});
            ++ix;
        } else if (iy < y.axes.size() && (ix == x.axes.size() || y.axes[iy].level < x.axes[ix].level)) {
            axes.push_back({y.axes[iy].step, Int(0), y.axes[iy].count - 1, false, 0, 0});
            ++iy;
        } else {
            const auto &ax = x.axes[ix], &ay = y.axes[iy];
            if (ax.step == ay.step) {
                axes.push_back({ax.step, -(ax.count - 1), ay.count - 1, true, ax.count, ay.count});
            } else {
                axes.push_back({ay.step, Int(0), ay.count - 1, false, 0, 0});
                axes.push_back({neg(ax.step), Int(0), ax.count - 1, false, 0, 0});
            }
            ++ix;
            ++iy;
        }
    }
    // Dominant steps first: interval pruning then pins each variable to a
    // handful of candidates even when the ranges are huge.
    std::stable_sort(axes.begin(), axes.end(), [](const SolveAxis& a, const SolveAxis& b) {
        Int na = 0, nb = 0;
        for (const Int& s : a.step) na = std::max(na, Int(abs(s)));
        for (const Int& s : b.step) nb = std::max(nb, Int(abs(s)));
        return na > nb;
    });
    const Vec w = add(sub(x.base, y.base), v);  // solve sum t_a * step_a = w
    const size_t d = w.size();
    const size_t na = axes.size();
    std::vector<Vec> sufmin(na + 1, zero_vec(static_cast<int>(d))), sufmax(na + 1, zero_vec(static_cast<int>(d)));
    for (size_t a = na; a-- > 0;)
        for (size_t i = 0; i < d; ++i) {
            Int c1 = axes[a].step[i] * axes[a].lo, c2 = axes[a].step[i] * axes[a].hi;
            sufmin[a][i] = sufmin[a + 1][i] + std::min(c1, c2);
            sufmax[a][i] = sufmax[a + 1][i] + std::max(c1, c2);
        }

    auto overlap = [](const Int& cx, const Int& cy, const Int& delta) -> Int {
        Int lo = delta < 0 ? Int(-delta) : Int(0);
        Int hi = std::min(cx, Int(cy - delta));
        return hi > lo ? Int(hi - lo) : Int(0);
    };

    auto rec = [&](auto&& self, size_t a, Vec rem) -> Int {
        if (--(*budget) < 0) throw CapExceeded("pair-count search budget exhausted");
        if (a == na) return is_zero(rem) ? Int(1) : Int(0);
        Int lo = axes[a].lo, hi = axes[a].hi;
        for (size_t i = 0; i < d; ++i) {
            const Int& s = axes[a].step[i];
            Int lo_num = rem[i] - sufmax[a + 1][i];
            Int hi_num = rem[i] - sufmin[a + 1][i];
            if (s > 0) {
                lo = std::max(lo, ceildiv(lo_num, s));
                hi = std::min(hi, floordiv(hi_num, s));
            } else if (s < 0) {
                lo = std::max(lo, ceildiv(hi_num, s));
                hi = std::min(hi, floordiv(lo_num, s));
            } else if (lo_num > 0 || hi_num < 0) {
                return Int(0);
            }
            if (lo > hi) return Int(0);
        }
        Int total = 0;
        for (Int t = lo; t <= hi; ++t) {
            Vec next = rem;
            add_scaled_inplace(next, axes[a].step, -t);
            Int sub_count = self(self, a + 1, std::move(next));
            if (sub_count == 0) continue;
            total += axes[a].merged ? sub_count * overlap(axes[a].cx, axes[a].cy, t) : sub_count;
        }
        return total;
    };
    return rec(rec, 0, w);
}

inline ResidueHistogram placement_histogram(const std::vector<ArithProg>& ps, const Lattice& lat) {
    ResidueHistogram h{lat, {}, 0};
    for (const ArithProg& a : ps) {
        // The residues of base + k*step cycle with the order of step in the
        // quotient; whole cycles are aggregated at once.
        const Int ord = a.count > 1 ? order_in_quotient(lat, a.step) : Int(1);
        for (Int t = 0; t < ord && t < a.count; ++t) {
            const Int mult = floordiv(a.count - t - 1, ord) + 1;
            h.bump(lat.reduce_vec(a.at(t)), mult);
        }
    }
    return h;
}

}  // namespace detail

// Exact descendant set, smallest offsets first.  CapExceeded directs the
// caller to histogram mode.
inline std::vector<Vec> compose_exact(const ConstructionSpec& spec, int m, int n,
                                      const Int& cap = Int(1000000)) {
    const Int total = descendant_count(spec, m, n);
    if (total > cap) throw CapExceeded("descendant set of size " + total.get_str() + " exceeds cap");
    std::vector<Vec> pts;
    for (const detail::Grid& g : detail::grid_components(spec, m, n, total)) detail::grid_points(g, pts);
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
        throw std::logic_error("descendant sumset produced duplicates; the construction is invalid");
    return pts;
}

// Residue histogram of I_{m,n} over Z^d/G by per-level convolution.
inline ResidueHistogram compose_hist(const ConstructionSpec& spec, int m, int n, const Lattice& lat) {
    if (m < 1 || n < m || n > spec.depth()) throw std::invalid_argument("descendant indices out of range");
    ResidueHistogram h{lat, {}, 0};
    h.bump(lat.reduce_vec(zero_vec(spec.dim)), 1);
    for (int j = m; j < n; ++j)
        h = convolve(h, detail::placement_histogram(spec.placements_into(j + 1), lat));
    return h;
}

// Directed pair fraction #{i in I_{m,n} : i + v in I_{m,n}} / #I_{m,n},
// exact.  Falls back from set enumeration to per-component grid counting.
inline Rat pair_fraction(const ConstructionSpec& spec, int m, int n, const Vec& v,
                         const Int& cap = Int(1000000)) {
    const Int total = descendant_count(spec, m, n);
    if (total <= cap) {
        std::vector<Vec> pts = compose_exact(spec, m, n, cap);
        std::set<Vec> lookup(pts.begin(), pts.end());
        Int hits = 0;
        for (const Vec& p : pts)
            if (lookup.count(add(p, v))) ++hits;
        return make_rat(hits, total);
    }
    std::vector<detail::Grid> grids = detail::grid_components(spec, m, n);
    long long budget = 2000000;
    Int hits = 0;
    for (const detail::Grid& x : grids)
        for (const detail::Grid& y : grids) hits += detail::grid_pair_count(x, y, v, &budget);
    return make_rat(hits, total);
}

// I_{m,n} materialized exactly or as a histogram over a chosen quotient.
struct DescendantView {
    int m = 0, n = 0;
    Int cardinality;
    std::optional<std::vector<Vec>> exact;
    std::optional<ResidueHistogram> hist;
};

inline DescendantView descendants_view(const ConstructionSpec& spec, int m, int n,
                                       const std::optional<Lattice>& lat = {},
                                       const Int& cap = Int(1000000)) {
    DescendantView view;
    view.m = m;
    view.n = n;
    view.cardinality = descendant_count(spec, m, n);
    if (lat)
        view.hist = compose_hist(spec, m, n, *lat);
    else
        view.exact = compose_exact(spec, m, n, cap);
    return view;
}

}  // namespace rankone
