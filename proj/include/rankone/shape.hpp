#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankone/lattice.hpp"

namespace rankone {

struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Nonempty finite subset of Z^d containing 0: either a box prod_l [0,e_l)
// or an explicit point set (deduplicated, sorted).
struct ShapeSpec {
    bool is_rect = true;
    Vec extents;             // rect form
    std::vector<Vec> pts;    // points form

    static ShapeSpec rect(Vec e) {
        for (const Int& x : e)
            if (x < 1) throw std::invalid_argument("rect extent must be positive");
        ShapeSpec s;
        s.is_rect = true;
        s.extents = std::move(e);
        return s;
    }

    static ShapeSpec points(std::vector<Vec> p) {
        if (p.empty()) throw std::invalid_argument("point shape must be nonempty");
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        ShapeSpec s;
        s.is_rect = false;
        s.pts = std::move(p);
        if (!s.member(zero_vec(s.dim()))) throw std::invalid_argument("shape must contain 0");
        return s;
    }

    int dim() const { return is_rect ? static_cast<int>(extents.size()) : static_cast<int>(pts[0].size()); }

    Int size() const {
        if (!is_rect) return Int(pts.size());
        Int p = 1;
        for (const Int& e : extents) p *= e;
        return p;
    }

    bool member(const Vec& v) const {
        if (is_rect) {
            for (size_t i = 0; i < extents.size(); ++i)
                if (v[i] < 0 || v[i] >= extents[i]) return false;
            return true;
        }
        return std::binary_search(pts.begin(), pts.end(), v);
    }

    std::vector<Vec> enumerate(const Int& cap = Int(1000000)) const {
        if (size() > cap) throw CapExceeded("shape too large to enumerate: " + size().get_str());
        if (!is_rect) return pts;
        std::vector<Vec> out;
        Vec cur = zero_vec(dim());
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == dim()) {
                out.push_back(cur);
                return;
            }
            for (Int x = 0; x < extents[static_cast<size_t>(axis)]; ++x) {
                cur[static_cast<size_t>(axis)] = x;
                self(self, axis + 1);
            }
            cur[static_cast<size_t>(axis)] = 0;
        };
        rec(rec, 0);
        return out;
    }

    bool operator==(const ShapeSpec& o) const {
        return is_rect == o.is_rect && extents == o.extents && pts == o.pts;
    }
};

// #(F symdiff (F+v)) / #F, exact.  Rectangles in closed form, point sets by
// set algebra.  Always in [0,2]; 0 exactly when v = 0.
inline Rat folner_deficiency(const ShapeSpec& shape, const Vec& v) {
    const Int total = shape.size();
    if (shape.is_rect) {
        Int common = 1;
        for (size_t i = 0; i < shape.extents.size(); ++i) {
            Int keep = shape.extents[i] - abs(v[i]);
            if (keep <= 0) return Rat(2);
            common *= keep;
        }
        return make_rat(2 * (total - common), total);
    }
    Int common = 0;
    for (const Vec& p : shape.pts)
        if (shape.member(add(p, v))) ++common;
    return make_rat(2 * (total - common), total);
}

namespace detail {

// Histogram of the first (axis+1) coordinates of a rectangle against the
// leading principal sublattice, built by recursion on the triangular basis.
// Blocks of the top coordinate translate the lower-dimensional histogram by
// multiples of the column's upper part; the translation is periodic in the
// quotient, so whole residue classes of blocks are aggregated at once and
// the cost never depends on the extent.
inline std::map<Vec, Int> rect_hist_axis(const Lattice& lat, const Vec& extents, int axis) {
    if (axis < 0) return {{Vec{}, Int(1)}};
    std::map<Vec, Int> sub = rect_hist_axis(lat, extents, axis - 1);

    const size_t ua = static_cast<size_t>(axis);
    const Int a = lat.diag(axis);
    const Int E = extents[ua];
    Vec upper(lat.columns()[ua].begin(), lat.columns()[ua].begin() + axis);

    std::optional<Lattice> prefix;
    if (axis > 0) {
        std::vector<Vec> pcols;
        for (int j = 0; j < axis; ++j)
            pcols.emplace_back(lat.columns()[static_cast<size_t>(j)].begin(),
                               lat.columns()[static_cast<size_t>(j)].begin() + axis);
        prefix = Lattice::from_columns(pcols);
    }
    const Int period = prefix ? order_in_quotient(*prefix, upper) : Int(1);

    const Int full_blocks = floordiv(E, a);
    const Int partial = E - full_blocks * a;

    std::map<Vec, Int> out;
    auto add_shifted = [&](const Int& shift_steps, const Int& multiplicity, const Int& rho_count) {
        if (multiplicity == 0 || rho_count == 0) return;
        Vec shift = prefix ? prefix->reduce_vec(scaled(upper, -shift_steps)) : Vec{};
        for (const auto& [key, cnt] : sub) {
            Vec shifted = prefix ? prefix->reduce_vec(add(key, shift)) : key;
            shifted.push_back(0);
            for (Int rho = 0; rho < rho_count; ++rho) {
                shifted.back() = rho;
                out[shifted] += cnt * multiplicity;
            }
        }
    };

    for (Int t = 0; t < period && t < full_blocks; ++t) {
        // #{c in [0, full_blocks) : c == t mod period}
        const Int mult = floordiv(full_blocks - t - 1, period) + 1;
        add_shifted(t, mult, a);
    }
    if (partial > 0) add_shifted(emod(full_blocks, period), Int(1), partial);
    return out;
}

}  // namespace detail

// Exact per-coset counts #(F ∩ (v+G)) of a finite shape F against G.
// Rectangles use the coordinate recursion above; point sets are reduced
// point by point.
inline ResidueHistogram shape_coset_histogram(const ShapeSpec& shape, const Lattice& lat) {
    ResidueHistogram h{lat, {}, 0};
    if (shape.is_rect) {
        for (auto& [rep, cnt] : detail::rect_hist_axis(lat, shape.extents, lat.dim() - 1)) h.bump(rep, cnt);
        return h;
    }
    for (const Vec& p : shape.pts) h.bump(lat.reduce_vec(p), 1);
    return h;
}

}  // namespace rankone
