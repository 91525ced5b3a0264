#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rankone/shape.hpp"

namespace rankone {

// Placement offsets {base + k*step : 0 <= k < count}.  Counts are exact
// integers: deep staggered levels have ~2^49 placements, so placement sets
// are never required to be materialized.
struct ArithProg {
    Vec base;
    Vec step;
    Int count = 1;

    static ArithProg single(Vec p) {
        ArithProg a;
        a.step = zero_vec(static_cast<int>(p.size()));
        a.base = std::move(p);
        a.count = 1;
        return a;
    }
    static ArithProg make(Vec base, Vec step, Int count) {
        if (count < 1) throw std::invalid_argument("placement count must be >= 1");
        ArithProg a;
        a.base = std::move(base);
        a.step = std::move(step);
        a.count = std::move(count);
        return a;
    }

    Vec at(const Int& k) const { return add(base, scaled(step, k)); }

    bool operator==(const ArithProg& o) const { return base == o.base && step == o.step && count == o.count; }
};

// F_{n+1} together with the offsets I_{n,n+1} at which copies of tower n
// are stacked inside tower n+1.  The first level carries no placements.
struct Level {
    ShapeSpec shape;
    std::vector<ArithProg> placements;
};

inline Int placement_count(const std::vector<ArithProg>& ps) {
    Int t = 0;
    for (const ArithProg& a : ps) t += a.count;
    return t;
}

struct ConstructionSpec {
    int dim = 0;
    std::vector<Level> levels;  // levels[i] holds F_{i+1} and P_i (i >= 1)
    std::string rule;           // optional gallery tag for lazy extension

    int depth() const { return static_cast<int>(levels.size()); }
    // 1-based accessors matching the level indices used throughout.
    const ShapeSpec& shape(int n) const { return levels.at(static_cast<size_t>(n - 1)).shape; }
    const std::vector<ArithProg>& placements_into(int n) const {
        return levels.at(static_cast<size_t>(n - 1)).placements;
    }
};

struct Violation {
    int level = 0;  // 1-based target level
    std::string what;
    Vec witness;
    std::string detail;
};

namespace detail {

// Is there an integer point  w + sum_j t_j s_j  (t_j in [lo_j, hi_j]) with
// every coordinate i strictly inside (-box[i], box[i])?  Interval pruning on
// each axis keeps this exact even when the ranges are astronomically large.
struct BoxProbeAxis {
    Vec step;
    Int lo, hi;
};

inline bool probe_open_box(const Vec& w, const std::vector<BoxProbeAxis>& axes, const Vec& box,
                           bool exclude_zero_assignment, Vec* witness) {
    const size_t d = w.size();
    const size_t n = axes.size();
    // suffix reach bounds per coordinate
    std::vector<Vec> sufmin(n + 1, zero_vec(static_cast<int>(d))), sufmax(n + 1, zero_vec(static_cast<int>(d)));
    for (size_t a = n; a-- > 0;) {
        for (size_t i = 0; i < d; ++i) {
            Int c1 = axes[a].step[i] * axes[a].lo, c2 = axes[a].step[i] * axes[a].hi;
            sufmin[a][i] = sufmin[a + 1][i] + std::min(c1, c2);
            sufmax[a][i] = sufmax[a + 1][i] + std::max(c1, c2);
        }
    }
    auto rec = [&](auto&& self, size_t a, Vec cur, bool all_zero) -> bool {
        if (a == n) {
            if (exclude_zero_assignment && all_zero) return false;
            for (size_t i = 0; i < d; ++i)
                if (cur[i] <= -box[i] || cur[i] >= box[i]) return false;
            if (witness) *witness = cur;
            return true;
        }
        Int lo = axes[a].lo, hi = axes[a].hi;
        for (size_t i = 0; i < d; ++i) {
            const Int& s = axes[a].step[i];
            // need cur[i] + t*s + rest_i in (-box, box) for some admissible rest
            Int lo_num = -box[i] + 1 - cur[i] - sufmax[a + 1][i];
            Int hi_num = box[i] - 1 - cur[i] - sufmin[a + 1][i];
            if (s > 0) {
                lo = std::max(lo, ceildiv(lo_num, s));
                hi = std::min(hi, floordiv(hi_num, s));
            } else if (s < 0) {
                lo = std::max(lo, ceildiv(hi_num, s));
                hi = std::min(hi, floordiv(lo_num, s));
            } else if (lo_num > 0 || hi_num < 0) {
                return false;
            }
            if (lo > hi) return false;
        }
        for (Int t = lo; t <= hi; ++t) {
            Vec next = cur;
            add_scaled_inplace(next, axes[a].step, t);
            if (self(self, a + 1, std::move(next), all_zero && t == 0)) return true;
        }
        return false;
    };
    return rec(rec, 0, w, true);
}

}  // namespace detail

// Diagnostics, never exceptions: empty list iff every level invariant holds.
// Checks that placed copies of F_n are pairwise disjoint and sit inside
// F_{n+1}.  Rectangular shapes are checked per placement family in closed
// form; explicit point shapes are checked by (capped) enumeration.
inline std::vector<Violation> validate(const ConstructionSpec& spec, const Int& enum_cap = Int(200000)) {
    std::vector<Violation> out;
    const int d = spec.dim;
    if (spec.levels.empty()) {
        out.push_back({0, "empty-spec", {}, "construction has no levels"});
        return out;
    }
    for (int n = 1; n <= spec.depth(); ++n) {
        if (spec.shape(n).dim() != d) out.push_back({n, "dimension-mismatch", {}, "shape dimension differs"});
        if (n == 1) {
            if (!spec.placements_into(1).empty())
                out.push_back({1, "placements-at-first-level", {}, "level 1 must not have placements"});
            continue;
        }
        const auto& ps = spec.placements_into(n);
        const ShapeSpec& inner = spec.shape(n - 1);
        const ShapeSpec& outer = spec.shape(n);
        if (ps.empty()) {
            out.push_back({n, "no-placements", {}, "placements must be nonempty"});
            continue;
        }
        // Cardinality guard: copies must fit.
        if (placement_count(ps) * inner.size() > outer.size())
            out.push_back({n, "copies-exceed-shape", {},
                           "placement count * #F_" + std::to_string(n - 1) + " exceeds #F_" + std::to_string(n)});

        if (inner.is_rect && outer.is_rect) {
            // Containment: both endpoints of each progression, per axis.
            for (const ArithProg& a : ps) {
                const Int endpoints[2] = {Int(0), Int(a.count - 1)};
                for (const Int& k : endpoints) {
                    Vec p = a.at(k);
                    for (size_t i = 0; i < p.size(); ++i)
                        if (p[i] < 0 || p[i] + inner.extents[i] > outer.extents[i]) {
                            out.push_back({n, "copy-outside-shape", p, "offset places copy outside F_" + std::to_string(n)});
                            break;
                        }
                }
            }
            // Disjointness: copies at p,q overlap iff p-q is inside the open
            // box (-E, E) where E = extents of F_{n-1}.
            for (size_t x = 0; x < ps.size(); ++x)
                for (size_t y = x; y < ps.size(); ++y) {
                    const ArithProg &A = ps[x], &B = ps[y];
                    Vec w = sub(B.base, A.base);
                    std::vector<detail::BoxProbeAxis> axes;
                    if (A.step == B.step) {
                        if (A.count > 1 || B.count > 1)
                            axes.push_back({A.step, -(A.count - 1), B.count - 1});
                    } else {
                        if (B.count > 1) axes.push_back({B.step, Int(0), B.count - 1});
                        if (A.count > 1) axes.push_back({neg(A.step), Int(0), A.count - 1});
                    }
                    // For x == y the zero assignment is the copy paired with
                    // itself and does not count as an overlap.
                    Vec hit;
                    if (detail::probe_open_box(w, axes, inner.extents, x == y, &hit)) {
                        out.push_back({n, "copies-overlap", hit,
                                       "placement families " + std::to_string(x) + " and " + std::to_string(y) +
                                           " produce overlapping copies (offset difference " + vec_str(hit) + ")"});
                    }
                }
        } else {
            // Point-set route: enumerate translated copies.
            Int work = placement_count(ps) * inner.size();
            if (work > enum_cap) {
                out.push_back({n, "unverified", {}, "point-shape level too large to verify by enumeration"});
                continue;
            }
            std::set<Vec> seen;
            const std::vector<Vec> inner_pts = inner.enumerate(enum_cap);
            for (const ArithProg& a : ps)
                for (Int k = 0; k < a.count; ++k) {
                    Vec p = a.at(k);
                    for (const Vec& q : inner_pts) {
                        Vec t = add(p, q);
                        if (!outer.member(t))
                            out.push_back({n, "copy-outside-shape", t, "translated point escapes F_" + std::to_string(n)});
                        if (!seen.insert(t).second)
                            out.push_back({n, "copies-overlap", t, "translated copies share a point"});
                    }
                }
        }
    }
    return out;
}

// Per-level Folner deficiencies for each test vector, with a trend flag.
// Factor criteria are unsound without the Folner property (a stacking
// construction can satisfy the descendant condition and still admit no
// factor), so analysis verdicts consult this report.
struct FolnerRow {
    Vec vector;
    std::vector<Rat> deficiency;  // per level 1..depth
    bool nonincreasing = true;
    Rat final_deficiency;
    bool suspect = false;
};

struct FolnerReport {
    std::vector<FolnerRow> rows;
    Rat threshold;
    int depth = 0;
    bool suspect = false;
};

inline FolnerReport folner_report(const ConstructionSpec& spec, std::vector<Vec> test_vectors = {},
                                  int depth = 0, const Rat& threshold = Rat(1, 2)) {
    if (depth <= 0 || depth > spec.depth()) depth = spec.depth();
    if (test_vectors.empty())
        for (int i = 0; i < spec.dim; ++i) test_vectors.push_back(unit_vec(spec.dim, i));
    FolnerReport rep;
    rep.threshold = threshold;
    rep.depth = depth;
    for (const Vec& v : test_vectors) {
        FolnerRow row;
        row.vector = v;
        for (int n = 1; n <= depth; ++n) {
            Rat def = folner_deficiency(spec.shape(n), v);
            if (!row.deficiency.empty() && def > row.deficiency.back()) row.nonincreasing = false;
            row.deficiency.push_back(def);
        }
        row.final_deficiency = row.deficiency.back();
        row.suspect = depth >= 2 && row.final_deficiency >= threshold;
        rep.suspect = rep.suspect || row.suspect;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// Exact top-down mass bookkeeping: mu(B_n) = #P_n * mu(B_{n+1}), tower mass
// #F_n * mu(B_n), and per-step spacer fractions 1 - #P_n #F_n / #F_{n+1}.
struct MeasureLedger {
    std::vector<Rat> base_mass;        // mu(B_n), n = 1..K
    std::vector<Rat> tower_mass;       // #F_n * mu(B_n)
    std::vector<Rat> spacer_fraction;  // step n -> n+1, n = 1..K-1
    std::vector<Rat> spacer_mass;      // new mass added at step n -> n+1
};

inline MeasureLedger measure_ledger(const ConstructionSpec& spec, std::optional<Rat> base_mass_at_top = {}) {
    const int k = spec.depth();
    Rat top = base_mass_at_top ? *base_mass_at_top : make_rat(1, spec.shape(k).size());
    if (top <= 0) throw std::invalid_argument("base mass must be positive");
    MeasureLedger led;
    std::vector<Rat> base(static_cast<size_t>(k));
    base[static_cast<size_t>(k - 1)] = top;
    for (int n = k - 1; n >= 1; --n)
        base[static_cast<size_t>(n - 1)] =
            base[static_cast<size_t>(n)] * Rat(placement_count(spec.placements_into(n + 1)));
    for (int n = 1; n <= k; ++n) {
        led.base_mass.push_back(base[static_cast<size_t>(n - 1)]);
        led.tower_mass.push_back(base[static_cast<size_t>(n - 1)] * Rat(spec.shape(n).size()));
    }
    for (int n = 1; n < k; ++n) {
        Int covered = placement_count(spec.placements_into(n + 1)) * spec.shape(n).size();
        Int cells = spec.shape(n + 1).size();
        led.spacer_fraction.push_back(make_rat(cells - covered, cells));
        led.spacer_mass.push_back(Rat(cells - covered) * base[static_cast<size_t>(n)]);
    }
    return led;
}

}  // namespace rankone
