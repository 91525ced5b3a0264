#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankone/construction.hpp"

namespace rankone {

enum class Status { Supported, Refuted, Inconclusive };

inline std::string status_str(Status s) {
    switch (s) {
        case Status::Supported: return "Supported";
        case Status::Refuted: return "Refuted";
        default: return "Inconclusive";
    }
}

// Finite-depth truth value for statements quantified over the whole chain.
struct FFVerdict {
    Status status = Status::Inconclusive;
    int depth = 0;  // level count used; for Supported, the witnessing N
    std::optional<Lattice> witness_lattice;
    std::optional<Vec> witness_vector;
    std::string reason;
};

// How a truncated chain continues.
//   None:     bare truncation; nothing is known beyond depth K.
//   Explicit: the chain is complete and padded with its last group forever.
//   Pow:      G_j is generated by the j-th power of a fixed basis matrix.
enum class ChainRule { None, Explicit, Pow };

struct OdometerSpec {
    int dim = 0;
    std::vector<Lattice> chain;  // G_1 >= G_2 >= ... >= G_K
    ChainRule rule = ChainRule::None;
    std::optional<Lattice> pow_base;

    int depth() const { return static_cast<int>(chain.size()); }
    const Lattice& group(int j) const { return chain.at(static_cast<size_t>(j - 1)); }
};

namespace detail {

inline std::vector<Vec> mat_mul_cols(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    const int d = static_cast<int>(a.size());
    std::vector<Vec> c(static_cast<size_t>(d), zero_vec(d));
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            add_scaled_inplace(c[static_cast<size_t>(j)], a[static_cast<size_t>(k)],
                               b[static_cast<size_t>(j)][static_cast<size_t>(k)]);
    return c;
}

}  // namespace detail

inline OdometerSpec make_odometer(std::vector<Lattice> chain, ChainRule rule = ChainRule::None,
                                  std::optional<Lattice> pow_base = {}) {
    if (chain.empty()) throw std::invalid_argument("odometer chain must be nonempty");
    OdometerSpec spec;
    spec.dim = chain[0].dim();
    for (size_t j = 0; j + 1 < chain.size(); ++j)
        if (!is_sublattice(chain[j + 1], chain[j]))
            throw std::invalid_argument("odometer chain must be decreasing");
    spec.chain = std::move(chain);
    spec.rule = rule;
    spec.pow_base = std::move(pow_base);
    if (rule == ChainRule::Pow && !spec.pow_base) throw std::invalid_argument("pow rule needs a base lattice");
    return spec;
}

// Chain G_j = (basis of `base`)^j Z^d, truncated at `depth` levels.
inline OdometerSpec pow_odometer(const Lattice& base, int depth) {
    std::vector<Lattice> chain;
    std::vector<Vec> power = base.columns();
    for (int j = 1; j <= depth; ++j) {
        chain.push_back(Lattice::from_columns(power));
        if (j < depth) power = detail::mat_mul_cols(base.columns(), power);
    }
    return make_odometer(std::move(chain), ChainRule::Pow, base);
}

// Point of the inverse limit, truncated: coords[j] is the class mod G_{j+1}
// and projects onto coords[j-1].
struct OdometerPoint {
    std::vector<Residue> coords;
};

inline OdometerPoint make_point(const OdometerSpec& spec, const Vec& v) {
    OdometerPoint p;
    for (const Lattice& g : spec.chain) p.coords.push_back(g.reduce(v));
    return p;
}

inline bool point_compatible(const OdometerSpec& spec, const OdometerPoint& p) {
    if (static_cast<int>(p.coords.size()) != spec.depth()) return false;
    for (int j = 1; j < spec.depth(); ++j) {
        const Residue& fine = p.coords[static_cast<size_t>(j)];
        if (fine.lattice != spec.group(j + 1)) return false;
        if (quotient_project(fine, spec.group(j)) != p.coords[static_cast<size_t>(j - 1)]) return false;
    }
    return p.coords[0].lattice == spec.group(1);
}

// sigma^v: add v in every coordinate.
inline OdometerPoint act(const OdometerSpec& spec, const OdometerPoint& p, const Vec& v) {
    OdometerPoint q;
    for (int j = 1; j <= spec.depth(); ++j)
        q.coords.push_back(quotient_add(p.coords[static_cast<size_t>(j - 1)], spec.group(j).reduce(v)));
    return q;
}

// Haar mass of a depth-j cylinder.
inline Rat coordinate_measure(const OdometerSpec& spec, int j) {
    return make_rat(1, spec.group(j).index());
}

// Solve (basis of lat) * x = v exactly; nullopt if v is outside the lattice.
inline std::optional<Vec> solve_in_basis(const Lattice& lat, const Vec& v) {
    Vec w = v;
    Vec x = zero_vec(lat.dim());
    for (int r = lat.dim() - 1; r >= 0; --r) {
        const size_t ur = static_cast<size_t>(r);
        if (emod(w[ur], lat.diag(r)) != 0) return std::nullopt;
        x[ur] = w[ur] / lat.diag(r);
        add_scaled_inplace(w, lat.columns()[ur], -x[ur]);
    }
    return x;
}

// Freeness at depth: the truncated intersection is G_K itself, so genuine
// verdicts need a rule.  For a pow rule, an all->=2 diagonal forces every
// coordinate of a fixed vector out of the deep groups (Supported); a vector
// whose backward orbit under the basis matrix stays integral and cycles is
// a certificate that it lies in every G_j (Refuted).
inline FFVerdict is_free_at_depth(const OdometerSpec& spec) {
    FFVerdict v;
    v.depth = spec.depth();
    if (spec.rule == ChainRule::Pow) {
        const Lattice& base = *spec.pow_base;
        bool all_grow = true;
        for (int l = 0; l < base.dim(); ++l) all_grow = all_grow && base.diag(l) >= 2;
        if (all_grow) {
            v.status = Status::Supported;
            v.reason = "all basis diagonal entries are >= 2, so the chain intersection is trivial";
            return v;
        }
        Int bound = 1;
        for (int l = 0; l < base.dim(); ++l)
            for (int k = 0; k <= l; ++k) bound = std::max(bound, Int(abs(base.entry(k, l))));
        std::vector<Vec> candidates;
        Vec cur = zero_vec(base.dim());
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == base.dim()) {
                if (!is_zero(cur)) candidates.push_back(cur);
                return;
            }
            for (Int x = -bound; x <= bound; ++x) {
                cur[static_cast<size_t>(axis)] = x;
                self(self, axis + 1);
            }
            cur[static_cast<size_t>(axis)] = 0;
        };
        rec(rec, 0);
        // smallest witnesses first
        std::sort(candidates.begin(), candidates.end(), [](const Vec& a, const Vec& b) {
            Int na = 0, nb = 0;
            for (const Int& x : a) na = std::max(na, Int(abs(x)));
            for (const Int& x : b) nb = std::max(nb, Int(abs(x)));
            if (na != nb) return na < nb;
            return a < b;
        });
        for (const Vec& cand : candidates) {
            std::set<Vec> seen;
            Vec w = cand;
            bool cycles = false;
            for (int step = 0; step < 256; ++step) {
                if (!seen.insert(w).second) {
                    cycles = true;
                    break;
                }
                auto prev = solve_in_basis(base, w);
                if (!prev) break;
                w = *prev;
            }
            if (cycles) {
                v.status = Status::Refuted;
                v.witness_vector = canonical_sign(cand);
                v.reason = "vector lies in every chain group (integral backward orbit cycles)";
                return v;
            }
        }
        v.status = Status::Inconclusive;
        v.reason = "no freeness certificate found for the pow rule";
        return v;
    }
    if (spec.rule == ChainRule::Explicit) {
        v.status = Status::Refuted;
        v.witness_vector = spec.group(spec.depth()).columns()[0];
        v.reason = "chain is eventually constant, so its intersection is the final group";
        return v;
    }
    v.status = Status::Inconclusive;
    v.reason = "bare truncation: intersection so far is " + spec.group(spec.depth()).str();
    return v;
}

inline FFVerdict is_infinite_at_depth(const OdometerSpec& spec) {
    FFVerdict v;
    v.depth = spec.depth();
    std::set<Vec> distinct;
    for (const Lattice& g : spec.chain) distinct.insert(g.flat());
    if (spec.rule == ChainRule::Pow) {
        if (spec.pow_base->index() >= 2) {
            v.status = Status::Supported;
            v.reason = "indices grow as |det|^j, so the chain never stabilizes";
        } else {
            v.status = Status::Refuted;
            v.witness_lattice = spec.group(1);
            v.reason = "unimodular base: every chain group equals Z^d";
        }
        return v;
    }
    if (spec.rule == ChainRule::Explicit) {
        v.status = Status::Refuted;
        v.witness_lattice = spec.group(spec.depth());
        v.reason = "chain is padded with its last group, so the phase space is finite";
        return v;
    }
    v.status = Status::Inconclusive;
    v.reason = distinct.size() == 1 ? "chain constant so far" : "bare truncation";
    return v;
}

// Does the finite odometer on Z^d/H appear as a factor: H >= G_N for some N.
// Within the truncation this is a sublattice scan; a pow rule extends it to
// a complete decision by tracking the basis powers modulo the exponent of
// Z^d/H, which is an eventually periodic sequence.
inline FFVerdict ff_contains(const OdometerSpec& spec, const Lattice& h, long long iteration_cap = 100000) {
    FFVerdict v;
    v.depth = spec.depth();
    if (h.dim() != spec.dim) throw std::invalid_argument("ff_contains: dimension mismatch");
    for (int j = 1; j <= spec.depth(); ++j)
        if (is_sublattice(spec.group(j), h)) {
            v.status = Status::Supported;
            v.depth = j;
            v.reason = "G_" + std::to_string(j) + " is contained in the group";
            return v;
        }
    if (spec.rule == ChainRule::Explicit) {
        v.status = Status::Refuted;
        v.witness_lattice = h;
        v.reason = "chain is eventually constant and its final group is not contained";
        return v;
    }
    if (spec.rule == ChainRule::Pow) {
        const Lattice& base = *spec.pow_base;
        const Int e = quotient_exponent(h);
        auto mod_e = [&](const std::vector<Vec>& cols) {
            std::vector<Vec> r = cols;
            for (Vec& c : r)
                for (Int& x : c) x = emod(x, e);
            return r;
        };
        auto contained = [&](const std::vector<Vec>& cols) {
            for (const Vec& c : cols)
                if (!h.contains(c)) return false;
            return true;
        };
        std::map<std::vector<Vec>, int> seen;
        std::vector<Vec> power = mod_e(base.columns());
        for (int n = 1; iteration_cap-- > 0; ++n) {
            if (contained(power)) {
                v.status = Status::Supported;
                v.depth = n;
                v.reason = "G_" + std::to_string(n) + " is contained in the group (rule-extended)";
                return v;
            }
            if (!seen.emplace(power, n).second) {
                v.status = Status::Refuted;
                v.witness_lattice = h;
                v.reason = "basis powers modulo the quotient exponent cycle without entering the group";
                return v;
            }
            power = mod_e(detail::mat_mul_cols(base.columns(), power));
        }
        v.status = Status::Inconclusive;
        v.reason = "power-cycle search exceeded its iteration cap";
        return v;
    }
    v.status = Status::Inconclusive;
    v.reason = "no chain group within the truncation is contained, and no rule extends it";
    return v;
}

// Odometer generated by a family of finite-index subgroups: prefix
// intersections, padded with the last group.
inline OdometerSpec generate_from_family(const std::vector<Lattice>& family) {
    if (family.empty()) throw std::invalid_argument("family must be nonempty");
    std::vector<Lattice> chain;
    Lattice acc = family[0];
    chain.push_back(acc);
    for (size_t j = 1; j < family.size(); ++j) {
        acc = intersect(acc, family[j]);
        chain.push_back(acc);
    }
    return make_odometer(std::move(chain), ChainRule::Explicit);
}

namespace detail {

inline std::vector<Int> prime_divisors(Int n) {
    std::vector<Int> out;
    for (Int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace detail

// Conjugacy at depth via the finite-factor families: the odometers are
// conjugate iff each chain group of one is eventually absorbed by the other
// (the chains interleave).  A refutation names a group in one family whose
// ff-containment in the other is refuted, coarsened to a scalar prime
// lattice when one suffices.
inline FFVerdict conjugate_at_depth(const OdometerSpec& a, const OdometerSpec& b) {
    FFVerdict v;
    v.depth = std::max(a.depth(), b.depth());
    bool inconclusive = false;
    auto check_side = [&](const OdometerSpec& absorber, const OdometerSpec& other) -> std::optional<FFVerdict> {
        for (int j = 1; j <= other.depth(); ++j) {
            FFVerdict f = ff_contains(absorber, other.group(j));
            if (f.status == Status::Supported) continue;
            if (f.status == Status::Inconclusive) {
                inconclusive = true;
                continue;
            }
            FFVerdict r;
            r.status = Status::Refuted;
            r.depth = v.depth;
            r.witness_lattice = other.group(j);
            // Prefer the coarsest scalar certificate: p Z^d for a prime p.
            for (const Int& p : detail::prime_divisors(other.group(j).index())) {
                Lattice cand = Lattice::scalar(other.dim, p);
                if (ff_contains(other, cand).status != Status::Supported) continue;
                if (ff_contains(absorber, cand).status == Status::Refuted) {
                    r.witness_lattice = cand;
                    break;
                }
            }
            r.reason = "group " + r.witness_lattice->str() +
                       " admits a finite-factor certificate on one side and a refutation on the other";
            return r;
        }
        return std::nullopt;
    };
    if (auto r = check_side(a, b)) return *r;
    if (auto r = check_side(b, a)) return *r;
    if (inconclusive) {
        v.status = Status::Inconclusive;
        v.reason = "containment undecided for some chain group at this depth";
        return v;
    }
    v.status = Status::Supported;
    v.reason = "chains interleave: every group of each chain absorbs a group of the other";
    return v;
}

// Rectangular tower shapes: the canonical diagonal box of each chain group
// holds exactly one representative per coset.
inline std::vector<ShapeSpec> tower_shapes(const OdometerSpec& spec) {
    std::vector<ShapeSpec> out;
    for (const Lattice& g : spec.chain) {
        Vec e;
        for (int l = 0; l < g.dim(); ++l) e.push_back(g.diag(l));
        out.push_back(ShapeSpec::rect(e));
    }
    return out;
}

// The odometer realized as a stacking construction: level shapes are the
// rectangular tower shapes and the placements into level j+1 are the points
// of G_j inside F_{j+1} (all congruent to 0 mod G_j, with empty error set).
//
// This translation encoding exists only when each tower box is tiled by
// geometric translates of the previous one, i.e. every placement copy stays
// inside the next box.  Chains with skew canonical bases refine their
// towers as cylinder partitions instead (levels wrap around the box), which
// placements cannot express, and are rejected.
inline ConstructionSpec odometer_as_construction(const OdometerSpec& spec) {
    ConstructionSpec c;
    c.dim = spec.dim;
    std::vector<ShapeSpec> shapes = tower_shapes(spec);
    for (int j = 1; j <= spec.depth(); ++j) {
        const Vec& outer = shapes[static_cast<size_t>(j - 1)].extents;
        Level lvl{shapes[static_cast<size_t>(j - 1)], {}};
        if (j > 1) {
            const Vec& inner = shapes[static_cast<size_t>(j - 2)].extents;
            for (const Vec& p : lattice_points_in_box(spec.group(j - 1), outer)) {
                for (size_t i = 0; i < p.size(); ++i)
                    if (p[i] + inner[i] > outer[i])
                        throw std::invalid_argument(
                            "chain boxes do not tile: level " + std::to_string(j) +
                            " copy at " + vec_str(p) + " escapes the tower shape");
                lvl.placements.push_back(ArithProg::single(p));
            }
        }
        c.levels.push_back(std::move(lvl));
    }
    return c;
}

}  // namespace rankone
