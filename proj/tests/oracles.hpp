#pragma once

// Brute-force oracles for the property tests: independent of the library's
// algorithms (no Hermite elimination, no recursion on the triangular basis),
// deliberately dumb and enumeration-based.  Test instances are generated
// from a known canonical triangular matrix whose columns are then scrambled
// by lattice-preserving moves, so the expected canonical form is known by
// construction.

#include <random>
#include <set>
#include <vector>

#include "rankone/rankone.hpp"

namespace oracles {

using rankone::Int;
using rankone::Rat;
using rankone::Vec;

// ---------------------------------------------------------------------------
// Instance generation.

struct CanonicalInstance {
    int dim;
    std::vector<Vec> canonical_columns;  // the expected canonicalize() output
    std::vector<Vec> generators;         // scrambled spanning set
};

inline Vec random_diag(std::mt19937_64& rng, int dim, long max_index) {
    Vec diag(static_cast<size_t>(dim), Int(1));
    long prod = 1;
    for (int i = 0; i < dim; ++i) {
        std::uniform_int_distribution<long> pick(1, std::max(1L, max_index / prod));
        long a = pick(rng);
        diag[static_cast<size_t>(i)] = a;
        prod *= a;
    }
    std::shuffle(diag.begin(), diag.end(), rng);
    return diag;
}

inline CanonicalInstance random_instance(std::mt19937_64& rng, int dim, long max_index) {
    CanonicalInstance inst;
    inst.dim = dim;
    Vec diag = random_diag(rng, dim, max_index);
    std::vector<Vec> cols(static_cast<size_t>(dim), rankone::zero_vec(dim));
    for (int l = 0; l < dim; ++l) {
        cols[static_cast<size_t>(l)][static_cast<size_t>(l)] = diag[static_cast<size_t>(l)];
        for (int k = 0; k < l; ++k) {
            long a = diag[static_cast<size_t>(k)].get_si();
            std::uniform_int_distribution<long> pick(0, a - 1);
            cols[static_cast<size_t>(l)][static_cast<size_t>(k)] = pick(rng);
        }
    }
    inst.canonical_columns = cols;
    // Lattice-preserving scramble: column combinations, duplicates, shuffle.
    std::vector<Vec> gens = cols;
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<size_t> which(0, gens.size() - 1);
    for (int extra = 0; extra < dim; ++extra) {
        Vec v = rankone::zero_vec(dim);
        for (const Vec& c : cols) rankone::add_scaled_inplace(v, c, Int(coeff(rng)));
        gens.push_back(v);
    }
    for (int moves = 0; moves < 6; ++moves) {
        size_t i = which(rng), j = which(rng);
        if (i != j) rankone::add_scaled_inplace(gens[i], gens[j], Int(coeff(rng)));
    }
    std::shuffle(gens.begin(), gens.end(), rng);
    inst.generators = std::move(gens);
    return inst;
}

// ---------------------------------------------------------------------------
// Membership by plain back-substitution against the known triangular matrix
// (elementary arithmetic, no shared code with the library).

inline bool member_of_columns(const std::vector<Vec>& cols, const Vec& v) {
    Vec w = v;
    const int d = static_cast<int>(v.size());
    for (int r = d - 1; r >= 0; --r) {
        const Int& pivot = cols[static_cast<size_t>(r)][static_cast<size_t>(r)];
        if (w[static_cast<size_t>(r)] % pivot != 0) return false;
        Int c = w[static_cast<size_t>(r)] / pivot;
        for (int i = 0; i <= r; ++i) w[static_cast<size_t>(i)] -= c * cols[static_cast<size_t>(r)][static_cast<size_t>(i)];
    }
    for (const Int& x : w)
        if (x != 0) return false;
    return true;
}

// All points of the dim-dimensional box [0, side)^dim.
inline std::vector<Vec> box_points(int dim, long side) {
    std::vector<Vec> out;
    Vec cur = rankone::zero_vec(dim);
    auto rec = [&](auto&& self, int axis) -> void {
        if (axis == dim) {
            out.push_back(cur);
            return;
        }
        for (long x = 0; x < side; ++x) {
            cur[static_cast<size_t>(axis)] = x;
            self(self, axis + 1);
        }
    };
    rec(rec, 0);
    return out;
}

// Minimal-column search over an enumerated point set: column l is the
// lattice vector supported on coordinates 0..l with minimal positive l-th
// coordinate, upper entries reduced by the earlier columns.
inline std::vector<Vec> canonical_by_search(int dim, const std::vector<Vec>& generator_cols, long search) {
    std::vector<Vec> result;
    for (int l = 0; l < dim; ++l) {
        Vec best;
        for (long n = 1; n <= search; ++n) {
            // try n e_l + adjustments on earlier coordinates
            bool found = false;
            Vec probe = rankone::zero_vec(dim);
            probe[static_cast<size_t>(l)] = n;
            // search earlier coordinates over a small window
            std::vector<Vec> candidates{probe};
            for (int k = 0; k < l; ++k) {
                std::vector<Vec> next;
                for (const Vec& c : candidates)
                    for (long i = -search; i <= search; ++i) {
                        Vec v = c;
                        v[static_cast<size_t>(k)] = i;
                        next.push_back(v);
                    }
                candidates = next;
            }
            for (const Vec& c : candidates)
                if (member_of_columns(generator_cols, c)) {
                    best = c;
                    found = true;
                    break;
                }
            if (found) break;
        }
        if (best.empty()) return {};  // search window too small; caller treats as failure
        for (int k = l - 1; k >= 0; --k) {
            const Int& akk = result[static_cast<size_t>(k)][static_cast<size_t>(k)];
            Int q = rankone::floordiv(best[static_cast<size_t>(k)], akk);
            for (int i = 0; i <= k; ++i)
                best[static_cast<size_t>(i)] -= q * result[static_cast<size_t>(k)][static_cast<size_t>(i)];
        }
        result.push_back(best);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Shape and histogram oracles.

inline std::map<Vec, Int> histogram_by_points(const rankone::ShapeSpec& shape, const rankone::Lattice& lat) {
    std::map<Vec, Int> counts;
    for (const Vec& p : shape.enumerate(Int(2000000))) counts[lat.reduce_vec(p)] += 1;
    return counts;
}

inline Rat deficiency_by_points(const rankone::ShapeSpec& shape, const Vec& v) {
    std::set<Vec> f, fv;
    for (const Vec& p : shape.enumerate(Int(2000000))) {
        f.insert(p);
        fv.insert(rankone::add(p, v));
    }
    Int sym = 0;
    for (const Vec& p : f)
        if (!fv.count(p)) ++sym;
    for (const Vec& p : fv)
        if (!f.count(p)) ++sym;
    return rankone::make_rat(sym, Int(f.size()));
}

// Exhaustive best coset set: try all 2^(#residues) subsets.
inline std::pair<std::set<Vec>, Rat> best_residue_by_subsets(const rankone::ResidueHistogram& hist_i,
                                                             const rankone::ResidueHistogram& hist_f) {
    std::vector<Vec> reps;
    for (const auto& [rep, cnt] : hist_f.counts) reps.push_back(rep);
    const size_t n = reps.size();
    Rat best_ratio(2);
    std::set<Vec> best;
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        Int diff = 0;
        std::set<Vec> d;
        for (size_t i = 0; i < n; ++i) {
            Int ci = 0, cf = hist_f.counts.at(reps[i]);
            if (auto it = hist_i.counts.find(reps[i]); it != hist_i.counts.end()) ci = it->second;
            if (mask & (size_t{1} << i)) {
                diff += cf - ci;
                d.insert(reps[i]);
            } else {
                diff += ci;
            }
        }
        Rat ratio = rankone::make_rat(diff, hist_i.total);
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best = d;
        }
    }
    return {best, best_ratio};
}

}  // namespace oracles
