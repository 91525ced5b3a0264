#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rankone/vec.hpp"

namespace rankone {

struct RankDeficient : std::runtime_error {
    explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

struct NotComparable : std::runtime_error {
    explicit NotComparable(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Unimodular column operations bringing a set of columns (each of height
// `rows`, possibly followed by shadow entries used for kernel extraction)
// into column echelon form: after the call, `pivot_of_row[r]` names the
// column whose lowest nonzero entry sits at row r, or -1 if row r has no
// pivot.  Columns not assigned to any row have zeros in all `rows` rows.
inline std::vector<int> column_echelon(std::vector<Vec>& cols, int rows) {
    std::vector<int> pivot_of_row(static_cast<size_t>(rows), -1);
    std::vector<bool> retired(cols.size(), false);
    for (int r = rows - 1; r >= 0; --r) {
        const size_t ur = static_cast<size_t>(r);
        int pivot = -1;
        for (size_t j = 0; j < cols.size(); ++j) {
            if (retired[j] || cols[j][ur] == 0) continue;
            if (pivot == -1) {
                pivot = static_cast<int>(j);
                continue;
            }
            // Fold column j into the pivot via an extended gcd step.
            const size_t up = static_cast<size_t>(pivot);
            Int s, t;
            Int g = ext_gcd(cols[up][ur], cols[j][ur], s, t);
            Int cp = cols[up][ur] / g, cj = cols[j][ur] / g;
            Vec np(cols[up].size()), nj(cols[j].size());
            for (size_t i = 0; i < cols[up].size(); ++i) {
                np[i] = s * cols[up][i] + t * cols[j][i];
                nj[i] = cp * cols[j][i] - cj * cols[up][i];
            }
            cols[up] = std::move(np);
            cols[j] = std::move(nj);
        }
        if (pivot == -1) continue;
        const size_t up = static_cast<size_t>(pivot);
        if (cols[up][ur] < 0)
            for (Int& x : cols[up]) x = -x;
        pivot_of_row[ur] = pivot;
        retired[up] = true;
    }
    return pivot_of_row;
}

}  // namespace detail

class Residue;

// Finite-index subgroup of Z^d in canonical upper-triangular column form:
// column j generates the j-th basis vector, diagonal entries are positive,
// entries below the diagonal are zero, and each off-diagonal entry a_{k,l}
// (k<l) is reduced into [0, a_{k,k}).  Two lattices are equal as subgroups
// exactly when their matrices are identical.
class Lattice {
public:
    static Lattice canonicalize(int dim, const std::vector<Vec>& generators);
    static Lattice identity(int dim) { return scalar(dim, 1); }
    static Lattice scalar(int dim, const Int& c) {
        Vec d(static_cast<size_t>(dim), c);
        return diagonal(d);
    }
    static Lattice diagonal(const Vec& diag) {
        std::vector<Vec> cols;
        const int d = static_cast<int>(diag.size());
        for (int j = 0; j < d; ++j) cols.push_back(scaled(unit_vec(d, j), diag[static_cast<size_t>(j)]));
        return canonicalize(d, cols);
    }
    // Basis matrix given as columns; canonicalized on entry.
    static Lattice from_columns(const std::vector<Vec>& cols) {
        if (cols.empty()) throw RankDeficient("empty generator list");
        return canonicalize(static_cast<int>(cols[0].size()), cols);
    }

    int dim() const { return dim_; }
    const std::vector<Vec>& columns() const { return cols_; }
    const Int& entry(int row, int col) const { return cols_[static_cast<size_t>(col)][static_cast<size_t>(row)]; }
    const Int& diag(int l) const { return entry(l, l); }

    Int index() const {
        Int p = 1;
        for (int l = 0; l < dim_; ++l) p *= diag(l);
        return p;
    }

    bool contains(const Vec& v) const {
        Vec w = v;
        for (int r = dim_ - 1; r >= 0; --r) {
            const size_t ur = static_cast<size_t>(r);
            if (emod(w[ur], diag(r)) != 0) return false;
            add_scaled_inplace(w, cols_[ur], -(w[ur] / diag(r)));
        }
        return true;
    }

    // Canonical representative of v + L in the box prod_l [0, a_{l,l}).
    Vec reduce_vec(const Vec& v) const {
        Vec w = v;
        for (int r = dim_ - 1; r >= 0; --r) {
            const size_t ur = static_cast<size_t>(r);
            add_scaled_inplace(w, cols_[ur], -floordiv(w[ur], diag(r)));
        }
        return w;
    }

    Residue reduce(const Vec& v) const;

    // All canonical representatives, ordered lexicographically.
    std::vector<Vec> fundamental_domain() const {
        std::vector<Vec> reps;
        Vec cur = zero_vec(dim_);
        enumerate_box(0, cur, reps);
        return reps;
    }

    // Row-major flattening; the canonical sort key for enumeration order.
    Vec flat() const {
        Vec f;
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) f.push_back(entry(r, c));
        return f;
    }

    bool operator==(const Lattice& o) const { return dim_ == o.dim_ && cols_ == o.cols_; }
    bool operator!=(const Lattice& o) const { return !(*this == o); }
    bool operator<(const Lattice& o) const { return flat() < o.flat(); }

    std::string str() const {
        std::string s = "[";
        for (int j = 0; j < dim_; ++j) {
            if (j) s += " ";
            s += vec_str(cols_[static_cast<size_t>(j)]);
        }
        return s + "]";
    }

private:
    Lattice(int dim, std::vector<Vec> cols) : dim_(dim), cols_(std::move(cols)) {}

    void enumerate_box(int axis, Vec& cur, std::vector<Vec>& out) const {
        if (axis == dim_) {
            out.push_back(cur);
            return;
        }
        const size_t ua = static_cast<size_t>(axis);
        for (Int x = 0; x < diag(axis); ++x) {
            cur[ua] = x;
            enumerate_box(axis + 1, cur, out);
        }
        cur[ua] = 0;
    }

    int dim_;
    std::vector<Vec> cols_;  // cols_[j] = column j
};

struct Residue {
    Lattice lattice;
    Vec rep;

    bool operator==(const Residue& o) const { return lattice == o.lattice && rep == o.rep; }
    bool operator!=(const Residue& o) const { return !(*this == o); }
};

inline Residue Lattice::reduce(const Vec& v) const { return Residue{*this, reduce_vec(v)}; }

inline Lattice Lattice::canonicalize(int dim, const std::vector<Vec>& generators) {
    if (dim <= 0) throw std::invalid_argument("dimension must be positive");
    for (const Vec& g : generators)
        if (static_cast<int>(g.size()) != dim) throw std::invalid_argument("generator of wrong length");
    std::vector<Vec> cols = generators;
    std::vector<int> pivot_of_row = detail::column_echelon(cols, dim);
    std::vector<Vec> basis(static_cast<size_t>(dim));
    for (int r = 0; r < dim; ++r) {
        if (pivot_of_row[static_cast<size_t>(r)] == -1)
            throw RankDeficient("generators span a rank-deficient subgroup (infinite index)");
        basis[static_cast<size_t>(r)] = cols[static_cast<size_t>(pivot_of_row[static_cast<size_t>(r)])];
    }
    // Reduce off-diagonal entries into [0, a_{k,k}); working upward keeps
    // already-reduced rows intact.
    for (int l = 0; l < dim; ++l)
        for (int k = l - 1; k >= 0; --k) {
            const Int q = floordiv(basis[static_cast<size_t>(l)][static_cast<size_t>(k)],
                                   basis[static_cast<size_t>(k)][static_cast<size_t>(k)]);
            if (q != 0) add_scaled_inplace(basis[static_cast<size_t>(l)], basis[static_cast<size_t>(k)], -q);
        }
    return Lattice(dim, std::move(basis));
}

// Basis of {x in Z^m : A x = 0} for A given by m columns of height `rows`.
inline std::vector<Vec> kernel_basis(const std::vector<Vec>& a_columns, int rows) {
    const size_t m = a_columns.size();
    std::vector<Vec> stacked(m);
    for (size_t j = 0; j < m; ++j) {
        stacked[j] = a_columns[j];
        for (size_t i = 0; i < m; ++i) stacked[j].push_back(i == j ? Int(1) : Int(0));
    }
    detail::column_echelon(stacked, rows);
    std::vector<Vec> kernel;
    for (const Vec& col : stacked) {
        bool top_zero = true;
        for (int r = 0; r < rows && top_zero; ++r) top_zero = (col[static_cast<size_t>(r)] == 0);
        if (!top_zero) continue;
        kernel.emplace_back(col.begin() + rows, col.end());
    }
    return kernel;
}

inline Lattice intersect(const Lattice& a, const Lattice& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
    const int d = a.dim();
    // v = A x = B y  <=>  (x,y) in ker [A | -B]; the intersection is A * x.
    std::vector<Vec> stacked = a.columns();
    for (const Vec& col : b.columns()) stacked.push_back(neg(col));
    std::vector<Vec> kernel = kernel_basis(stacked, d);
    std::vector<Vec> gens;
    for (const Vec& k : kernel) {
        Vec v = zero_vec(d);
        for (int j = 0; j < d; ++j) add_scaled_inplace(v, a.columns()[static_cast<size_t>(j)], k[static_cast<size_t>(j)]);
        gens.push_back(std::move(v));
    }
    return Lattice::canonicalize(d, gens);
}

inline Lattice join(const Lattice& a, const Lattice& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("join: dimension mismatch");
    std::vector<Vec> gens = a.columns();
    for (const Vec& col : b.columns()) gens.push_back(col);
    return Lattice::canonicalize(a.dim(), gens);
}

inline bool is_sublattice(const Lattice& sub, const Lattice& super) {
    if (sub.dim() != super.dim()) throw std::invalid_argument("is_sublattice: dimension mismatch");
    for (const Vec& col : sub.columns())
        if (!super.contains(col)) return false;
    return true;
}

inline Residue quotient_add(const Residue& a, const Residue& b) {
    if (a.lattice != b.lattice) throw NotComparable("quotient_add: residues over different lattices");
    return a.lattice.reduce(add(a.rep, b.rep));
}

inline Residue quotient_neg(const Residue& a) { return a.lattice.reduce(neg(a.rep)); }

inline Residue quotient_project(const Residue& r, const Lattice& coarser) {
    if (!is_sublattice(r.lattice, coarser))
        throw NotComparable("quotient_project: target is not a supergroup");
    return coarser.reduce(r.rep);
}

// Smallest t > 0 with t*v in L; divides the index.
inline Int order_in_quotient(const Lattice& lat, const Vec& v) {
    const Int n = lat.index();
    std::vector<Int> divisors;
    for (Int a = 1; a * a <= n; ++a) {
        if (n % a != 0) continue;
        divisors.push_back(a);
        if (a != n / a) divisors.push_back(n / a);
    }
    std::sort(divisors.begin(), divisors.end());
    for (const Int& t : divisors)
        if (lat.contains(scaled(v, t))) return t;
    return n;  // unreachable: order divides the group order
}

// Exponent of Z^d / L: smallest e with e*Z^d contained in L.
inline Int quotient_exponent(const Lattice& lat) {
    Int e = 1;
    for (int i = 0; i < lat.dim(); ++i) e = lcm(e, order_in_quotient(lat, unit_vec(lat.dim(), i)));
    return e;
}

// All canonical lattices of index <= max_index, each exactly once, ordered
// by (index, row-major matrix).  Iterates upper-triangular matrices with
// reduced off-diagonals, which are in bijection with the lattices.
inline std::vector<Lattice> enumerate_sublattices(int dim, const Int& max_index) {
    if (max_index < 1) throw std::invalid_argument("max_index must be >= 1");
    std::vector<Lattice> out;
    Vec diag(static_cast<size_t>(dim), Int(1));

    auto fill_offdiag = [&](auto&& self, std::vector<Vec>& cols, int k, int l) -> void {
        if (l == dim) {
            out.push_back(Lattice::from_columns(cols));
            return;
        }
        int nk = k + 1, nl = l;
        if (nk >= l) {
            nk = 0;
            nl = l + 1;
        }
        for (Int x = 0; x < diag[static_cast<size_t>(k)]; ++x) {
            cols[static_cast<size_t>(l)][static_cast<size_t>(k)] = x;
            self(self, cols, nk, nl);
        }
        cols[static_cast<size_t>(l)][static_cast<size_t>(k)] = 0;
    };

    auto fill_diag = [&](auto&& self, int axis, Int prod) -> void {
        if (axis == dim) {
            std::vector<Vec> cols;
            for (int j = 0; j < dim; ++j) cols.push_back(scaled(unit_vec(dim, j), diag[static_cast<size_t>(j)]));
            if (dim == 1)
                out.push_back(Lattice::from_columns(cols));
            else
                fill_offdiag(fill_offdiag, cols, 0, 1);
            return;
        }
        for (Int a = 1; prod * a <= max_index; ++a) {
            diag[static_cast<size_t>(axis)] = a;
            self(self, axis + 1, prod * a);
        }
        diag[static_cast<size_t>(axis)] = 1;
    };
    fill_diag(fill_diag, 0, 1);

    std::sort(out.begin(), out.end(), [](const Lattice& a, const Lattice& b) {
        const Int ia = a.index(), ib = b.index();
        if (ia != ib) return ia < ib;
        return a.flat() < b.flat();
    });
    return out;
}

// Points of L inside the box prod_l [0, extents[l]), via the triangular
// structure (no box enumeration).
inline std::vector<Vec> lattice_points_in_box(const Lattice& lat, const Vec& extents) {
    const int d = lat.dim();
    std::vector<Vec> out;
    Vec coeff(static_cast<size_t>(d), Int(0));
    Vec partial = zero_vec(d);

    auto rec = [&](auto&& self, int r, Vec acc) -> void {
        if (r < 0) {
            out.push_back(acc);
            return;
        }
        const size_t ur = static_cast<size_t>(r);
        const Int& a = lat.diag(r);
        // acc holds sum of chosen columns for rows > r; coordinate r of the
        // final point is acc[r] + c * a, required in [0, extents[r]).
        Int lo = ceildiv(-acc[ur], a);
        Int hi = floordiv(extents[ur] - 1 - acc[ur], a);
        for (Int c = lo; c <= hi; ++c) {
            Vec next = acc;
            add_scaled_inplace(next, lat.columns()[ur], c);
            self(self, r - 1, std::move(next));
        }
    };
    rec(rec, d - 1, zero_vec(d));
    std::sort(out.begin(), out.end());
    return out;
}

// Counting device for per-coset masses; counts are exact and may be huge.
struct ResidueHistogram {
    Lattice lattice;
    std::map<Vec, Int> counts;
    Int total = 0;

    void bump(const Vec& canonical_rep, const Int& by) {
        if (by == 0) return;
        counts[canonical_rep] += by;
        total += by;
    }

    // Largest bucket with lexicographically-least tie break.
    std::pair<Vec, Int> max_bucket() const {
        Vec best_rep = zero_vec(lattice.dim());
        Int best = 0;
        for (const auto& [rep, cnt] : counts)
            if (cnt > best) {
                best = cnt;
                best_rep = rep;
            }
        return {best_rep, best};
    }
};

// Convolution over Z^d/G; the workhorse behind descendant histograms.
inline ResidueHistogram convolve(const ResidueHistogram& a, const ResidueHistogram& b) {
    ResidueHistogram out{a.lattice, {}, 0};
    for (const auto& [ra, ca] : a.counts)
        for (const auto& [rb, cb] : b.counts) out.bump(a.lattice.reduce_vec(add(ra, rb)), ca * cb);
    return out;
}

}  // namespace rankone
