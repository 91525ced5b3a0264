#include "doctest.h"
#include "oracles.hpp"
#include "rankone/rankone.hpp"

using namespace rankone;

namespace {

Lattice lat2(long a11, long a12, long a21, long a22) {
    return Lattice::canonicalize(2, {{Int(a11), Int(a21)}, {Int(a12), Int(a22)}});
}

const Lattice kTwoTwo = Lattice::scalar(2, 2);            // 2Z x 2Z
const Lattice kTwoOne = Lattice::diagonal({Int(2), Int(1)});  // 2Z x Z
const Lattice kOneTwo = Lattice::diagonal({Int(1), Int(2)});  // Z x 2Z
const Lattice kSkew = lat2(2, 1, 0, 3);                    // span{(2,0),(1,3)}
const Lattice kSumEven = Lattice::canonicalize(2, {{Int(2), Int(0)}, {Int(1), Int(1)}});

}  // namespace

TEST_CASE("canonicalize: worked examples") {
    CHECK(Lattice::canonicalize(2, {{Int(1), Int(0)}, {Int(0), Int(1)}}) == Lattice::identity(2));

    Lattice skew = Lattice::canonicalize(2, {{Int(2), Int(0)}, {Int(1), Int(3)}});
    CHECK(skew.columns()[0] == Vec{Int(2), Int(0)});
    CHECK(skew.columns()[1] == Vec{Int(1), Int(3)});
    CHECK(skew.index() == 6);

    Lattice sum_even = Lattice::canonicalize(2, {{Int(2), Int(0)}, {Int(0), Int(2)}, {Int(1), Int(1)}});
    CHECK(sum_even.columns()[0] == Vec{Int(2), Int(0)});
    CHECK(sum_even.columns()[1] == Vec{Int(1), Int(1)});
    CHECK(sum_even.index() == 2);
}

TEST_CASE("canonicalize: rank-deficient generators are reported") {
    CHECK_THROWS_AS(Lattice::canonicalize(2, {{Int(1), Int(2)}, {Int(2), Int(4)}}), RankDeficient);
    CHECK_THROWS_AS(Lattice::canonicalize(2, {}), RankDeficient);
}

TEST_CASE("index of triangular matrices") {
    CHECK(Lattice::identity(2).index() == 1);
    CHECK(kSkew.index() == 6);
    CHECK(kTwoTwo.index() == 4);
}

TEST_CASE("contains") {
    CHECK(kTwoTwo.contains({Int(2), Int(0)}));
    CHECK_FALSE(kSkew.contains({Int(1), Int(0)}));
    CHECK(kSkew.contains({Int(3), Int(3)}));
}

TEST_CASE("reduce into the fundamental box") {
    CHECK(kTwoTwo.reduce_vec({Int(5), Int(-3)}) == Vec{Int(1), Int(1)});
    CHECK(kSkew.reduce_vec({Int(0), Int(3)}) == Vec{Int(1), Int(0)});
    CHECK(Lattice::identity(2).reduce_vec({Int(17), Int(-5)}) == Vec{Int(0), Int(0)});
}

TEST_CASE("intersect and join") {
    CHECK(intersect(kTwoOne, kOneTwo) == kTwoTwo);
    CHECK(intersect(kSumEven, kTwoOne) == kTwoTwo);
    CHECK(intersect(kSkew, kSkew) == kSkew);
    CHECK(join(kSkew, kSkew) == kSkew);
    CHECK(join(kTwoOne, kOneTwo) == Lattice::identity(2));
}

TEST_CASE("is_sublattice") {
    CHECK(is_sublattice(kTwoTwo, kTwoOne));
    CHECK_FALSE(is_sublattice(kTwoOne, kTwoTwo));
    CHECK(is_sublattice(kSkew, kSkew));
}

TEST_CASE("quotient arithmetic") {
    Residue r11 = kTwoTwo.reduce({Int(1), Int(1)});
    CHECK(quotient_add(r11, r11).rep == Vec{Int(0), Int(0)});
    CHECK(quotient_project(r11, kTwoOne).rep == Vec{Int(1), Int(0)});
    // translation by (0,1) on Z^2/(2Z x 2Z)
    CHECK(quotient_add(kTwoTwo.reduce({Int(0), Int(1)}), r11).rep == Vec{Int(1), Int(0)});
    CHECK_THROWS_AS(quotient_project(kTwoOne.reduce({Int(0), Int(0)}), kTwoTwo), NotComparable);
}

TEST_CASE("enumerate_sublattices small counts and order") {
    auto all1 = enumerate_sublattices(2, 1);
    REQUIRE(all1.size() == 1);
    CHECK(all1[0] == Lattice::identity(2));

    auto upto2 = enumerate_sublattices(2, 2);
    std::vector<Lattice> exactly2;
    for (const Lattice& l : upto2)
        if (l.index() == 2) exactly2.push_back(l);
    REQUIRE(exactly2.size() == 3);
    CHECK(exactly2[0] == kOneTwo);
    CHECK(exactly2[1] == kTwoOne);
    CHECK(exactly2[2] == kSumEven);

    int exactly3 = 0;
    for (const Lattice& l : enumerate_sublattices(2, 3))
        if (l.index() == 3) ++exactly3;
    CHECK(exactly3 == 4);
}

TEST_CASE("enumerate_sublattices counts match the divisor sums") {
    // # of index-n sublattices of Z^2 equals the sum of divisors of n.
    auto sigma = [](long n) {
        long s = 0;
        for (long d = 1; d <= n; ++d)
            if (n % d == 0) s += d;
        return s;
    };
    auto pool = enumerate_sublattices(2, 12);
    std::map<long, long> by_index;
    for (const Lattice& l : pool) by_index[l.index().get_si()]++;
    for (long n = 1; n <= 12; ++n) CHECK(by_index[n] == sigma(n));
    for (size_t i = 0; i + 1 < pool.size(); ++i) {
        CHECK(pool[i].index() <= pool[i + 1].index());
        CHECK(pool[i].flat() != pool[i + 1].flat());
    }
}

TEST_CASE("canonicity under scrambling: d=2 and d=3 instances") {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = trial % 3 == 2 ? 3 : 2;
        auto inst = oracles::random_instance(rng, dim, 12);
        Lattice expected = Lattice::from_columns(inst.canonical_columns);
        Lattice got = Lattice::canonicalize(dim, inst.generators);
        CHECK(got == expected);
        // order/duplication invariance
        std::vector<Vec> doubled = inst.generators;
        doubled.insert(doubled.end(), inst.generators.rbegin(), inst.generators.rend());
        CHECK(Lattice::canonicalize(dim, doubled) == expected);
    }
}

TEST_CASE("minimal-column search oracle agrees with canonicalize") {
    std::mt19937_64 rng(977);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = trial % 2 ? 3 : 2;
        auto inst = oracles::random_instance(rng, dim, 8);
        auto searched = oracles::canonical_by_search(dim, inst.canonical_columns, 9);
        REQUIRE_FALSE(searched.empty());
        CHECK(Lattice::from_columns(searched) == Lattice::canonicalize(dim, inst.generators));
    }
}

TEST_CASE("membership is equivalent to zero reduction") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<long> coord(-30, 30);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = trial % 2 ? 3 : 2;
        auto inst = oracles::random_instance(rng, dim, 12);
        Lattice l = Lattice::canonicalize(dim, inst.generators);
        for (int probe = 0; probe < 40; ++probe) {
            Vec v(static_cast<size_t>(dim));
            for (auto& x : v) x = coord(rng);
            CHECK(l.contains(v) == is_zero(l.reduce_vec(v)));
            CHECK(l.contains(v) == oracles::member_of_columns(inst.canonical_columns, v));
        }
    }
}

TEST_CASE("reduce is constant exactly on cosets") {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<long> coord(-20, 20);
    Lattice l = kSkew;
    for (int probe = 0; probe < 200; ++probe) {
        Vec v{Int(coord(rng)), Int(coord(rng))}, w{Int(coord(rng)), Int(coord(rng))};
        CHECK((l.reduce_vec(v) == l.reduce_vec(w)) == l.contains(sub(v, w)));
    }
}

TEST_CASE("intersection matches pointwise membership over a box") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        const int dim = trial % 4 == 3 ? 3 : 2;
        auto a = oracles::random_instance(rng, dim, dim == 3 ? 4 : 12);
        auto b = oracles::random_instance(rng, dim, dim == 3 ? 4 : 12);
        Lattice la = Lattice::from_columns(a.canonical_columns);
        Lattice lb = Lattice::from_columns(b.canonical_columns);
        Lattice inter = intersect(la, lb);
        CHECK(inter.index() % lcm(la.index(), lb.index()) == 0);
        const long side = lcm(la.index(), lb.index()).get_si();
        for (const Vec& v : oracles::box_points(dim, side))
            CHECK(inter.contains(v) == (la.contains(v) && lb.contains(v)));
        // join: smallest lattice containing both
        Lattice j = join(la, lb);
        for (const Vec& c : la.columns()) CHECK(j.contains(c));
        for (const Vec& c : lb.columns()) CHECK(j.contains(c));
        CHECK(la.index() % j.index() == 0);
        CHECK(lb.index() % j.index() == 0);
    }
}

TEST_CASE("quotient group laws over full residue sets") {
    for (const Lattice& l : {kSkew, kSumEven, Lattice::diagonal({Int(3), Int(4)})}) {
        auto reps = l.fundamental_domain();
        REQUIRE(Int(reps.size()) == l.index());
        Residue zero = l.reduce(zero_vec(2));
        for (const Vec& a : reps) {
            Residue ra{l, a};
            CHECK(quotient_add(ra, zero) == ra);
            CHECK(quotient_add(ra, quotient_neg(ra)) == zero);
            for (const Vec& b : reps) {
                Residue rb{l, b};
                CHECK(quotient_add(ra, rb) == quotient_add(rb, ra));
                for (const Vec& c : reps) {
                    Residue rc{l, c};
                    CHECK(quotient_add(quotient_add(ra, rb), rc) == quotient_add(ra, quotient_add(rb, rc)));
                }
            }
        }
    }
}

TEST_CASE("order and exponent in the quotient") {
    CHECK(order_in_quotient(kTwoTwo, {Int(1), Int(0)}) == 2);
    CHECK(order_in_quotient(kSkew, {Int(0), Int(1)}) == 6);
    CHECK(quotient_exponent(kTwoTwo) == 2);
    CHECK(quotient_exponent(kSkew) == 6);
}

TEST_CASE("shape histogram: worked examples") {
    ResidueHistogram h1 = shape_coset_histogram(ShapeSpec::rect({Int(2), Int(2)}), kTwoTwo);
    CHECK(h1.total == 4);
    for (const auto& [rep, cnt] : h1.counts) CHECK(cnt == 1);

    ResidueHistogram h2 = shape_coset_histogram(ShapeSpec::rect({Int(3), Int(3)}), kTwoTwo);
    CHECK(h2.counts.at({Int(0), Int(0)}) == 4);
    CHECK(h2.counts.at({Int(1), Int(0)}) == 2);
    CHECK(h2.counts.at({Int(0), Int(1)}) == 2);
    CHECK(h2.counts.at({Int(1), Int(1)}) == 1);

    ResidueHistogram h3 = shape_coset_histogram(ShapeSpec::rect({Int(6), Int(6)}), kSkew);
    CHECK(h3.counts.size() == 6);
    for (const auto& [rep, cnt] : h3.counts) CHECK(cnt == 6);
}

TEST_CASE("shape histogram equals per-point enumeration") {
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<long> ext(1, 21);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = trial % 2 ? 3 : 2;
        auto inst = oracles::random_instance(rng, dim, 12);
        Lattice l = Lattice::from_columns(inst.canonical_columns);
        Vec extents(static_cast<size_t>(dim));
        for (auto& e : extents) e = ext(rng);
        ShapeSpec shape = ShapeSpec::rect(extents);
        if (shape.size() > 10000) continue;
        ResidueHistogram h = shape_coset_histogram(shape, l);
        CHECK(h.total == shape.size());
        CHECK(h.counts == oracles::histogram_by_points(shape, l));
    }
}

TEST_CASE("equidistribution of squares against a fixed lattice") {
    // max_g |#(F_n cap (g+L))/#F_n - 1/index| <= 2*d*index/n for n >= index
    for (const Lattice& l : {kSkew, kSumEven, Lattice::diagonal({Int(3), Int(4)})}) {
        const Int index = l.index();
        Rat prev_bound(2);
        for (long n = index.get_si(); n <= 60; n += 7) {
            ShapeSpec f = ShapeSpec::rect({Int(n), Int(n)});
            ResidueHistogram h = shape_coset_histogram(f, l);
            Rat worst(0);
            for (const Vec& rep : l.fundamental_domain()) {
                Int cnt = 0;
                if (auto it = h.counts.find(rep); it != h.counts.end()) cnt = it->second;
                Rat err = make_rat(cnt, h.total) - make_rat(1, index);
                if (err < 0) err = -err;
                worst = std::max(worst, err);
            }
            CHECK(worst <= make_rat(4 * index, Int(n)));
        }
    }
}

TEST_CASE("lattice points inside a box") {
    auto pts = lattice_points_in_box(kSkew, {Int(4), Int(9)});
    // index 6: a 4x9 box holds 36/6 = 6 lattice points
    CHECK(pts.size() == 6);
    for (const Vec& p : pts) {
        CHECK(kSkew.contains(p));
        CHECK(p[0] >= 0);
        CHECK(p[0] < 4);
        CHECK(p[1] >= 0);
        CHECK(p[1] < 9);
    }
}

TEST_CASE("kernel basis annihilates the matrix") {
    std::vector<Vec> cols{{Int(2), Int(0)}, {Int(1), Int(3)}, {Int(0), Int(2)}, {Int(-1), Int(1)}};
    for (const Vec& k : kernel_basis(cols, 2)) {
        Vec sum = zero_vec(2);
        for (size_t j = 0; j < cols.size(); ++j) add_scaled_inplace(sum, cols[j], k[j]);
        CHECK(is_zero(sum));
        CHECK_FALSE(is_zero(k));
    }
}
