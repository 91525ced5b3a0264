#include "doctest.h"
#include "oracles.hpp"
#include "rankone/gallery.hpp"

using namespace rankone;

namespace {
const Rat kSixth(1, 6);
const Rat kQuarter(1, 4);
}  // namespace

TEST_CASE("deviation: worked values") {
    ConstructionSpec prod = gallery::build_construction("chacon-product", 3);
    auto [dev, g] = deviation(prod, 1, 2, Lattice::scalar(2, 2));
    CHECK(dev == Rat(5, 9));
    CHECK(g.rep == Vec{Int(1), Int(1)});

    ConstructionSpec horizontal = gallery::build_construction("horizontal-odometer-construction", 5);
    for (int m = 1; m < 5; ++m)
        for (int n = m + 1; n <= 5; ++n) {
            auto [hd, hg] = deviation(horizontal, m, n, Lattice::scalar(2, 2));
            CHECK(hd == Rat(0));
            CHECK(hg.rep == Vec{Int(0), Int(0)});
        }

    CHECK(deviation(prod, 1, 3, Lattice::identity(2)).first == Rat(0));
}

TEST_CASE("deviation is antitone under coarsening") {
    std::mt19937_64 rng(64);
    ConstructionSpec prod = gallery::build_construction("chacon-product", 4);
    for (int trial = 0; trial < 20; ++trial) {
        Lattice h = Lattice::from_columns(oracles::random_instance(rng, 2, 8).canonical_columns);
        Lattice g = intersect(h, Lattice::from_columns(oracles::random_instance(rng, 2, 6).canonical_columns));
        for (int m = 1; m <= 3; ++m)
            for (int n = m + 1; n <= 4; ++n)
                CHECK(deviation(prod, m, n, h).first <= deviation(prod, m, n, g).first);
    }
}

TEST_CASE("finite-factor: odometer construction is supported with zero deviation") {
    ConstructionSpec spec = gallery::build_construction("dyadic-z2-construction", 5);
    CriterionVerdict v = finite_factor_check(spec, Lattice::scalar(2, 2), kQuarter, 5);
    CHECK(v.status == Status::Supported);
    CHECK(v.start_level == 1);
    for (const DevEntry& e : v.table) CHECK(e.dev == Rat(0));
}

TEST_CASE("finite-factor: chacon product is refuted by forced vectors") {
    ConstructionSpec spec = gallery::build_construction("chacon-product", 5);
    CriterionVerdict v = finite_factor_check(spec, Lattice::scalar(2, 2), kSixth, 5);
    CHECK(v.status == Status::Refuted);
    CHECK_FALSE(v.witness_vectors.empty());
    for (const Vec& w : v.witness_vectors) CHECK_FALSE(Lattice::scalar(2, 2).contains(w));
}

TEST_CASE("finite-factor: non-Folner shapes gate the verdict") {
    ConstructionSpec spec = gallery::build_construction("horizontal-odometer-construction", 5);
    CriterionVerdict v = finite_factor_check(spec, Lattice::scalar(2, 2), kSixth, 5);
    CHECK(v.status == Status::Inconclusive);
    CHECK(v.folner_suspect);
    for (const DevEntry& e : v.table) CHECK(e.dev == Rat(0));
}

TEST_CASE("finite-factor: epsilon validation") {
    ConstructionSpec spec = gallery::build_construction("chacon-z", 3);
    CHECK_THROWS_AS(finite_factor_check(spec, Lattice::scalar(1, 2), Rat(0), 3), BadEpsilon);
    CHECK_THROWS_AS(finite_factor_check(spec, Lattice::scalar(1, 2), Rat(1), 3), BadEpsilon);
}

TEST_CASE("forcing bound: a frequent pair vector outside G caps the majority class") {
    // On exact instances: pair_fraction(v) >= 2*eps and v outside G imply
    // every residue misses at least an eps fraction of the descendants.
    std::mt19937_64 rng(12321);
    ConstructionSpec prod = gallery::build_construction("chacon-product", 4);
    for (int trial = 0; trial < 15; ++trial) {
        Lattice g = Lattice::from_columns(oracles::random_instance(rng, 2, 12).canonical_columns);
        for (int m = 1; m <= 3; ++m)
            for (int n = m + 1; n <= 4; ++n) {
                ResidueHistogram h = compose_hist(prod, m, n, g);
                for (const Vec& v : probe_vectors(prod, m, n)) {
                    if (g.contains(v)) continue;
                    Rat pf = pair_fraction(prod, m, n, v);
                    if (pf == 0) continue;
                    Rat eps = pf / Rat(2);
                    for (const Vec& rep : g.fundamental_domain()) {
                        Int cnt = 0;
                        if (auto it = h.counts.find(rep); it != h.counts.end()) cnt = it->second;
                        CHECK(Rat(1) - make_rat(cnt, h.total) >= eps);
                    }
                }
            }
    }
}

TEST_CASE("forced vectors of the chacon product generate everything") {
    ConstructionSpec spec = gallery::build_construction("chacon-product", 5);
    std::vector<Int> h = gallery::chacon_heights(5);
    ForcedClosure fc = forced_closure(spec, 5, kSixth);
    for (int m = 1; m <= 4; ++m) {
        const auto& forced = fc.scale_vectors[static_cast<size_t>(m - 1)];
        const Int& hm = h[static_cast<size_t>(m - 1)];
        CHECK(std::count(forced.begin(), forced.end(), Vec{hm, Int(0)}) == 1);
        CHECK(std::count(forced.begin(), forced.end(), Vec{Int(0), hm}) == 1);
    }
    REQUIRE(fc.stable.full_rank());
    CHECK(*fc.stable.as_lattice() == Lattice::identity(2));
}

TEST_CASE("forced vectors of the staggered construction pin the horizontal direction") {
    ConstructionSpec spec = gallery::build_construction("staggered-z2", 4);
    // The staggered row pairs have fraction 1/2, the vertical middle-row
    // pairs only 1/4, so the latter certify the criterion for eps <= 1/8.
    ForcedClosure fc = forced_closure(spec, 4, Rat(1, 8));
    for (int m = 1; m <= 2; ++m) {
        const auto& forced = fc.scale_vectors[static_cast<size_t>(m - 1)];
        Vec diag{Int(1), pow2(static_cast<unsigned long>(m))};
        Vec vert{Int(0), pow2(static_cast<unsigned long>(m))};
        CHECK(std::count(forced.begin(), forced.end(), diag) == 1);
        CHECK(std::count(forced.begin(), forced.end(), vert) == 1);
    }
    // scale 3 sees only one composite level at depth 4: the staggered pair
    CHECK(std::count(fc.scale_vectors[2].begin(), fc.scale_vectors[2].end(), Vec{Int(1), Int(8)}) == 1);
    CHECK(fc.stable.member({Int(1), Int(0)}));

    // At eps = 1/6 the vertical pairs fall below the 2*eps bar, but the
    // cross-scale span of the staggered vectors still pins (1,0).
    ForcedClosure weak = forced_closure(spec, 4, kSixth);
    CHECK(weak.stable.member({Int(1), Int(0)}));
}

TEST_CASE("constructions with placements inside G force nothing outside it") {
    ConstructionSpec spec = gallery::build_construction("dyadic-z2-construction", 5);
    ForcedScales fs = forced_scale_sets(spec, 5, kQuarter);
    for (int m = 1; m <= 4; ++m)
        for (const Vec& v : fs.sets[static_cast<size_t>(m - 1)])
            CHECK(pow_odometer(Lattice::scalar(2, 2), m).group(m).contains(v));
}

TEST_CASE("odometer-factor conjunction") {
    ConstructionSpec dyadic_c = gallery::build_construction("dyadic-z2-construction", 6);
    OdometerSpec dyadic = gallery::build_odometer("dyadic-z2", 4);
    CHECK(odometer_factor_check(dyadic_c, dyadic, kQuarter, 6).status == Status::Supported);

    ConstructionSpec prod = gallery::build_construction("chacon-product", 5);
    CriterionVerdict refuted = odometer_factor_check(prod, dyadic, kSixth, 5);
    CHECK(refuted.status == Status::Refuted);
    REQUIRE(refuted.witness_lattice.has_value());
    CHECK(*refuted.witness_lattice == Lattice::scalar(2, 2));

    OdometerSpec trivial = make_odometer({Lattice::identity(2)});
    CHECK(odometer_factor_check(prod, trivial, kSixth, 5).status == Status::Supported);
}

TEST_CASE("some-infinite-odometer scan") {
    SomeInfiniteResult dyadic =
        some_infinite_odometer_check(gallery::build_construction("dyadic-z2-construction", 6), 16, kQuarter, 6);
    CHECK(dyadic.verdict.status == Status::Supported);
    auto supported_contains = [&](const Lattice& l) {
        return std::count(dyadic.candidates.supported.begin(), dyadic.candidates.supported.end(), l) == 1;
    };
    CHECK(supported_contains(Lattice::identity(2)));
    CHECK(supported_contains(Lattice::scalar(2, 2)));
    CHECK(supported_contains(Lattice::scalar(2, 4)));
    CHECK(supported_contains(Lattice::diagonal({Int(2), Int(1)})));
    REQUIRE(dyadic.generated.has_value());
    // The generated odometer only reaches groups within the scan bound, so
    // compare against the dyadic chain truncated at the same resolution.
    CHECK(conjugate_at_depth(*dyadic.generated, gallery::build_odometer("dyadic-z2", 4)).status ==
          Status::Supported);

    SomeInfiniteResult chacon =
        some_infinite_odometer_check(gallery::build_construction("chacon-product", 5), 8, kSixth, 5);
    CHECK(chacon.verdict.status == Status::Refuted);
    REQUIRE(chacon.candidates.supported.size() == 1);
    CHECK(chacon.candidates.supported[0] == Lattice::identity(2));

    SomeInfiniteResult staggered =
        some_infinite_odometer_check(gallery::build_construction("staggered-z2", 5), 16, kSixth, 5);
    CHECK(staggered.verdict.status == Status::Supported);
    for (const Lattice& g : staggered.candidates.supported) CHECK(g.contains({Int(1), Int(0)}));
}

TEST_CASE("supported pool is closed under intersections within the scan") {
    SomeInfiniteResult res =
        some_infinite_odometer_check(gallery::build_construction("dyadic-z2-construction", 6), 16, kQuarter, 6);
    const auto& pool = res.candidates.supported;
    ConstructionSpec spec = gallery::build_construction("dyadic-z2-construction", 6);
    for (size_t i = 0; i < pool.size(); ++i)
        for (size_t j = i + 1; j < pool.size(); ++j) {
            CriterionVerdict v = finite_factor_check(spec, intersect(pool[i], pool[j]), kQuarter, 6);
            CHECK(v.status == Status::Supported);
        }
}

TEST_CASE("free-factor verdicts") {
    CHECK(free_factor_check(gallery::build_construction("staggered-z2", 4), 16, kSixth, 4).status ==
          Status::Refuted);
    CHECK(free_factor_check(gallery::build_construction("chacon-product", 5), 8, kSixth, 5).status ==
          Status::Refuted);
    CHECK(free_factor_check(gallery::build_construction("dyadic-z2-construction", 6), 16, kQuarter, 6).status ==
          Status::Supported);
    CHECK(free_factor_check(gallery::build_construction("horizontal-odometer-construction", 5), 8, kSixth, 5)
              .status == Status::Inconclusive);
}

TEST_CASE("best residue set: worked cases") {
    ConstructionSpec dyadic_c = gallery::build_construction("dyadic-z2-construction", 4);
    auto [d0, r0] = best_residue_set(dyadic_c, 1, 3, Lattice::scalar(2, 2));
    CHECK(d0 == std::vector<Vec>{{Int(0), Int(0)}});
    CHECK(r0 == Rat(0));

    // G = Z^d: the single residue is kept, the ratio counts the complement
    ConstructionSpec prod = gallery::build_construction("chacon-product", 3);
    auto [d1, r1] = best_residue_set(prod, 1, 2, Lattice::identity(2));
    CHECK(d1 == std::vector<Vec>{{Int(0), Int(0)}});
    Int f2 = prod.shape(2).size();
    CHECK(r1 == make_rat(f2 - 9, Int(9)));
}

TEST_CASE("best residue set beats exhaustive subset search") {
    std::mt19937_64 rng(8080);
    ConstructionSpec specs[] = {gallery::build_construction("chacon-product", 4),
                                gallery::build_construction("dyadic-z2-construction", 4)};
    int done = 0;
    while (done < 100) {
        ConstructionSpec& spec = specs[done % 2];
        Lattice g = Lattice::from_columns(oracles::random_instance(rng, 2, 8).canonical_columns);
        int l = 1 + done % 2, m = std::min(spec.depth(), l + 1 + done % 3);
        if (spec.shape(m).size() > 10000) {
            ++done;
            continue;
        }
        auto [d, ratio] = best_residue_set(spec, l, m, g);
        auto [od, oratio] = oracles::best_residue_by_subsets(compose_hist(spec, l, m, g),
                                                             shape_coset_histogram(spec.shape(m), g));
        CHECK(ratio <= oratio);
        std::set<Vec> ds(d.begin(), d.end());
        // ties are excluded from D, so compare achieved ratios, not sets
        CHECK(ratio == oratio);
        ++done;
    }
}

TEST_CASE("conjugacy to the dyadic odometer") {
    ConstructionSpec dyadic_c = gallery::build_construction("dyadic-z2-construction", 6);
    OdometerSpec dyadic = gallery::build_odometer("dyadic-z2", 4);
    CriterionVerdict v = conjugacy_check(dyadic_c, dyadic, kQuarter, 6);
    CHECK(v.status == Status::Supported);

    ConstructionSpec prod = gallery::build_construction("chacon-product", 5);
    CHECK(conjugacy_check(prod, dyadic, kSixth, 5).status == Status::Refuted);

    OdometerSpec triadic = gallery::build_odometer("triadic-z2", 4);
    CHECK(conjugacy_check(dyadic_c, triadic, kQuarter, 6).status == Status::Refuted);
}

TEST_CASE("conjugate to some odometer") {
    ConjugateSomeResult dyadic =
        conjugate_to_some_odometer_check(gallery::build_construction("dyadic-z2-construction", 6), 16,
                                         {kQuarter}, 6);
    CHECK(dyadic.verdict.status == Status::Supported);
    REQUIRE(dyadic.generated.has_value());
    CHECK(conjugate_at_depth(*dyadic.generated, gallery::build_odometer("dyadic-z2", 2)).status ==
          Status::Supported);

    ConjugateSomeResult chacon =
        conjugate_to_some_odometer_check(gallery::build_construction("chacon-product", 5), 8, {kSixth}, 5);
    CHECK(chacon.verdict.status == Status::Refuted);
}

TEST_CASE("conjugate to some odometer: staggered truncation semantics") {
    // At depth 4 the slope-matching skew lattice span{(2,0),(1,8)} witnesses
    // the grid from the top scale, so the scan honestly supports; the report
    // flags that the generated odometer is not free.
    ConjugateSomeResult shallow =
        conjugate_to_some_odometer_check(gallery::build_construction("staggered-z2", 4), 16, {kSixth}, 4, 1);
    CHECK(shallow.verdict.status == Status::Supported);
    REQUIRE(shallow.generated.has_value());
    CHECK(is_free_at_depth(*shallow.generated).status == Status::Refuted);
    bool freeness_noted = false;
    for (const auto& [key, val] : shallow.verdict.notes)
        freeness_noted = freeness_noted || key == "generated odometer freeness";
    CHECK(freeness_noted);

    // One level deeper the witness is refuted and no pool group passes both
    // clauses, each failure carrying a certificate.
    ConjugateSomeResult deeper =
        conjugate_to_some_odometer_check(gallery::build_construction("staggered-z2", 5), 16, {kSixth}, 5, 1);
    CHECK(deeper.verdict.status == Status::Refuted);
}

TEST_CASE("subaction congruence checks") {
    ConstructionSpec staggered = gallery::build_construction("staggered-z2", 4);
    for (int k = 1; k <= 3; ++k) {
        CriterionVerdict v =
            subaction_congruence_check(staggered, 1, pow2(static_cast<unsigned long>(k)), 4);
        CHECK(v.status == Status::Supported);
        CHECK(v.start_level == k);
    }
    CriterionVerdict horizontal = subaction_congruence_check(staggered, 0, 2, 4);
    CHECK(horizontal.status == Status::Inconclusive);
    CHECK_FALSE(horizontal.witness_vectors.empty());

    CHECK(subaction_congruence_check(gallery::build_construction("chacon-z", 4), 0, 1, 4).status ==
          Status::Supported);
}

TEST_CASE("verdict monotonicity in depth on gallery cases") {
    for (int depth = 3; depth <= 5; ++depth) {
        CHECK(finite_factor_check(gallery::build_construction("chacon-product", depth),
                                  Lattice::scalar(2, 2), kSixth, depth)
                  .status == Status::Refuted);
        CHECK(finite_factor_check(gallery::build_construction("dyadic-z2-construction", depth),
                                  Lattice::scalar(2, 2), kQuarter, depth)
                  .status == Status::Supported);
    }
}
