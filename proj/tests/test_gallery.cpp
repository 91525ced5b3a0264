#include "doctest.h"
#include "rankone/gallery.hpp"

using namespace rankone;

TEST_CASE("chacon heights") {
    std::vector<Int> h = gallery::chacon_heights(4);
    CHECK(h == std::vector<Int>{Int(1), Int(4), Int(13), Int(40)});
}

TEST_CASE("staggered shapes and placement families") {
    ConstructionSpec spec = gallery::build_construction("staggered-z2", 4);
    CHECK(spec.shape(1) == ShapeSpec::rect({Int(2), Int(2)}));
    CHECK(spec.shape(2) == ShapeSpec::rect({Int(16), Int(4)}));
    CHECK(spec.shape(3) == ShapeSpec::rect({Int(65536), Int(8)}));
    CHECK(spec.shape(4) == ShapeSpec::rect({pow2(64), Int(16)}));

    const auto& p1 = spec.placements_into(2);
    REQUIRE(p1.size() == 2);
    CHECK(p1[0].count == 7);  // 2^(4-1) - 1
    CHECK(p1[0].base == Vec{Int(0), Int(0)});
    CHECK(p1[1].base == Vec{Int(1), Int(2)});
    CHECK(p1[0].step == Vec{Int(2), Int(0)});
    CHECK(placement_count(spec.placements_into(3)) == 2 * (pow2(12) - 1));
    CHECK(placement_count(spec.placements_into(4)) == 2 * (pow2(48) - 1));
}

TEST_CASE("horizontal odometer chain") {
    OdometerSpec spec = gallery::build_odometer("horizontal-odometer", 4);
    for (int j = 1; j <= 4; ++j)
        CHECK(spec.group(j) == Lattice::diagonal({pow2(static_cast<unsigned long>(j)), Int(1)}));
}

TEST_CASE("every gallery construction validates cleanly") {
    for (const std::string& name : gallery::list_cases()) {
        if (gallery::is_odometer_case(name)) continue;
        CAPTURE(name);
        CHECK(validate(gallery::build_construction(name, 4)).empty());
    }
}

TEST_CASE("unknown case names are rejected") {
    CHECK_THROWS_AS(gallery::build_construction("no-such-case", 3), gallery::UnknownCase);
    CHECK_THROWS_AS(gallery::build_odometer("no-such-case", 3), gallery::UnknownCase);
}

TEST_CASE("gallery regression harness runs clean") {
    for (const std::string& name : gallery::list_cases()) {
        gallery::RunReport rep = gallery::run_expected(name);
        CAPTURE(name);
        for (const auto& item : rep.items) {
            CAPTURE(item.label);
            CHECK(item.pass);
        }
        CHECK(rep.mismatches == 0);
    }
}
