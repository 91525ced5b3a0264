#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rankone/analysis.hpp"

namespace rankone {
namespace gallery {

struct UnknownCase : std::runtime_error {
    explicit UnknownCase(const std::string& name) : std::runtime_error("unknown gallery case: " + name) {}
};

inline bool is_odometer_case(const std::string& name) {
    return name == "dyadic-z2" || name == "quartic-z2" || name == "six-z2" || name == "triadic-z2" ||
           name == "horizontal-odometer";
}

inline bool is_construction_case(const std::string& name) {
    return name == "chacon-z" || name == "chacon-product" || name == "staggered-z2" ||
           (name.size() > 13 && name.substr(name.size() - 13) == "-construction" &&
            is_odometer_case(name.substr(0, name.size() - 13)));
}

inline std::vector<std::string> list_cases() {
    return {"chacon-z",  "chacon-product", "staggered-z2",        "dyadic-z2-construction",
            "quartic-z2-construction",     "horizontal-odometer-construction",
            "dyadic-z2", "quartic-z2",     "six-z2",              "triadic-z2",
            "horizontal-odometer"};
}

inline OdometerSpec build_odometer(const std::string& name, int depth) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (name == "dyadic-z2") return pow_odometer(Lattice::scalar(2, 2), depth);
    if (name == "quartic-z2") return pow_odometer(Lattice::scalar(2, 4), depth);
    if (name == "six-z2") return pow_odometer(Lattice::scalar(2, 6), depth);
    if (name == "triadic-z2") return pow_odometer(Lattice::scalar(2, 3), depth);
    if (name == "horizontal-odometer") return pow_odometer(Lattice::diagonal({Int(2), Int(1)}), depth);
    throw UnknownCase(name);
}

inline std::vector<Int> chacon_heights(int depth) {
    std::vector<Int> h{Int(1)};
    while (static_cast<int>(h.size()) < depth) h.push_back(3 * h.back() + 1);
    return h;
}

inline ConstructionSpec build_construction(const std::string& name, int depth) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    ConstructionSpec c;
    c.rule = name;
    if (name == "chacon-z") {
        c.dim = 1;
        std::vector<Int> h = chacon_heights(depth);
        for (int n = 1; n <= depth; ++n) {
            Level lvl{ShapeSpec::rect({h[static_cast<size_t>(n - 1)]}), {}};
            if (n > 1) {
                const Int& hp = h[static_cast<size_t>(n - 2)];
                lvl.placements = {ArithProg::single({Int(0)}), ArithProg::single({hp}),
                                  ArithProg::single({2 * hp + 1})};
            }
            c.levels.push_back(std::move(lvl));
        }
        return c;
    }
    if (name == "chacon-product") {
        c.dim = 2;
        std::vector<Int> h = chacon_heights(depth);
        for (int n = 1; n <= depth; ++n) {
            const Int& hn = h[static_cast<size_t>(n - 1)];
            Level lvl{ShapeSpec::rect({hn, hn}), {}};
            if (n > 1) {
                const Int& hp = h[static_cast<size_t>(n - 2)];
                const Int offs[3] = {Int(0), hp, 2 * hp + 1};
                for (const Int& x : offs)
                    for (const Int& y : offs) lvl.placements.push_back(ArithProg::single({x, y}));
            }
            c.levels.push_back(std::move(lvl));
        }
        return c;
    }
    if (name == "staggered-z2") {
        c.dim = 2;
        // F_n = [0, 2^(4^(n-1))) x [0, 2^n); two staggered rows of copies.
        auto width_exp = [](int n) {
            unsigned long e = 1;
            for (int i = 1; i < n; ++i) e *= 4;
            return e;  // 4^(n-1)
        };
        for (int n = 1; n <= depth; ++n) {
            Level lvl{ShapeSpec::rect({pow2(width_exp(n)), pow2(static_cast<unsigned long>(n))}), {}};
            if (n > 1) {
                const int m = n - 1;
                const Int w = pow2(width_exp(m));
                const Int t = pow2(width_exp(n) - width_exp(m)) - 1;
                const Int half = pow2(static_cast<unsigned long>(m));
                lvl.placements = {ArithProg::make({Int(0), Int(0)}, {w, Int(0)}, t),
                                  ArithProg::make({Int(1), half}, {w, Int(0)}, t)};
            }
            c.levels.push_back(std::move(lvl));
        }
        return c;
    }
    if (is_construction_case(name)) {
        ConstructionSpec conv =
            odometer_as_construction(build_odometer(name.substr(0, name.size() - 13), depth));
        conv.rule = name;
        return conv;
    }
    throw UnknownCase(name);
}

struct RunItem {
    std::string label;
    Status expected;
    Status actual;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string name;
    int depth = 0;
    std::vector<RunItem> items;
    int mismatches = 0;
};

namespace detail_gallery {

struct ExpectedItem {
    std::string label;
    Status expected;
    std::function<std::pair<Status, std::string>(int depth)> run;
};

inline std::vector<ExpectedItem> expected_items(const std::string& name) {
    using Runner = std::function<std::pair<Status, std::string>(int)>;
    auto verdict_of = [](const CriterionVerdict& v) { return std::make_pair(v.status, v.reason); };
    auto ff_of = [](const FFVerdict& v) { return std::make_pair(v.status, v.reason); };
    std::vector<ExpectedItem> items;
    auto add = [&](std::string label, Status exp, Runner run) {
        items.push_back({std::move(label), exp, std::move(run)});
    };
    const Rat sixth(1, 6), quarter(1, 4);

    auto add_validate = [&](const std::string& cname) {
        add("validate", Status::Supported, [cname](int depth) {
            auto violations = validate(build_construction(cname, depth));
            return std::make_pair(violations.empty() ? Status::Supported : Status::Refuted,
                                  violations.empty() ? std::string("no violations")
                                                     : violations.front().detail);
        });
    };

    if (name == "chacon-z") {
        add_validate(name);
        add("finite-factor mod 2", Status::Refuted, [=](int depth) {
            return verdict_of(finite_factor_check(build_construction(name, depth), Lattice::scalar(1, 2),
                                                  sixth, depth));
        });
        add("subaction mod 1", Status::Supported, [=](int depth) {
            return verdict_of(subaction_congruence_check(build_construction(name, depth), 0, 1, depth));
        });
        return items;
    }
    if (name == "chacon-product") {
        add_validate(name);
        add("folner clear", Status::Supported, [=](int depth) {
            FolnerReport rep = folner_report(build_construction(name, depth));
            return std::make_pair(rep.suspect ? Status::Refuted : Status::Supported,
                                  std::string("final-level deficiency trend"));
        });
        add("finite-factor 2Zx2Z", Status::Refuted, [=](int depth) {
            return verdict_of(finite_factor_check(build_construction(name, depth), Lattice::scalar(2, 2),
                                                  sixth, depth));
        });
        add("some-infinite-odometer", Status::Refuted, [=](int depth) {
            return verdict_of(some_infinite_odometer_check(build_construction(name, depth), 16, sixth, depth)
                                  .verdict);
        });
        add("free-factor", Status::Refuted, [=](int depth) {
            return verdict_of(free_factor_check(build_construction(name, depth), 16, sixth, depth));
        });
        add("conjugate-some", Status::Refuted, [=](int depth) {
            return verdict_of(
                conjugate_to_some_odometer_check(build_construction(name, depth), 8, {sixth}, depth).verdict);
        });
        return items;
    }
    if (name == "staggered-z2") {
        add_validate(name);
        add("folner clear", Status::Supported, [=](int depth) {
            FolnerReport rep = folner_report(build_construction(name, depth));
            return std::make_pair(rep.suspect ? Status::Refuted : Status::Supported,
                                  std::string("final-level deficiency trend"));
        });
        add("free-factor", Status::Refuted, [=](int depth) {
            return verdict_of(free_factor_check(build_construction(name, depth), 16, sixth, depth));
        });
        for (int k = 1; k <= 3; ++k)
            add("subaction vertical mod 2^" + std::to_string(k), Status::Supported, [=](int depth) {
                return verdict_of(
                    subaction_congruence_check(build_construction(name, depth), 1, pow2(static_cast<unsigned long>(k)), depth));
            });
        add("subaction horizontal mod 2", Status::Inconclusive, [=](int depth) {
            return verdict_of(subaction_congruence_check(build_construction(name, depth), 0, 2, depth));
        });
        add("finite-factor Z x 2Z", Status::Supported, [=](int depth) {
            return verdict_of(finite_factor_check(build_construction(name, depth),
                                                  Lattice::diagonal({Int(1), Int(2)}), sixth, depth));
        });
        return items;
    }
    if (name == "horizontal-odometer-construction") {
        add_validate(name);
        add("folner suspect", Status::Supported, [=](int depth) {
            FolnerReport rep = folner_report(build_construction(name, depth));
            return std::make_pair(rep.suspect ? Status::Supported : Status::Refuted,
                                  std::string("vertical deficiency stays at 2"));
        });
        add("finite-factor 2Zx2Z gated", Status::Inconclusive, [=](int depth) {
            return verdict_of(finite_factor_check(build_construction(name, depth), Lattice::scalar(2, 2),
                                                  sixth, depth));
        });
        return items;
    }
    if (name == "dyadic-z2-construction" || name == "quartic-z2-construction") {
        const std::string base = name.substr(0, name.size() - 13);
        add_validate(name);
        add("finite-factor 2Zx2Z", Status::Supported, [=](int depth) {
            return verdict_of(finite_factor_check(build_construction(name, depth), Lattice::scalar(2, 2),
                                                  quarter, depth));
        });
        add("odometer-factor onto " + base, Status::Supported, [=](int depth) {
            return verdict_of(odometer_factor_check(build_construction(name, depth),
                                                    build_odometer(base, std::max(1, depth - 1)), quarter,
                                                    depth));
        });
        add("conjugacy onto " + base, Status::Supported, [=](int depth) {
            return verdict_of(conjugacy_check(build_construction(name, depth),
                                              build_odometer(base, std::max(1, depth - 1)), quarter, depth));
        });
        add("conjugate-some", Status::Supported, [=](int depth) {
            const int l_max = base == "dyadic-z2" ? 2 : 1;
            return verdict_of(
                conjugate_to_some_odometer_check(build_construction(name, depth), 16, {quarter}, depth, l_max)
                    .verdict);
        });
        return items;
    }
    if (name == "dyadic-z2") {
        add("free", Status::Supported,
            [=](int depth) { return ff_of(is_free_at_depth(build_odometer(name, depth))); });
        add("infinite", Status::Supported,
            [=](int depth) { return ff_of(is_infinite_at_depth(build_odometer(name, depth))); });
        add("conjugate to quartic-z2", Status::Supported, [=](int depth) {
            return ff_of(conjugate_at_depth(build_odometer(name, depth), build_odometer("quartic-z2", depth)));
        });
        add("conjugate to six-z2", Status::Refuted, [=](int depth) {
            return ff_of(conjugate_at_depth(build_odometer(name, depth), build_odometer("six-z2", depth)));
        });
        return items;
    }
    if (name == "horizontal-odometer") {
        add("free", Status::Refuted,
            [=](int depth) { return ff_of(is_free_at_depth(build_odometer(name, depth))); });
        add("infinite", Status::Supported,
            [=](int depth) { return ff_of(is_infinite_at_depth(build_odometer(name, depth))); });
        return items;
    }
    if (is_odometer_case(name)) {
        add("free", Status::Supported,
            [=](int depth) { return ff_of(is_free_at_depth(build_odometer(name, depth))); });
        add("infinite", Status::Supported,
            [=](int depth) { return ff_of(is_infinite_at_depth(build_odometer(name, depth))); });
        add("conjugate to itself", Status::Supported, [=](int depth) {
            return ff_of(conjugate_at_depth(build_odometer(name, depth), build_odometer(name, depth)));
        });
        return items;
    }
    if (is_construction_case(name)) {
        add_validate(name);
        return items;
    }
    throw UnknownCase(name);
}

}  // namespace detail_gallery

inline int default_depth(const std::string& name) {
    if (name == "staggered-z2") return 4;
    if (name == "chacon-product") return 5;
    if (name == "chacon-z") return 6;
    if (is_odometer_case(name)) return 6;
    return 5;
}

// Executes every expected criterion of the named case and compares statuses.
inline RunReport run_expected(const std::string& name, int depth = 0) {
    if (depth <= 0) depth = default_depth(name);
    RunReport rep;
    rep.name = name;
    rep.depth = depth;
    for (const auto& item : detail_gallery::expected_items(name)) {
        RunItem r;
        r.label = item.label;
        r.expected = item.expected;
        auto [actual, detail] = item.run(depth);
        r.actual = actual;
        r.detail = detail;
        r.pass = (actual == item.expected);
        if (!r.pass) ++rep.mismatches;
        rep.items.push_back(std::move(r));
    }
    return rep;
}

}  // namespace gallery
}  // namespace rankone
