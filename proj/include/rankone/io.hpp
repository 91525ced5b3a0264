#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rankone/gallery.hpp"

namespace rankone {
namespace io {

using nlohmann::json;

// Integers serialize as JSON numbers while they fit in 64 bits and as
// decimal strings beyond that; rationals are always "p/q" strings.  Reports
// never contain floating point.
inline json int_to_json(const Int& x) {
    if (x.fits_slong_p()) return json(static_cast<long long>(x.get_si()));
    return json(x.get_str());
}

inline Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
    if (j.is_string()) return Int(j.get<std::string>());
    // floats are rejected rather than rounded: integers beyond 64 bits must
    // be written as decimal strings
    throw std::invalid_argument("expected integer (number or decimal string)");
}

inline json vec_to_json(const Vec& v) {
    json a = json::array();
    for (const Int& x : v) a.push_back(int_to_json(x));
    return a;
}

inline Vec vec_from_json(const json& j) {
    Vec v;
    for (const auto& x : j) v.push_back(int_from_json(x));
    return v;
}

inline json rat_to_json(const Rat& q) { return json(rat_str(q)); }

inline Rat rat_from_json(const json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(Int(static_cast<long>(j.get<long long>())));
    throw std::invalid_argument("expected rational as \"p/q\" string");
}

// {"dim": d, "basis": [[col 0], [col 1], ...]} with columns of the
// canonical upper-triangular matrix.
inline json lattice_to_json(const Lattice& lat) {
    json cols = json::array();
    for (const Vec& c : lat.columns()) cols.push_back(vec_to_json(c));
    return json{{"dim", lat.dim()}, {"basis", cols}};
}

inline Lattice lattice_from_json(const json& j) {
    if (j.is_array()) {
        // Convenience form: a row-major matrix literal; rows are re-read as
        // generators, so any spanning set canonicalizes to the same lattice.
        std::vector<Vec> rows;
        for (const auto& r : j) rows.push_back(vec_from_json(r));
        const int d = static_cast<int>(rows.size());
        std::vector<Vec> cols(static_cast<size_t>(d), zero_vec(d));
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) cols[static_cast<size_t>(c)][static_cast<size_t>(r)] = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
        return Lattice::canonicalize(d, cols);
    }
    const int d = j.at("dim").get<int>();
    std::vector<Vec> cols;
    for (const auto& c : j.at("basis")) cols.push_back(vec_from_json(c));
    return Lattice::canonicalize(d, cols);
}

inline json residue_to_json(const Residue& r) {
    return json{{"lattice", lattice_to_json(r.lattice)}, {"rep", vec_to_json(r.rep)}};
}

inline json shape_to_json(const ShapeSpec& s) {
    if (s.is_rect) return json{{"rect", vec_to_json(s.extents)}};
    json pts = json::array();
    for (const Vec& p : s.pts) pts.push_back(vec_to_json(p));
    return json{{"points", pts}};
}

inline ShapeSpec shape_from_json(const json& j) {
    if (j.contains("rect")) return ShapeSpec::rect(vec_from_json(j.at("rect")));
    std::vector<Vec> pts;
    for (const auto& p : j.at("points")) pts.push_back(vec_from_json(p));
    return ShapeSpec::points(std::move(pts));
}

// Singleton placements serialize as a bare offset vector; progressions as
// {"base", "step", "count"}.
inline json placement_to_json(const ArithProg& a) {
    if (a.count == 1) return vec_to_json(a.base);
    return json{{"base", vec_to_json(a.base)}, {"step", vec_to_json(a.step)}, {"count", int_to_json(a.count)}};
}

inline ArithProg placement_from_json(const json& j) {
    if (j.is_array()) return ArithProg::single(vec_from_json(j));
    return ArithProg::make(vec_from_json(j.at("base")), vec_from_json(j.at("step")),
                           int_from_json(j.at("count")));
}

inline json construction_to_json(const ConstructionSpec& spec) {
    json levels = json::array();
    for (const Level& lvl : spec.levels) {
        json placements = json::array();
        for (const ArithProg& a : lvl.placements) placements.push_back(placement_to_json(a));
        levels.push_back(json{{"shape", shape_to_json(lvl.shape)}, {"placements", placements}});
    }
    json out{{"dim", spec.dim}, {"levels", levels}};
    if (!spec.rule.empty()) out["rule"] = spec.rule;
    return out;
}

inline ConstructionSpec construction_from_json(const json& j) {
    ConstructionSpec spec;
    spec.dim = j.at("dim").get<int>();
    for (const auto& lj : j.at("levels")) {
        Level lvl{shape_from_json(lj.at("shape")), {}};
        if (lj.contains("placements"))
            for (const auto& pj : lj.at("placements")) lvl.placements.push_back(placement_from_json(pj));
        spec.levels.push_back(std::move(lvl));
    }
    if (j.contains("rule")) spec.rule = j.at("rule").get<std::string>();
    return spec;
}

inline json odometer_to_json(const OdometerSpec& spec) {
    json chain = json::array();
    for (const Lattice& g : spec.chain) chain.push_back(lattice_to_json(g));
    json out{{"dim", spec.dim}, {"chain", chain}};
    if (spec.rule == ChainRule::Explicit) out["rule"] = "explicit";
    if (spec.rule == ChainRule::Pow) out["rule"] = json{{"pow", lattice_to_json(*spec.pow_base)}};
    return out;
}

inline OdometerSpec odometer_from_json(const json& j) {
    std::vector<Lattice> chain;
    for (const auto& g : j.at("chain")) chain.push_back(lattice_from_json(g));
    ChainRule rule = ChainRule::None;
    std::optional<Lattice> base;
    if (j.contains("rule")) {
        const auto& r = j.at("rule");
        if (r.is_string() && r.get<std::string>() == "explicit") {
            rule = ChainRule::Explicit;
        } else if (r.is_object() && r.contains("pow")) {
            rule = ChainRule::Pow;
            base = lattice_from_json(r.at("pow"));
        } else {
            throw std::invalid_argument("unknown odometer rule");
        }
    }
    return make_odometer(std::move(chain), rule, std::move(base));
}

inline json histogram_to_json(const ResidueHistogram& h) {
    json rows = json::array();
    for (const auto& [rep, cnt] : h.counts)
        rows.push_back(json{{"rep", vec_to_json(rep)},
                            {"count", int_to_json(cnt)},
                            {"share", rat_to_json(make_rat(cnt, h.total))}});
    return json{{"lattice", lattice_to_json(h.lattice)}, {"total", int_to_json(h.total)}, {"rows", rows}};
}

inline std::string histogram_to_tsv(const ResidueHistogram& h) {
    std::string out = "residue\tcount\tshare\n";
    for (const auto& [rep, cnt] : h.counts)
        out += vec_str(rep) + "\t" + cnt.get_str() + "\t" + rat_str(make_rat(cnt, h.total)) + "\n";
    return out;
}

inline json verdict_to_json(const CriterionVerdict& v) {
    json out{{"criterion", v.criterion},
             {"status", status_str(v.status)},
             {"depth", v.depth},
             {"reason", v.reason},
             {"folner_suspect", v.folner_suspect}};
    if (v.start_level > 0) out["start_level"] = v.start_level;
    if (!v.witness_vectors.empty()) {
        json w = json::array();
        for (const Vec& x : v.witness_vectors) w.push_back(vec_to_json(x));
        out["witness_vectors"] = w;
    }
    if (v.witness_lattice) out["witness_lattice"] = lattice_to_json(*v.witness_lattice);
    if (!v.table.empty()) {
        json t = json::array();
        for (const DevEntry& e : v.table)
            t.push_back(json{{"m", e.m}, {"n", e.n}, {"dev", rat_to_json(e.dev)}, {"g_star", vec_to_json(e.g_star)}});
        out["table"] = t;
    }
    if (!v.notes.empty()) {
        json notes = json::object();
        for (const auto& [k, val] : v.notes) notes[k] = val;
        out["notes"] = notes;
    }
    return out;
}

inline std::string deviation_table_to_tsv(const std::vector<DevEntry>& entries) {
    std::string out = "m\tn\tdev\tg_star\n";
    for (const DevEntry& e : entries)
        out += std::to_string(e.m) + "\t" + std::to_string(e.n) + "\t" + rat_str(e.dev) + "\t" +
               vec_str(e.g_star) + "\n";
    return out;
}

inline json ff_verdict_to_json(const FFVerdict& v) {
    json out{{"status", status_str(v.status)}, {"depth", v.depth}, {"reason", v.reason}};
    if (v.witness_lattice) out["witness_lattice"] = lattice_to_json(*v.witness_lattice);
    if (v.witness_vector) out["witness_vector"] = vec_to_json(*v.witness_vector);
    return out;
}

inline json folner_report_to_json(const FolnerReport& rep) {
    json rows = json::array();
    for (const FolnerRow& r : rep.rows) {
        json defs = json::array();
        for (const Rat& d : r.deficiency) defs.push_back(rat_to_json(d));
        rows.push_back(json{{"vector", vec_to_json(r.vector)},
                            {"deficiency", defs},
                            {"nonincreasing", r.nonincreasing},
                            {"suspect", r.suspect}});
    }
    return json{{"depth", rep.depth},
                {"threshold", rat_to_json(rep.threshold)},
                {"suspect", rep.suspect},
                {"rows", rows}};
}

inline json violations_to_json(const std::vector<Violation>& vs) {
    json a = json::array();
    for (const Violation& v : vs)
        a.push_back(json{{"level", v.level}, {"what", v.what}, {"witness", vec_to_json(v.witness)}, {"detail", v.detail}});
    return a;
}

inline json measure_ledger_to_json(const MeasureLedger& led) {
    auto rats = [](const std::vector<Rat>& xs) {
        json a = json::array();
        for (const Rat& x : xs) a.push_back(rat_to_json(x));
        return a;
    };
    return json{{"base_mass", rats(led.base_mass)},
                {"tower_mass", rats(led.tower_mass)},
                {"spacer_fraction", rats(led.spacer_fraction)},
                {"spacer_mass", rats(led.spacer_mass)}};
}

inline json run_report_to_json(const gallery::RunReport& rep) {
    json items = json::array();
    for (const auto& it : rep.items)
        items.push_back(json{{"label", it.label},
                             {"expected", status_str(it.expected)},
                             {"actual", status_str(it.actual)},
                             {"pass", it.pass},
                             {"detail", it.detail}});
    return json{{"case", rep.name}, {"depth", rep.depth}, {"mismatches", rep.mismatches}, {"items", items}};
}

}  // namespace io
}  // namespace rankone
