// Command-line front end: file-based construction/odometer specs in, JSON
// or TSV reports out.  Exit codes: 0 supported/clean, 2 refuted (with a
// certificate in the report), 3 inconclusive, 1 usage or validation error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rankone/rankone.hpp"

namespace {

using namespace rankone;
using nlohmann::json;

constexpr int kExitSupported = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRefuted = 2;
constexpr int kExitInconclusive = 3;

int status_exit_code(Status s) {
    switch (s) {
        case Status::Supported: return kExitSupported;
        case Status::Refuted: return kExitRefuted;
        default: return kExitInconclusive;
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

// A spec argument is a JSON file, or a gallery case name (optionally with
// "@depth") for convenience.
ConstructionSpec load_construction(const std::string& arg, int depth_hint) {
    if (std::ifstream probe(arg); probe.good()) return io::construction_from_json(load_json_file(arg));
    std::string name = arg;
    int depth = depth_hint;
    if (auto at = arg.find('@'); at != std::string::npos) {
        name = arg.substr(0, at);
        depth = std::stoi(arg.substr(at + 1));
    }
    if (gallery::is_construction_case(name))
        return gallery::build_construction(name, depth > 0 ? depth : gallery::default_depth(name));
    throw std::runtime_error("spec is neither a readable file nor a gallery case: " + arg);
}

OdometerSpec load_odometer(const std::string& arg, int depth_hint) {
    if (std::ifstream probe(arg); probe.good()) return io::odometer_from_json(load_json_file(arg));
    std::string name = arg;
    int depth = depth_hint;
    if (auto at = arg.find('@'); at != std::string::npos) {
        name = arg.substr(0, at);
        depth = std::stoi(arg.substr(at + 1));
    }
    if (gallery::is_odometer_case(name))
        return gallery::build_odometer(name, depth > 0 ? depth : gallery::default_depth(name));
    throw std::runtime_error("odometer is neither a readable file nor a gallery case: " + arg);
}

Lattice parse_lattice_arg(const std::string& text) { return io::lattice_from_json(json::parse(text)); }

Vec parse_vec_arg(const std::string& text) { return io::vec_from_json(json::parse(text)); }

void emit(const json& report, const std::string& out_path, const std::string& format,
          const std::string& tsv) {
    std::string payload = format == "tsv" ? tsv : report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << payload;
}

struct Options {
    std::string spec, odometer, odometer_b, lattice, vector_text, out, format = "json", family;
    std::string epsilon = "1/6", threshold, base_mass;
    std::vector<std::string> epsilons, etas;
    int depth = 0, m = 1, n = 1, axis = 0, level = 1, l_max = 0, dim = 2;
    std::string modulus = "2", max_index = "16", cap = "1000000";
    std::string generators, name;
};

json params_json(const Options& o, std::initializer_list<std::string> keys) {
    json p = json::object();
    for (const std::string& k : keys) {
        if (k == "spec") p["spec"] = o.spec;
        if (k == "odometer") p["odometer"] = o.odometer;
        if (k == "b") p["b"] = o.odometer_b;
        if (k == "lattice") p["lattice"] = o.lattice;
        if (k == "vector") p["vector"] = o.vector_text;
        if (k == "epsilon") p["epsilon"] = o.epsilon;
        if (k == "epsilons") p["epsilons"] = o.epsilons;
        if (k == "depth") p["depth"] = o.depth;
        if (k == "m") p["m"] = o.m;
        if (k == "n") p["n"] = o.n;
        if (k == "axis") p["axis"] = o.axis;
        if (k == "modulus") p["modulus"] = o.modulus;
        if (k == "max_index") p["max_index"] = o.max_index;
        if (k == "l_max") p["l_max"] = o.l_max;
        if (k == "cap") p["cap"] = o.cap;
        if (k == "dim") p["dim"] = o.dim;
        if (k == "generators") p["generators"] = o.generators;
        if (k == "name") p["name"] = o.name;
        if (k == "level") p["level"] = o.level;
        if (k == "threshold") p["threshold"] = o.threshold;
        if (k == "base_mass") p["base_mass"] = o.base_mass;
        if (k == "family") p["family"] = o.family;
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact analysis of stacking rank-one Z^d constructions and Z^d-odometers"};
    app.require_subcommand(1);
    Options o;
    int exit_code = kExitSupported;
    std::function<void()> action;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out, "write the report to this file instead of stdout");
        cmd->add_option("--format", o.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
    };

    // ---- lattice ----
    auto* lat_cmd = app.add_subcommand("lattice", "finite-index sublattice algebra");
    {
        auto* c = lat_cmd->add_subcommand("canonicalize", "canonical basis of the span of generators");
        c->add_option("--dim", o.dim)->required();
        c->add_option("--generators", o.generators, "JSON list of integer vectors")->required();
        add_common(c);
        c->callback([&] {
            action = [&] {
                std::vector<Vec> gens;
                for (const auto& g : json::parse(o.generators)) gens.push_back(io::vec_from_json(g));
                Lattice l = Lattice::canonicalize(o.dim, gens);
                json rep{{"command", "lattice canonicalize"},
                         {"params", params_json(o, {"dim", "generators"})},
                         {"lattice", io::lattice_to_json(l)},
                         {"index", io::int_to_json(l.index())}};
                emit(rep, o.out, "json", "");
            };
        });
        auto* ix = lat_cmd->add_subcommand("index", "index of the lattice in Z^d");
        ix->add_option("--lattice", o.lattice)->required();
        add_common(ix);
        ix->callback([&] {
            action = [&] {
                Lattice l = parse_lattice_arg(o.lattice);
                json rep{{"command", "lattice index"},
                         {"params", params_json(o, {"lattice"})},
                         {"lattice", io::lattice_to_json(l)},
                         {"index", io::int_to_json(l.index())}};
                emit(rep, o.out, "json", "");
            };
        });
        auto* rd = lat_cmd->add_subcommand("reduce", "canonical representative of a vector");
        rd->add_option("--lattice", o.lattice)->required();
        rd->add_option("--vector", o.vector_text)->required();
        add_common(rd);
        rd->callback([&] {
            action = [&] {
                Lattice l = parse_lattice_arg(o.lattice);
                Vec v = parse_vec_arg(o.vector_text);
                json rep{{"command", "lattice reduce"},
                         {"params", params_json(o, {"lattice", "vector"})},
                         {"residue", io::residue_to_json(l.reduce(v))},
                         {"contains", l.contains(v)}};
                emit(rep, o.out, "json", "");
            };
        });
        auto* me = lat_cmd->add_subcommand("meet", "intersection and join of two lattices");
        me->add_option("--a", o.lattice)->required();
        me->add_option("--b", o.odometer_b)->required();
        add_common(me);
        me->callback([&] {
            action = [&] {
                Lattice a = parse_lattice_arg(o.lattice), b = parse_lattice_arg(o.odometer_b);
                json rep{{"command", "lattice meet"},
                         {"params", json{{"a", o.lattice}, {"b", o.odometer_b}}},
                         {"intersection", io::lattice_to_json(intersect(a, b))},
                         {"join", io::lattice_to_json(join(a, b))}};
                emit(rep, o.out, "json", "");
            };
        });
        auto* en = lat_cmd->add_subcommand("enumerate", "all lattices of index up to a bound");
        en->add_option("--dim", o.dim)->required();
        en->add_option("--max-index", o.max_index)->required();
        add_common(en);
        en->callback([&] {
            action = [&] {
                json arr = json::array();
                for (const Lattice& l : enumerate_sublattices(o.dim, Int(o.max_index)))
                    arr.push_back(io::lattice_to_json(l));
                json rep{{"command", "lattice enumerate"},
                         {"params", params_json(o, {"dim", "max_index"})},
                         {"count", arr.size()},
                         {"lattices", arr}};
                emit(rep, o.out, "json", "");
            };
        });
    }

    // ---- odometer ----
    auto* odo_cmd = app.add_subcommand("odometer", "Z^d-odometers as decreasing lattice chains");
    {
        auto* cj = odo_cmd->add_subcommand("conjugate", "conjugacy of two odometers at depth");
        cj->add_option("--a", o.odometer)->required();
        cj->add_option("--b", o.odometer_b)->required();
        cj->add_option("--depth", o.depth);
        add_common(cj);
        cj->callback([&] {
            action = [&] {
                FFVerdict v = conjugate_at_depth(load_odometer(o.odometer, o.depth),
                                                 load_odometer(o.odometer_b, o.depth));
                json rep{{"command", "odometer conjugate"},
                         {"params", json{{"a", o.odometer}, {"b", o.odometer_b}, {"depth", o.depth}}},
                         {"verdict", io::ff_verdict_to_json(v)}};
                emit(rep, o.out, "json", "");
                exit_code = status_exit_code(v.status);
            };
        });
        auto* fc = odo_cmd->add_subcommand("ff-contains", "does FF of the odometer contain the group");
        fc->add_option("--odometer", o.odometer)->required();
        fc->add_option("--lattice", o.lattice)->required();
        fc->add_option("--depth", o.depth);
        add_common(fc);
        fc->callback([&] {
            action = [&] {
                FFVerdict v = ff_contains(load_odometer(o.odometer, o.depth), parse_lattice_arg(o.lattice));
                json rep{{"command", "odometer ff-contains"},
                         {"params", params_json(o, {"odometer", "lattice", "depth"})},
                         {"verdict", io::ff_verdict_to_json(v)}};
                emit(rep, o.out, "json", "");
                exit_code = status_exit_code(v.status);
            };
        });
        auto* gen = odo_cmd->add_subcommand("generate", "odometer generated by a family of groups");
        gen->add_option("--family", o.family, "JSON list of lattices")->required();
        add_common(gen);
        gen->callback([&] {
            action = [&] {
                std::vector<Lattice> family;
                for (const auto& g : json::parse(o.family)) family.push_back(io::lattice_from_json(g));
                json rep{{"command", "odometer generate"},
                         {"params", params_json(o, {"family"})},
                         {"odometer", io::odometer_to_json(generate_from_family(family))}};
                emit(rep, o.out, "json", "");
            };
        });
        for (const char* which : {"free", "infinite"}) {
            auto* pc = odo_cmd->add_subcommand(which, std::string("is the odometer ") + which +
                                                          " (finite-depth verdict)");
            pc->add_option("--odometer", o.odometer)->required();
            pc->add_option("--depth", o.depth);
            add_common(pc);
            std::string w = which;
            pc->callback([&, w] {
                action = [&, w] {
                    OdometerSpec spec = load_odometer(o.odometer, o.depth);
                    FFVerdict v = w == "free" ? is_free_at_depth(spec) : is_infinite_at_depth(spec);
                    json rep{{"command", "odometer " + w},
                             {"params", params_json(o, {"odometer", "depth"})},
                             {"verdict", io::ff_verdict_to_json(v)}};
                    emit(rep, o.out, "json", "");
                    exit_code = status_exit_code(v.status);
                };
            });
        }
        auto* ms = odo_cmd->add_subcommand("measure", "cylinder measure at a chain level");
        ms->add_option("--odometer", o.odometer)->required();
        ms->add_option("--level", o.level)->required();
        ms->add_option("--depth", o.depth);
        add_common(ms);
        ms->callback([&] {
            action = [&] {
                OdometerSpec spec = load_odometer(o.odometer, o.depth);
                json rep{{"command", "odometer measure"},
                         {"params", params_json(o, {"odometer", "level"})},
                         {"measure", io::rat_to_json(coordinate_measure(spec, o.level))}};
                emit(rep, o.out, "json", "");
            };
        });
        auto* sh = odo_cmd->add_subcommand("as-construction", "odometer realized as a stacking construction");
        sh->add_option("--odometer", o.odometer)->required();
        sh->add_option("--depth", o.depth);
        add_common(sh);
        sh->callback([&] {
            action = [&] {
                OdometerSpec spec = load_odometer(o.odometer, o.depth);
                json rep = io::construction_to_json(odometer_as_construction(spec));
                emit(rep, o.out, "json", "");
            };
        });
    }

    // ---- construct ----
    auto* con_cmd = app.add_subcommand("construct", "stacking construction diagnostics");
    {
        auto* va = con_cmd->add_subcommand("validate", "check level invariants");
        va->add_option("--spec", o.spec)->required();
        va->add_option("--depth", o.depth);
        add_common(va);
        va->callback([&] {
            action = [&] {
                auto violations = validate(load_construction(o.spec, o.depth));
                json rep{{"command", "construct validate"},
                         {"params", params_json(o, {"spec", "depth"})},
                         {"violations", io::violations_to_json(violations)},
                         {"clean", violations.empty()}};
                emit(rep, o.out, "json", "");
                exit_code = violations.empty() ? kExitSupported : kExitRefuted;
            };
        });
        auto* fo = con_cmd->add_subcommand("folner", "per-level deficiency report");
        fo->add_option("--spec", o.spec)->required();
        fo->add_option("--vectors", o.vector_text, "JSON list of test vectors (default: unit vectors)");
        fo->add_option("--depth", o.depth);
        fo->add_option("--threshold", o.threshold, "suspect threshold, default 1/4");
        add_common(fo);
        fo->callback([&] {
            action = [&] {
                std::vector<Vec> vecs;
                if (!o.vector_text.empty())
                    for (const auto& v : json::parse(o.vector_text)) vecs.push_back(io::vec_from_json(v));
                Rat thr = o.threshold.empty() ? Rat(1, 4) : parse_rat(o.threshold);
                FolnerReport frep = folner_report(load_construction(o.spec, o.depth), vecs, o.depth, thr);
                json rep{{"command", "construct folner"},
                         {"params", params_json(o, {"spec", "vector", "depth", "threshold"})},
                         {"report", io::folner_report_to_json(frep)}};
                emit(rep, o.out, "json", "");
                exit_code = frep.suspect ? kExitInconclusive : kExitSupported;
            };
        });
        auto* ml = con_cmd->add_subcommand("measure", "exact mass ledger");
        ml->add_option("--spec", o.spec)->required();
        ml->add_option("--base", o.base_mass, "base mass at the top level, default 1/#F_K");
        ml->add_option("--depth", o.depth);
        add_common(ml);
        ml->callback([&] {
            action = [&] {
                std::optional<Rat> base;
                if (!o.base_mass.empty()) base = parse_rat(o.base_mass);
                MeasureLedger led = measure_ledger(load_construction(o.spec, o.depth), base);
                json rep{{"command", "construct measure"},
                         {"params", params_json(o, {"spec", "base_mass", "depth"})},
                         {"ledger", io::measure_ledger_to_json(led)}};
                emit(rep, o.out, "json", "");
            };
        });
    }

    // ---- descendants ----
    auto* des_cmd = app.add_subcommand("descendants", "descendant sets I_{m,n}");
    {
        auto* ex = des_cmd->add_subcommand("exact", "materialize the descendant set");
        ex->add_option("--spec", o.spec)->required();
        ex->add_option("--m", o.m)->required();
        ex->add_option("--n", o.n)->required();
        ex->add_option("--cap", o.cap);
        ex->add_option("--depth", o.depth);
        add_common(ex);
        ex->callback([&] {
            action = [&] {
                std::vector<Vec> pts = compose_exact(load_construction(o.spec, o.depth), o.m, o.n, Int(o.cap));
                json arr = json::array();
                for (const Vec& p : pts) arr.push_back(io::vec_to_json(p));
                json rep{{"command", "descendants exact"},
                         {"params", params_json(o, {"spec", "m", "n", "cap"})},
                         {"cardinality", pts.size()},
                         {"points", arr}};
                emit(rep, o.out, "json", "");
            };
        });
        auto* hi = des_cmd->add_subcommand("hist", "residue histogram over Z^d/G");
        hi->add_option("--spec", o.spec)->required();
        hi->add_option("--m", o.m)->required();
        hi->add_option("--n", o.n)->required();
        hi->add_option("--lattice", o.lattice)->required();
        hi->add_option("--depth", o.depth);
        add_common(hi);
        hi->callback([&] {
            action = [&] {
                ResidueHistogram h =
                    compose_hist(load_construction(o.spec, o.depth), o.m, o.n, parse_lattice_arg(o.lattice));
                json rep{{"command", "descendants hist"},
                         {"params", params_json(o, {"spec", "m", "n", "lattice"})},
                         {"histogram", io::histogram_to_json(h)}};
                emit(rep, o.out, o.format, io::histogram_to_tsv(h));
            };
        });
        auto* pa = des_cmd->add_subcommand("pair", "directed pair fraction of a vector");
        pa->add_option("--spec", o.spec)->required();
        pa->add_option("--m", o.m)->required();
        pa->add_option("--n", o.n)->required();
        pa->add_option("--vector", o.vector_text)->required();
        pa->add_option("--depth", o.depth);
        add_common(pa);
        pa->callback([&] {
            action = [&] {
                Rat f = pair_fraction(load_construction(o.spec, o.depth), o.m, o.n,
                                      parse_vec_arg(o.vector_text));
                json rep{{"command", "descendants pair"},
                         {"params", params_json(o, {"spec", "m", "n", "vector"})},
                         {"fraction", io::rat_to_json(f)}};
                emit(rep, o.out, "json", "");
            };
        });
    }

    // ---- check ----
    auto* chk_cmd = app.add_subcommand("check", "factor & conjugacy criteria with verdicts");
    {
        auto emit_verdict = [&](const std::string& command, json params, const CriterionVerdict& v,
                                json extra = json::object()) {
            json rep{{"command", command}, {"params", std::move(params)}, {"verdict", io::verdict_to_json(v)}};
            for (auto& [k, val] : extra.items()) rep[k] = val;
            emit(rep, o.out, o.format, io::deviation_table_to_tsv(v.table));
            exit_code = status_exit_code(v.status);
        };
        auto* ff = chk_cmd->add_subcommand("finite-factor", "finite odometer factor criterion");
        ff->add_option("--spec", o.spec)->required();
        ff->add_option("--lattice", o.lattice)->required();
        ff->add_option("--epsilon", o.epsilon);
        ff->add_option("--depth", o.depth);
        add_common(ff);
        ff->callback([&] {
            action = [&] {
                ConstructionSpec spec = load_construction(o.spec, o.depth);
                CriterionVerdict v =
                    finite_factor_check(spec, parse_lattice_arg(o.lattice), parse_rat(o.epsilon), o.depth);
                emit_verdict("check finite-factor", params_json(o, {"spec", "lattice", "epsilon", "depth"}), v,
                             json{{"spec_resolved", io::construction_to_json(spec)}});
            };
        });
        auto* of = chk_cmd->add_subcommand("odometer-factor", "factor onto a given odometer");
        of->add_option("--spec", o.spec)->required();
        of->add_option("--odometer", o.odometer)->required();
        of->add_option("--epsilon", o.epsilon);
        of->add_option("--depth", o.depth);
        add_common(of);
        of->callback([&] {
            action = [&] {
                CriterionVerdict v = odometer_factor_check(load_construction(o.spec, o.depth),
                                                           load_odometer(o.odometer, 0), parse_rat(o.epsilon),
                                                           o.depth);
                emit_verdict("check odometer-factor",
                             params_json(o, {"spec", "odometer", "epsilon", "depth"}), v);
            };
        });
        auto* so = chk_cmd->add_subcommand("some-odometer", "factor onto some infinite odometer");
        so->add_option("--spec", o.spec)->required();
        so->add_option("--max-index", o.max_index);
        so->add_option("--epsilon", o.epsilon);
        so->add_option("--depth", o.depth);
        add_common(so);
        so->callback([&] {
            action = [&] {
                SomeInfiniteResult r = some_infinite_odometer_check(load_construction(o.spec, o.depth),
                                                                    Int(o.max_index), parse_rat(o.epsilon),
                                                                    o.depth);
                json extra = json::object();
                json supported = json::array();
                for (const Lattice& g : r.candidates.supported) supported.push_back(io::lattice_to_json(g));
                extra["supported"] = supported;
                if (r.generated) extra["generated_odometer"] = io::odometer_to_json(*r.generated);
                emit_verdict("check some-odometer", params_json(o, {"spec", "max_index", "epsilon", "depth"}),
                             r.verdict, extra);
            };
        });
        auto* fr = chk_cmd->add_subcommand("free-factor", "factor onto a free odometer");
        fr->add_option("--spec", o.spec)->required();
        fr->add_option("--max-index", o.max_index);
        fr->add_option("--epsilon", o.epsilon);
        fr->add_option("--depth", o.depth);
        add_common(fr);
        fr->callback([&] {
            action = [&] {
                CriterionVerdict v = free_factor_check(load_construction(o.spec, o.depth), Int(o.max_index),
                                                       parse_rat(o.epsilon), o.depth);
                emit_verdict("check free-factor", params_json(o, {"spec", "max_index", "epsilon", "depth"}), v);
            };
        });
        auto* cj = chk_cmd->add_subcommand("conjugacy", "conjugacy to a given odometer");
        cj->add_option("--spec", o.spec)->required();
        cj->add_option("--odometer", o.odometer)->required();
        cj->add_option("--epsilon", o.epsilon);
        cj->add_option("--depth", o.depth);
        cj->add_option("--l-max", o.l_max);
        add_common(cj);
        cj->callback([&] {
            action = [&] {
                CriterionVerdict v =
                    conjugacy_check(load_construction(o.spec, o.depth), load_odometer(o.odometer, 0),
                                    parse_rat(o.epsilon), o.depth, o.l_max);
                emit_verdict("check conjugacy",
                             params_json(o, {"spec", "odometer", "epsilon", "depth", "l_max"}), v);
            };
        });
        auto* cs = chk_cmd->add_subcommand("conjugate-some", "conjugacy to some infinite odometer");
        cs->add_option("--spec", o.spec)->required();
        cs->add_option("--max-index", o.max_index);
        cs->add_option("--epsilon", o.epsilons, "grid values; repeatable");
        cs->add_option("--eta", o.etas, "extra grid values for the congruence clause; repeatable");
        cs->add_option("--depth", o.depth);
        cs->add_option("--l-max", o.l_max);
        add_common(cs);
        cs->callback([&] {
            action = [&] {
                std::vector<Rat> grid;
                for (const std::string& e : o.epsilons) grid.push_back(parse_rat(e));
                for (const std::string& e : o.etas) grid.push_back(parse_rat(e));
                if (grid.empty()) grid.push_back(Rat(1, 6));
                ConjugateSomeResult r = conjugate_to_some_odometer_check(
                    load_construction(o.spec, o.depth), Int(o.max_index), grid, o.depth, o.l_max);
                json extra = json::object();
                if (r.generated) extra["generated_odometer"] = io::odometer_to_json(*r.generated);
                json cells = json::array();
                for (const CellWitness& c : r.cells) {
                    json cj2{{"l", c.l}, {"epsilon", io::rat_to_json(c.eps)}};
                    if (c.witness) {
                        cj2["witness"] = io::lattice_to_json(*c.witness);
                        cj2["start_level"] = c.start_level;
                    }
                    cells.push_back(cj2);
                }
                extra["cells"] = cells;
                emit_verdict("check conjugate-some",
                             params_json(o, {"spec", "max_index", "epsilons", "depth", "l_max"}), r.verdict,
                             extra);
            };
        });
        auto* sa = chk_cmd->add_subcommand("subaction", "coordinate subaction congruence condition");
        sa->add_option("--spec", o.spec)->required();
        sa->add_option("--axis", o.axis)->required();
        sa->add_option("--modulus", o.modulus)->required();
        sa->add_option("--depth", o.depth);
        add_common(sa);
        sa->callback([&] {
            action = [&] {
                CriterionVerdict v = subaction_congruence_check(load_construction(o.spec, o.depth), o.axis,
                                                                Int(o.modulus), o.depth);
                emit_verdict("check subaction", params_json(o, {"spec", "axis", "modulus", "depth"}), v);
            };
        });
        auto* fv = chk_cmd->add_subcommand("forced", "forced vectors and their closure");
        fv->add_option("--spec", o.spec)->required();
        fv->add_option("--epsilon", o.epsilon);
        fv->add_option("--depth", o.depth);
        add_common(fv);
        fv->callback([&] {
            action = [&] {
                ConstructionSpec spec = load_construction(o.spec, o.depth);
                int depth = o.depth > 0 ? std::min(o.depth, spec.depth()) : spec.depth();
                ForcedClosure fc = forced_closure(spec, depth, parse_rat(o.epsilon));
                json scales = json::array();
                for (size_t m = 0; m < fc.scale_vectors.size(); ++m) {
                    json vs = json::array();
                    for (const Vec& v : fc.scale_vectors[m]) vs.push_back(io::vec_to_json(v));
                    scales.push_back(json{{"scale", m + 1}, {"forced", vs}});
                }
                json stable = json::array();
                for (const Vec& v : fc.stable.basis) stable.push_back(io::vec_to_json(v));
                json rep{{"command", "check forced"},
                         {"params", params_json(o, {"spec", "epsilon", "depth"})},
                         {"threshold", io::rat_to_json(fc.threshold)},
                         {"scales", scales},
                         {"stable_closure_rank", fc.stable.rank()},
                         {"stable_closure_basis", stable}};
                emit(rep, o.out, "json", "");
            };
        });
    }

    // ---- gallery ----
    auto* gal_cmd = app.add_subcommand("gallery", "built-in constructions and odometers");
    {
        auto* ls = gal_cmd->add_subcommand("list", "list case names");
        ls->callback([&] {
            action = [&] {
                for (const std::string& name : gallery::list_cases()) std::cout << name << "\n";
            };
        });
        auto* bd = gal_cmd->add_subcommand("build", "emit a case as JSON");
        bd->add_option("name", o.name)->required();
        bd->add_option("--depth", o.depth);
        add_common(bd);
        bd->callback([&] {
            action = [&] {
                int depth = o.depth > 0 ? o.depth : gallery::default_depth(o.name);
                json rep = gallery::is_odometer_case(o.name)
                               ? io::odometer_to_json(gallery::build_odometer(o.name, depth))
                               : io::construction_to_json(gallery::build_construction(o.name, depth));
                emit(rep, o.out, "json", "");
            };
        });
        auto* rn = gal_cmd->add_subcommand("run", "run a case's expected criteria");
        rn->add_option("name", o.name)->required();
        rn->add_option("--depth", o.depth);
        rn->add_option("--report", o.out);
        add_common(rn);
        rn->callback([&] {
            action = [&] {
                gallery::RunReport rep = gallery::run_expected(o.name, o.depth);
                emit(io::run_report_to_json(rep), o.out, "json", "");
                exit_code = rep.mismatches == 0 ? kExitSupported : kExitRefuted;
            };
        });
    }

    try {
        app.parse(argc, argv);
        if (action) action();
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return exit_code;
}
