#include "dgmorse/io.hpp"
#include "dgmorse/parallel.hpp"
#include "dgmorse/random.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

using namespace dgmorse;
using io::json;

namespace {

/// Everything a command may read from the command line.
struct RunConfig {
    std::string family;
    std::string action;
    std::vector<std::string> inputs;
    std::size_t max_arity = 4;
    int max_k = 4;
    int page = 2;
    int dim = -1;
    std::size_t random = 0;
    unsigned seed = 0;
    std::string group;
    int n = 3;
    bool relative = false;
    std::string loop_class;
    bool all = false;
    std::string format = "json";
    bool timings = false;
};

struct Outcome {
    Report report;
    json result = json::object();
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::string& input(const RunConfig& cfg, std::size_t i)
{
    if (cfg.inputs.size() <= i)
        throw UsageError("usage error: " + cfg.family + " " + cfg.action + " needs " + std::to_string(i + 1) + " input file(s)");
    return cfg.inputs[i];
}

json document(const std::string& path)
{
    return io::load_document(path);
}

io::Context context(const std::string& path)
{
    return io::Context::of_file(path);
}

FiniteGroup load_group(const std::string& group)
{
    if (group.empty())
        throw UsageError("usage error: --group is required");
    if (std::filesystem::exists(group))
        return io::parse_group(document(group), group);
    return io::parse_group(json(group), "--group");
}

void require_arity(std::size_t K)
{
    if (K < 2)
        throw io::ArityError("arity bound violation: --max-arity must be at least 2, got " + std::to_string(K));
}

Report precondition(const std::string& subject, const std::string& name, const std::exception& e)
{
    Report r;
    r.subject = subject;
    r.add(name, false, Witness{0, "", e.what()});
    return r;
}

// ---- complex ----

Outcome complex_command(const RunConfig& cfg)
{
    const std::string& path = input(cfg, 0);
    json doc = document(path);
    ChainComplex C = io::parse_complex(io::child(doc, "complex", path), path, false);
    Outcome out;
    out.report = verify_complex(C);
    out.report.subject = "chain complex";
    if (!out.report.pass())
        return out;
    if (cfg.action == "homology") {
        out.result["homology"] = io::dims_json(homology_dims(C));
    } else if (cfg.action == "retract") {
        HomotopyRetract R = retract_to_homology(C);
        out.report.merge(verify_retract(R), "retract: ");
        out.result = json{{"small", io::complex_json(R.small)},
                          {"i", io::map_json(R.i)},
                          {"p", io::map_json(R.p)},
                          {"h", io::map_json(R.h)}};
    } else {
        throw UsageError("unknown command: complex " + cfg.action);
    }
    return out;
}

// ---- ainfty ----

Report ainfty_roundtrip(const AInftyMorphism& f, const AInftyMorphism& g)
{
    Report r;
    r.merge(verify_morphism(g), "inverse: ");
    r.add("g∘f = id", compose_morphisms(g, f) == identity_morphism(f.source()));
    r.add("f∘g = id", compose_morphisms(f, g) == identity_morphism(f.target()));
    return r;
}

Outcome ainfty_random_sweep(const RunConfig& cfg)
{
    require_arity(cfg.max_arity);
    auto reports = parallel_indexed<Report>(cfg.random, [&](std::size_t i) {
        Rng rng(cfg.seed + static_cast<unsigned>(i));
        auto fx = random_infty_iso(rng, cfg.max_arity);
        Report r = verify_morphism(fx.iso);
        r.merge(ainfty_roundtrip(fx.iso, invert_infty_iso(fx.iso)));
        return r;
    });
    Outcome out;
    out.report.subject = "random ∞-isomorphisms";
    for (std::size_t i = 0; i < reports.size(); ++i)
        out.report.merge(reports[i], "instance " + std::to_string(i) + ": ");
    out.result = json{{"instances", cfg.random}, {"max_arity", cfg.max_arity}};
    return out;
}

Outcome ainfty_command(const RunConfig& cfg)
{
    Outcome out;
    if (cfg.action == "verify") {
        if (cfg.inputs.empty() && cfg.random > 0)
            return ainfty_random_sweep(cfg);
        const std::string& path = input(cfg, 0);
        json doc = document(path);
        if (doc.contains("maps")) {
            auto f = io::parse_morphism(doc, context(path), path);
            out.report.subject = "A∞-morphism";
            out.report.merge(verify_ainfty_module(*f.source.module), "source: ");
            out.report.merge(verify_ainfty_module(*f.target.module), "target: ");
            out.report.merge(verify_morphism(f.morphism));
            out.result = json{{"arity", f.morphism.arity()}, {"shift", f.morphism.shift()}};
        } else {
            auto M = io::parse_module(doc, context(path), path);
            out.report = verify_ainfty_module(*M.module);
            out.result = json{{"arity", M.module->arity()}, {"strict", M.strict.has_value()}};
        }
    } else if (cfg.action == "compose") {
        auto eta = io::parse_morphism(document(input(cfg, 0)), context(input(cfg, 0)), input(cfg, 0));
        auto zeta = io::parse_morphism(document(input(cfg, 1)), context(input(cfg, 1)), input(cfg, 1));
        if (!same_space(zeta.morphism.target()->space(), eta.morphism.source()->space()))
            throw io::SchemaError("schema error: morphisms are not composable, the target of the second file is not the "
                                  "source of the first");
        std::vector<GradedMap> maps;
        for (std::size_t k = 1; k <= eta.morphism.arity(); ++k)
            maps.push_back(eta.morphism.map(k));
        AInftyMorphism eta2(zeta.morphism.target(), eta.morphism.target(), eta.morphism.shift(), std::move(maps));
        if (eta2.arity() != zeta.morphism.arity())
            throw io::ArityError("arity bound violation: composed morphisms need equal arity bounds");
        AInftyMorphism c = compose_morphisms(eta2, zeta.morphism);
        out.report = verify_morphism(c);
        out.result = io::morphism_json(c);
    } else if (cfg.action == "invert") {
        const std::string& path = input(cfg, 0);
        auto f = io::parse_morphism(document(path), context(path), path);
        try {
            AInftyMorphism g = invert_infty_iso(f.morphism);
            out.report = ainfty_roundtrip(f.morphism, g);
            out.result = io::morphism_json(g);
            out.result["kind"] = "inverse";
        } catch (const std::domain_error&) {
            if (!f.source.strict || !f.target.strict)
                throw;
            const StrictModule& M = *f.source.strict;
            const StrictModule& N = *f.target.strict;
            try {
                AInftyMorphism g = invert_infty_quasi_iso(f.morphism, M, N, retract_to_homology(M.complex()),
                                                          retract_to_homology(N.complex()));
                out.report = verify_morphism(g);
                out.report.add("f_1 is a quasi-isomorphism", true);
                out.result = io::morphism_json(g);
                out.result["kind"] = "homotopy inverse";
            } catch (const std::domain_error& e) {
                out.report = precondition("A∞-morphism", "f_1 is a quasi-isomorphism", e);
            }
        }
    } else if (cfg.action == "transfer") {
        require_arity(cfg.max_arity);
        const std::string& path = input(cfg, 0);
        auto M = io::parse_module(document(path), context(path), path);
        if (!M.strict)
            throw io::SchemaError("schema error in " + path + ": transfer needs a strict module");
        Report strict = verify_module(*M.strict);
        if (!strict.pass()) {
            out.report = strict;
            return out;
        }
        auto t = homotopy_transfer(*M.strict, retract_to_homology(M.strict->complex()), cfg.max_arity);
        out.report.subject = "homotopy transfer";
        out.report.merge(verify_ainfty_module(*t.small), "transferred: ");
        out.report.merge(verify_morphism(t.i), "i: ");
        out.report.merge(verify_morphism(t.p), "p: ");
        out.result = json{{"module", io::module_json(*t.small)}, {"i", io::morphism_json(t.i)}, {"p", io::morphism_json(t.p)}};
    } else {
        throw UsageError("unknown command: ainfty " + cfg.action);
    }
    return out;
}

// ---- pathmod ----

Report path_roundtrip(const PathMorphism& f, const PathMorphism& g)
{
    Report r;
    r.merge(verify_path_morphism(g), "inverse: ");
    auto same = [](const PathMorphism& a, const PathMorphism& b) {
        if (a.arity() != b.arity())
            return false;
        for (std::size_t k = 1; k <= a.arity(); ++k)
            if (!(a.map(k) == b.map(k)))
                return false;
        return true;
    };
    r.add("g∘f = id", same(compose_path(g, f), identity_path_morphism(f.source())));
    r.add("f∘g = id", same(compose_path(f, g), identity_path_morphism(f.target())));
    return r;
}

Outcome path_random_sweep(const RunConfig& cfg)
{
    require_arity(cfg.max_arity);
    auto reports = parallel_indexed<Report>(cfg.random, [&](std::size_t i) {
        Rng rng(cfg.seed + static_cast<unsigned>(i));
        auto fx = random_path_iso(rng, cfg.max_arity);
        Report r = verify_path_morphism(fx.iso);
        r.merge(path_roundtrip(fx.iso, invert_path_iso(fx.iso)));
        return r;
    });
    Outcome out;
    out.report.subject = "random path ∞-isomorphisms";
    for (std::size_t i = 0; i < reports.size(); ++i)
        out.report.merge(reports[i], "instance " + std::to_string(i) + ": ");
    out.result = json{{"instances", cfg.random}, {"max_arity", cfg.max_arity}};
    return out;
}

Outcome pathmod_command(const RunConfig& cfg)
{
    Outcome out;
    if (cfg.action == "verify") {
        if (cfg.inputs.empty() && cfg.random > 0)
            return path_random_sweep(cfg);
        const std::string& path = input(cfg, 0);
        json doc = document(path);
        if (doc.contains("maps")) {
            auto f = io::parse_path_morphism(doc, context(path), path);
            out.report.subject = "path morphism";
            out.report.merge(verify_path_module(*f.source.module), "source: ");
            out.report.merge(verify_path_module(*f.target.module), "target: ");
            out.report.merge(verify_path_morphism(f.morphism));
            out.result = json{{"arity", f.morphism.arity()}, {"shift", f.morphism.shift()}};
        } else {
            auto E = io::parse_path_module(doc, context(path), path);
            out.report = verify_path_module(*E.module);
            out.result = json{{"arity", E.module->arity()}, {"strict", E.strict.has_value()}};
        }
    } else if (cfg.action == "compose") {
        auto second = io::parse_path_morphism(document(input(cfg, 0)), context(input(cfg, 0)), input(cfg, 0));
        auto first = io::parse_path_morphism(document(input(cfg, 1)), context(input(cfg, 1)), input(cfg, 1));
        if (!same_space(first.morphism.target()->total_space(), second.morphism.source()->total_space()))
            throw io::SchemaError("schema error: path morphisms are not composable, the target of the second file is not "
                                  "the source of the first");
        if (first.morphism.arity() != second.morphism.arity())
            throw io::ArityError("arity bound violation: composed path morphisms need equal arity bounds");
        std::vector<GradedMap> maps;
        for (std::size_t k = 1; k <= second.morphism.arity(); ++k)
            maps.push_back(second.morphism.map(k));
        PathMorphism rebased(first.morphism.target(), second.morphism.target(), second.morphism.shift(), std::move(maps));
        PathMorphism c = compose_path(rebased, first.morphism);
        out.report = verify_path_morphism(c);
        out.result = io::path_morphism_json(c);
    } else if (cfg.action == "invert") {
        const std::string& path = input(cfg, 0);
        auto f = io::parse_path_morphism(document(path), context(path), path);
        try {
            PathMorphism g = invert_path_iso(f.morphism);
            out.report = path_roundtrip(f.morphism, g);
            out.result = io::path_morphism_json(g);
            out.result["kind"] = "inverse";
        } catch (const std::domain_error&) {
            if (!f.source.strict || !f.target.strict)
                throw;
            try {
                const PathModule& E1 = *f.source.module;
                const PathModule& E2 = *f.target.module;
                PathMorphism g = invert_path_quasi(f.morphism, E1, E2,
                                                   path_retract(E1, retract_to_homology(f.source.strict->complex())),
                                                   path_retract(E2, retract_to_homology(f.target.strict->complex())));
                out.report = verify_path_morphism(g);
                out.report.add("η_1 is a quasi-isomorphism", true);
                out.result = io::path_morphism_json(g);
                out.result["kind"] = "homotopy inverse";
            } catch (const std::domain_error& e) {
                out.report = precondition("path morphism", "η_1 is a quasi-isomorphism", e);
            }
        }
    } else if (cfg.action == "transfer") {
        require_arity(cfg.max_arity);
        const std::string& path = input(cfg, 0);
        auto E = io::parse_path_module(document(path), context(path), path);
        if (!E.strict)
            throw io::SchemaError("schema error in " + path + ": transfer needs a strict path module");
        Report strict = verify_path_module(*E.module);
        if (!strict.pass()) {
            out.report = strict;
            return out;
        }
        auto t = transfer_path(*E.module, path_retract(*E.module, retract_to_homology(E.strict->complex())), cfg.max_arity);
        out.report.subject = "path transfer";
        out.report.merge(verify_path_module(*t.small), "transferred: ");
        out.report.merge(verify_path_morphism(t.i), "i: ");
        out.report.merge(verify_path_morphism(t.p), "p: ");
        out.result = json{{"module", io::path_module_json(*t.small)},
                          {"i", io::path_morphism_json(t.i)},
                          {"p", io::path_morphism_json(t.p)}};
    } else {
        throw UsageError("unknown command: pathmod " + cfg.action);
    }
    return out;
}

// ---- morse ----

json grid_json(const FiltrationPages::Grid& grid)
{
    json out = json::array();
    for (const auto& [pq, d] : grid)
        if (d)
            out.push_back(json{{"p", pq.first}, {"q", pq.second}, {"dim", d}});
    return out;
}

Outcome morse_command(const RunConfig& cfg)
{
    const std::string& path = input(cfg, 0);
    json doc = document(path);
    auto ctx = context(path);
    TwistingCocycle T = io::parse_cocycle(io::child(doc, "cocycle", path), ctx, path + ".cocycle");
    Outcome out;
    out.report = verify_twisting_cocycle(T);
    if (cfg.action == "verify") {
        out.result = io::cocycle_json(T);
        out.result["longest_chain"] = T.longest_chain();
        return out;
    }
    if (!out.report.pass())
        return out;
    auto build = [&](const StrictModule& F, const std::string& name, std::optional<EnrichedComplex>& E) {
        try {
            E = build_enriched(F, T);
            out.report.add(name + "d_F∘d_F = 0", true);
        } catch (const std::invalid_argument& e) {
            out.report.add(name + "d_F∘d_F = 0", false, Witness{0, "", e.what()});
        }
    };
    if (cfg.action == "build" || cfg.action == "specseq") {
        StrictModule F = io::parse_fiber(io::child(doc, "fiber", path), ctx, T.algebra(), path + ".fiber");
        std::optional<EnrichedComplex> E;
        build(F, "", E);
        if (!E)
            return out;
        if (cfg.action == "build") {
            out.result = json{{"complex", io::complex_json(E->complex())}, {"homology", io::dims_json(homology_dims(E->complex()))}};
            return out;
        }
        if (cfg.page < 0)
            throw UsageError("usage error: --page must be nonnegative");
        auto pages = spectral_sequence(*E, static_cast<std::size_t>(std::max(cfg.page, 2)));
        out.report.merge(verify_spectral_sequence(pages), "spectral sequence: ");
        json totals = json::object();
        std::map<int, std::size_t> sums;
        for (const auto& [pq, d] : pages.infinity)
            if (d)
                sums[pq.first + pq.second] += d;
        out.result = json{{"page", cfg.page},
                          {"grid", grid_json(pages.dims.at(static_cast<std::size_t>(cfg.page)))},
                          {"infinity", grid_json(pages.infinity)},
                          {"total_infinity", io::dims_json(sums)},
                          {"homology", io::dims_json(pages.homology)}};
        return out;
    }
    if (cfg.action == "induce") {
        auto f = io::parse_morphism(io::child(doc, "morphism", path), ctx, path + ".morphism", T.algebra());
        if (!f.source.strict || !f.target.strict)
            throw io::SchemaError("schema error in " + path + ": fibers of enriched complexes must be strict modules");
        const std::size_t need = T.longest_chain() + 1;
        if (f.morphism.arity() < need)
            throw io::ArityError("arity bound violation: the cocycle needs η_1, ..., η_" + std::to_string(need) +
                                 " but the morphism stops at η_" + std::to_string(f.morphism.arity()));
        std::optional<EnrichedComplex> E1, E2;
        try {
            build(StrictModule(T.algebra(), f.source.strict->complex(), f.source.strict->action()), "source: ", E1);
            build(StrictModule(T.algebra(), f.target.strict->complex(), f.target.strict->action()), "target: ", E2);
        } catch (const std::invalid_argument& e) {
            throw io::SchemaError(std::string("schema error in ") + path + ": " + e.what());
        }
        if (!E1 || !E2)
            return out;
        out.report.merge(verify_morphism(f.morphism), "η: ");
        if (!out.report.pass())
            return out;
        try {
            GradedMap g = induce_morphism(f.morphism, *E1, *E2);
            out.report.add("induced map is a chain map", true);
            out.result = json{{"degree", g.degree()}, {"entries", io::map_json(g)}};
        } catch (const std::invalid_argument& e) {
            out.report.add("induced map is a chain map", false, Witness{0, "", e.what()});
        }
        return out;
    }
    throw UsageError("unknown command: morse " + cfg.action);
}

// ---- cubical ----

Outcome cubical_command(const RunConfig& cfg)
{
    const std::string& path = input(cfg, 0);
    json doc = document(path);
    CubicalSet X = io::parse_cubical_set(doc, context(path), path);
    Outcome out;
    out.report = verify_cubical_set(X);
    if (!out.report.pass())
        return out;
    std::vector<int> dims;
    for (int k = 0; k <= X.top_dim(); ++k)
        if (cfg.dim < 0 || cfg.dim == k)
            dims.push_back(k);
    if (cfg.dim > X.top_dim())
        throw UsageError("usage error: --dim " + std::to_string(cfg.dim) + " exceeds the top dimension " +
                         std::to_string(X.top_dim()));
    const Factors one{X.chain_space()};
    const Factors two{X.chain_space(), X.chain_space()};
    json cubes = json::array();
    if (cfg.action == "boundary") {
        for (int k : dims)
            for (std::size_t c = 0; c < X.count(k); ++c)
                cubes.push_back(json{{"cube", X.label(k, c)},
                                     {"dim", k},
                                     {"boundary", io::vec_json(cubical_boundary(X, CubeRef{k, c, {}}), one)}});
    } else if (cfg.action == "diagonal") {
        out.report.merge(verify_serre_diagonal(X), "diagonal: ");
        GradedMap delta = serre_diagonal(X);
        for (int k : dims)
            for (std::size_t c = 0; c < X.count(k); ++c)
                cubes.push_back(json{{"cube", X.label(k, c)},
                                     {"dim", k},
                                     {"diagonal", io::vec_json(delta.apply(cube_chain(X, CubeRef{k, c, {}})), two)}});
    } else {
        throw UsageError("unknown command: cubical " + cfg.action);
    }
    out.result["cubes"] = cubes;
    return out;
}

// ---- sng ----

Outcome sng_command(const RunConfig& cfg)
{
    Outcome out;
    if (cfg.max_k < 0)
        throw UsageError("usage error: --max-k must be nonnegative");
    if (cfg.action == "check") {
        std::vector<FiniteGroup> groups;
        std::vector<int> dims;
        if (cfg.all || cfg.group.empty()) {
            groups = {cyclic_group(2), cyclic_group(3), cyclic_group(5), quaternion_group(2)};
            dims = {3, 5};
        } else {
            groups = {load_group(cfg.group)};
            dims = {cfg.n};
        }
        out.report.subject = "string topology properties";
        json cases = json::array();
        for (const auto& G : groups)
            for (int n : dims) {
                Report r = verify_sng_properties(G, n, cfg.max_k);
                out.report.merge(r, G.name() + ", n = " + std::to_string(n) + ": ");
                cases.push_back(json{{"group", G.name()}, {"n", n}, {"pass", r.pass()}});
            }
        out.result = json{{"max_k", cfg.max_k}, {"cases", cases}};
        return out;
    }
    FiniteGroup G = load_group(cfg.group);
    try {
        require_odd_sphere(cfg.n);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("usage error: ") + e.what());
    }
    out.report.subject = "S^" + std::to_string(cfg.n) + "/" + G.name();
    if (cfg.action == "betti") {
        auto basis = loop_basis(G, cfg.n, cfg.max_k, cfg.relative);
        json classes = json::array();
        for (const auto& c : basis.classes)
            classes.push_back(io::loop_class_json(G, c, cfg.n));
        json betti = json::array();
        for (const auto& [q, d] : basis.betti)
            betti.push_back(json{{"degree", q}, {"dim", d}});
        json ccl = json::array();
        for (const auto& cls : conjugacy_classes(G)) {
            json members = json::array();
            for (auto g : cls)
                members.push_back(G.label(g));
            ccl.push_back(json{{"representative", G.label(cls.front())}, {"members", members}});
        }
        out.result = json{{"group", G.name()},      {"n", cfg.n},         {"max_k", cfg.max_k},
                          {"relative", cfg.relative}, {"conjugacy_classes", ccl}, {"betti", betti},
                          {"classes", classes}};
    } else if (cfg.action == "coproduct") {
        std::vector<FreeLoopClass> classes;
        if (!cfg.loop_class.empty()) {
            try {
                classes.push_back(parse_loop_class(G, cfg.loop_class));
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("usage error: ") + e.what());
            }
        } else {
            classes = loop_basis(G, cfg.n, cfg.max_k).classes;
        }
        json rows = json::array();
        for (const auto& c : classes) {
            CoproductRow row = lifted_coproduct(c, G, cfg.n);
            std::optional<Witness> bad;
            for (const auto& [pair, coeff] : row)
                if (pair.first.degree(cfg.n) + pair.second.degree(cfg.n) != c.degree(cfg.n) + 1 - cfg.n && !bad)
                    bad = Witness{c.degree(cfg.n), class_label(G, c), class_label(G, pair.first) + "⊗" + class_label(G, pair.second)};
            out.report.add("degree law on " + class_label(G, c), !bad, bad);
            rows.push_back(json{{"class", class_label(G, c)},
                                {"degree", c.degree(cfg.n)},
                                {"formula", format_row(G, row)},
                                {"terms", io::coproduct_row_json(G, row)}});
        }
        out.result = json{{"group", G.name()}, {"n", cfg.n}, {"rows", rows}};
    } else {
        throw UsageError("unknown command: sng " + cfg.action);
    }
    return out;
}

// ---- output ----

std::string scalar_text(const json& v)
{
    return v.is_string() ? v.get<std::string>() : v.dump();
}

std::size_t display_width(const std::string& s)
{
    std::size_t w = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80)
            ++w;
    return w;
}

void print_table(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                 const std::string& indent)
{
    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
        width[j] = display_width(header[j]);
        for (const auto& r : rows)
            width[j] = std::max(width[j], display_width(r[j]));
    }
    auto line = [&](const std::vector<std::string>& cells) {
        os << indent;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            os << cells[j];
            if (j + 1 < cells.size())
                os << std::string(width[j] - display_width(cells[j]) + 2, ' ');
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows)
        line(r);
}

bool flat_object(const json& v)
{
    if (!v.is_object())
        return false;
    for (const auto& [k, x] : v.items())
        if (x.is_structured())
            return false;
    return true;
}

void render(std::ostream& os, const json& v, const std::string& indent)
{
    for (const auto& [key, x] : v.items()) {
        if (!x.is_structured()) {
            os << indent << key << ": " << scalar_text(x) << '\n';
        } else if (x.is_array() && !x.empty() && std::all_of(x.begin(), x.end(), flat_object)) {
            std::vector<std::string> header;
            for (const auto& [k, _] : x.front().items())
                header.push_back(k);
            std::vector<std::vector<std::string>> rows;
            for (const auto& row : x) {
                std::vector<std::string> cells;
                for (const auto& h : header)
                    cells.push_back(row.contains(h) ? scalar_text(row[h]) : "");
                rows.push_back(cells);
            }
            os << indent << key << ":\n";
            print_table(os, header, rows, indent + "  ");
        } else if (x.is_array() && std::none_of(x.begin(), x.end(), [](const json& e) { return e.is_object(); })) {
            os << indent << key << ": " << x.dump() << '\n';
        } else if (x.is_array()) {
            os << indent << key << ":\n";
            for (std::size_t i = 0; i < x.size(); ++i) {
                os << indent << "  [" << i << "]\n";
                if (x[i].is_object())
                    render(os, x[i], indent + "    ");
                else
                    os << indent << "    " << x[i].dump() << '\n';
            }
        } else {
            os << indent << key << ":\n";
            render(os, x, indent + "  ");
        }
    }
}

void render_report(std::ostream& os, const json& report)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : report["checks"]) {
        std::string where;
        if (c.contains("witness"))
            where = "degree " + c["witness"]["degree"].dump() + " at " + c["witness"]["tensor"].get<std::string>() + ": " +
                    c["witness"]["value"].get<std::string>();
        else if (c.contains("detail"))
            where = c["detail"].get<std::string>();
        rows.push_back({c["name"].get<std::string>(), c["pass"].get<bool>() ? "pass" : "FAIL", where});
    }
    os << "report: " << report["subject"].get<std::string>() << '\n';
    if (!rows.empty())
        print_table(os, {"check", "status", "witness"}, rows, "  ");
}

void emit(const json& envelope, const std::string& format)
{
    if (format == "text") {
        std::ostringstream os;
        os << "command: " << envelope["command"].get<std::string>() << '\n';
        os << "status: " << envelope["status"].get<std::string>() << '\n';
        os << "seed: " << envelope["seed"].dump() << '\n';
        if (envelope.contains("error"))
            os << "error: " << envelope["error"]["message"].get<std::string>() << '\n';
        if (envelope.contains("report"))
            render_report(os, envelope["report"]);
        if (envelope.contains("result") && !envelope["result"].empty()) {
            os << "result:\n";
            render(os, envelope["result"], "  ");
        }
        if (envelope.contains("timings"))
            os << "timings: " << envelope["timings"]["total_ms"].dump() << " ms\n";
        std::cout << os.str();
    } else {
        std::cout << envelope.dump(2) << '\n';
    }
}

Outcome dispatch(const RunConfig& cfg)
{
    if (cfg.family == "complex")
        return complex_command(cfg);
    if (cfg.family == "ainfty")
        return ainfty_command(cfg);
    if (cfg.family == "pathmod")
        return pathmod_command(cfg);
    if (cfg.family == "morse")
        return morse_command(cfg);
    if (cfg.family == "cubical")
        return cubical_command(cfg);
    if (cfg.family == "sng")
        return sng_command(cfg);
    throw UsageError("unknown command: " + cfg.family);
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app{"Exact algebra for A∞-modules, path modules, twisted Morse complexes and string topology of Sⁿ/G"};
    app.footer("Commands:\n"
               "  complex homology|retract <complex.json>\n"
               "  ainfty verify|compose|invert|transfer <file>...\n"
               "  pathmod verify|compose|invert|transfer <file>...\n"
               "  morse verify|build|induce|specseq <file>\n"
               "  cubical diagonal|boundary <file>\n"
               "  sng betti|coproduct|check\n"
               "Set " + std::string(workers_env) + " to cap the number of worker threads.");
    app.add_option("family", cfg.family, "Command family")->required();
    app.add_option("action", cfg.action, "Command")->required();
    app.add_option("inputs", cfg.inputs, "Input documents");
    app.add_option("--max-arity", cfg.max_arity, "Arity bound K");
    app.add_option("--max-k", cfg.max_k, "Largest loop level k");
    app.add_option("--page", cfg.page, "Spectral sequence page r");
    app.add_option("--dim", cfg.dim, "Restrict to cubes of this dimension");
    app.add_option("--random", cfg.random, "Number of seeded random instances for verify");
    app.add_option("--seed", cfg.seed, "Seed for randomized sweeps");
    app.add_option("--group", cfg.group, "Group name (C<m>, Z/<m>, Q<4m>) or group.json");
    app.add_option("--n", cfg.n, "Odd sphere dimension n > 1");
    app.add_flag("--relative", cfg.relative, "Homology relative to the constant loops");
    app.add_option("--class", cfg.loop_class, "Loop class \"x,[g],k\" or \"y,[g],k\"");
    app.add_flag("--all", cfg.all, "Check every built-in test group");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    app.add_flag("--timings", cfg.timings, "Include wall-clock timings in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    json envelope{{"schema", io::schema_version}, {"command", cfg.family + " " + cfg.action}, {"seed", cfg.seed}};
    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    auto fail_input = [&](const std::string& kind, const std::string& message) {
        envelope["status"] = "error";
        envelope["error"] = json{{"kind", kind}, {"message", message}};
        std::cerr << message << '\n';
        code = 2;
    };
    try {
        Outcome out = dispatch(cfg);
        envelope["status"] = out.report.pass() ? "pass" : "fail";
        envelope["report"] = io::report_json(out.report);
        envelope["result"] = out.result;
        code = out.report.pass() ? 0 : 1;
    } catch (const io::SchemaError& e) {
        fail_input("schema", e.what());
    } catch (const io::ArityError& e) {
        fail_input("arity", e.what());
    } catch (const UsageError& e) {
        fail_input("usage", e.what());
    } catch (const std::exception& e) {
        fail_input("input", std::string("invalid input: ") + e.what());
    }
    if (cfg.timings) {
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        envelope["timings"] = json{{"total_ms", ms}};
    }
    emit(envelope, cfg.format);
    return code;
}
