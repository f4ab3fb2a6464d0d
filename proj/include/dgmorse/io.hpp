#ifndef DGMORSE_IO_HPP
#define DGMORSE_IO_HPP

#include "dgmorse/ainfty.hpp"
#include "dgmorse/cubical.hpp"
#include "dgmorse/morse.hpp"
#include "dgmorse/pathmod.hpp"
#include "dgmorse/sng.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * @file
 * JSON codecs for every input and output document. Every top-level document carries
 * "schema": 1. Nested documents may be given inline or as a string path relative to the
 * file that references them.
 */

namespace dgmorse::io {

using json = nlohmann::ordered_json;

constexpr int schema_version = 1;

/// Malformed input: unreadable file, invalid JSON, wrong schema or unresolved labels.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally valid input whose arity bound is too small for the requested operation.
class ArityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_schema(const json& doc, const std::string& where)
{
    if (!doc.is_object())
        throw SchemaError("schema error in " + where + ": expected a JSON object");
    if (!doc.contains("schema"))
        throw SchemaError("schema error in " + where + ": missing \"schema\" field");
    if (doc["schema"] != schema_version)
        throw SchemaError("schema error in " + where + ": unsupported schema " + doc["schema"].dump() + ", expected " +
                          std::to_string(schema_version));
}

inline json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("schema error: cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("schema error: '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

/// Reads a top-level document and checks its schema version.
inline json load_document(const std::filesystem::path& path)
{
    json doc = read_json(path);
    require_schema(doc, path.string());
    return doc;
}

/// Resolves nested documents given by path; remembers the directory of the referencing file.
class Context {
public:
    explicit Context(std::filesystem::path base = ".") : base_(std::move(base)) {}

    static Context of_file(const std::filesystem::path& path) { return Context(path.parent_path()); }

    json resolve(const json& node) const
    {
        if (!node.is_string())
            return node;
        return load_document(base_ / node.get<std::string>());
    }

private:
    std::filesystem::path base_;
};

template <class T>
T field(const json& node, const char* key, const std::string& where)
{
    if (!node.is_object() || !node.contains(key))
        throw SchemaError("schema error in " + where + ": missing field \"" + key + "\"");
    try {
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw SchemaError("schema error in " + where + ": field \"" + key + "\" has the wrong type");
    }
}

inline const json& child(const json& node, const char* key, const std::string& where)
{
    if (!node.is_object() || !node.contains(key))
        throw SchemaError("schema error in " + where + ": missing field \"" + key + "\"");
    return node.at(key);
}

// ---- scalars, spaces and maps ----

inline Scalar parse_value(const json& v)
{
    try {
        if (v.is_number_integer())
            return Scalar(v.get<long>());
        if (v.is_string())
            return parse_scalar(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("schema error: ") + e.what());
    }
    throw SchemaError("schema error: coefficient " + v.dump() + " must be an integer or a \"p/q\" string");
}

inline json scalar_json(const Scalar& c)
{
    return c.get_str();
}

/// { "basis": { "<degree>": ["label", ...] }, "degrees": [int] (optional) }
inline SpacePtr parse_space(const json& node, const std::string& where)
{
    const json& basis = child(node, "basis", where);
    if (!basis.is_object())
        throw SchemaError("schema error in " + where + ": \"basis\" must map degrees to label lists");
    std::vector<BasisElement> elems;
    std::set<std::string> seen;
    for (const auto& [deg, labels] : basis.items()) {
        int q = 0;
        try {
            std::size_t used = 0;
            q = std::stoi(deg, &used);
            if (used != deg.size())
                throw std::invalid_argument(deg);
        } catch (const std::exception&) {
            throw SchemaError("schema error in " + where + ": degree key '" + deg + "' is not an integer");
        }
        if (!labels.is_array())
            throw SchemaError("schema error in " + where + ": basis in degree " + deg + " must be a list");
        for (const auto& l : labels) {
            if (!l.is_string())
                throw SchemaError("schema error in " + where + ": basis labels must be strings");
            if (!seen.insert(l.get<std::string>()).second)
                throw SchemaError("schema error in " + where + ": basis label '" + l.get<std::string>() + "' repeated");
            elems.push_back({q, l.get<std::string>()});
        }
    }
    std::vector<int> degrees;
    if (node.contains("degrees"))
        degrees = field<std::vector<int>>(node, "degrees", where);
    return make_space(std::move(elems), std::move(degrees));
}

inline json space_json(const SpacePtr& S)
{
    json basis = json::object();
    for (int q : S->degrees()) {
        json labels = json::array();
        auto [b, e] = S->range(q);
        for (std::size_t i = b; i < e; ++i)
            labels.push_back(S->label(i));
        basis[std::to_string(q)] = labels;
    }
    return json{{"basis", basis}};
}

inline Key parse_key(const json& node, const Factors& factors, const std::string& where)
{
    std::vector<std::string> labels;
    if (node.is_string())
        labels.push_back(node.get<std::string>());
    else if (node.is_array())
        for (const auto& l : node) {
            if (!l.is_string())
                throw SchemaError("schema error in " + where + ": tensor labels must be strings");
            labels.push_back(l.get<std::string>());
        }
    else
        throw SchemaError("schema error in " + where + ": basis reference " + node.dump() + " must be a label or a list");
    if (labels.size() != factors.size())
        throw SchemaError("schema error in " + where + ": " + node.dump() + " needs " + std::to_string(factors.size()) +
                          " tensor factors");
    Key k;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto idx = factors[i]->find(labels[i]);
        if (!idx)
            throw SchemaError("schema error in " + where + ": unknown basis label '" + labels[i] + "'");
        k.push(static_cast<std::int32_t>(*idx));
    }
    return k;
}

inline json key_json(const Key& k, const Factors& factors)
{
    if (factors.size() == 1)
        return factors[0]->label(static_cast<std::size_t>(k[0]));
    json out = json::array();
    for (std::size_t i = 0; i < k.size(); ++i)
        out.push_back(factors[i]->label(static_cast<std::size_t>(k[i])));
    return out;
}

/// Sparse triplets [[source degree, row, column, "p/q"], ...]; rows and columns are labels or label lists.
inline GradedMap parse_map(const json& entries, const Factors& source, const Factors& target, int degree,
                           const std::string& where)
{
    if (!entries.is_array())
        throw SchemaError("schema error in " + where + ": entries must be a list");
    GradedMap out(source, target, degree);
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer())
            throw SchemaError("schema error in " + where + ": entry " + e.dump() + " must be [degree, row, column, value]");
        Key col = parse_key(e[2], source, where);
        Key row = parse_key(e[1], target, where);
        int q = e[0].get<int>();
        if (key_degree(source, col) != q || key_degree(target, row) != q + degree)
            throw SchemaError("schema error in " + where + ": entry " + e.dump() + " does not respect the grading");
        out.add_entry(col, row, parse_value(e[3]));
    }
    return out;
}

inline json map_json(const GradedMap& f)
{
    json entries = json::array();
    for (const auto& [col, v] : f.columns())
        for (const auto& [row, c] : v)
            entries.push_back(
                json::array({key_degree(f.source(), col), key_json(row, f.target()), key_json(col, f.source()), scalar_json(c)}));
    return entries;
}

inline json vec_json(const Vec& v, const Factors& factors)
{
    json out = json::array();
    for (const auto& [k, c] : v)
        out.push_back(json::array({key_json(k, factors), scalar_json(c)}));
    return out;
}

// ---- complexes ----

/// { "space": {...}, "differential": [entries] }; the differential has degree -1.
inline ChainComplex parse_complex(const json& node, const std::string& where, bool checked = true)
{
    SpacePtr S = parse_space(child(node, "space", where), where);
    GradedMap d = node.contains("differential") ? parse_map(node["differential"], {S}, {S}, -1, where) : GradedMap(S, S, -1);
    return checked ? ChainComplex(S, std::move(d)) : ChainComplex::unchecked(S, std::move(d));
}

inline json complex_json(const ChainComplex& C)
{
    return json{{"space", space_json(C.space())}, {"differential", map_json(C.differential())}};
}

// ---- groups and algebras ----

/// A built-in name ("C2", "Z/3", "Q8") or { "name", "elements": [labels], "table": [[labels]] }.
inline FiniteGroup parse_group(const json& node, const std::string& where)
{
    try {
        if (node.is_string())
            return named_group(node.get<std::string>());
        auto elements = field<std::vector<std::string>>(node, "elements", where);
        auto rows = field<std::vector<std::vector<std::string>>>(node, "table", where);
        std::vector<std::vector<std::size_t>> table;
        std::map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < elements.size(); ++i)
            idx[elements[i]] = i;
        for (const auto& row : rows) {
            std::vector<std::size_t> r;
            for (const auto& l : row) {
                if (!idx.count(l))
                    throw SchemaError("schema error in " + where + ": table entry '" + l + "' is not an element");
                r.push_back(idx[l]);
            }
            table.push_back(std::move(r));
        }
        std::string name = node.contains("name") ? field<std::string>(node, "name", where) : "G";
        return FiniteGroup(name, elements, table);
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json group_json(const FiniteGroup& G)
{
    json table = json::array();
    for (std::size_t g = 0; g < G.order(); ++g) {
        json row = json::array();
        for (std::size_t h = 0; h < G.order(); ++h)
            row.push_back(G.label(G.multiply(g, h)));
        table.push_back(row);
    }
    return json{{"schema", schema_version}, {"name", G.name()}, {"elements", G.labels()}, {"table", table}};
}

/**
 * { "group": name | group } for ℝ[G], { "truncated_polynomial": {"degree", "top"} }, { "acyclic": true },
 * or explicit { "space", "differential", "product": [entries over [a, b]], "unit": label }.
 */
inline AlgebraPtr parse_algebra(const json& raw, const Context& ctx, const std::string& where)
{
    json node = ctx.resolve(raw);
    try {
        if (node.contains("group"))
            return std::make_shared<const DGAlgebra>(group_algebra(parse_group(node["group"], where)));
        if (node.contains("truncated_polynomial")) {
            const json& t = node["truncated_polynomial"];
            return std::make_shared<const DGAlgebra>(
                truncated_polynomial(field<int>(t, "degree", where), field<int>(t, "top", where)));
        }
        if (node.contains("acyclic"))
            return std::make_shared<const DGAlgebra>(acyclic_algebra());
        ChainComplex C = parse_complex(node, where);
        const SpacePtr& S = C.space();
        GradedMap mu = parse_map(child(node, "product", where), {S, S}, {S}, 0, where);
        auto unit = S->find(field<std::string>(node, "unit", where));
        if (!unit)
            throw SchemaError("schema error in " + where + ": unknown unit label");
        return std::make_shared<const DGAlgebra>(std::move(C), std::move(mu), *unit);
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json algebra_json(const DGAlgebra& A)
{
    json out = complex_json(A.complex());
    out["product"] = map_json(A.mu());
    out["unit"] = A.space()->label(A.unit());
    return out;
}

// ---- modules and morphisms ----

/// A module as read from JSON: the A∞ structure, and the strict module when all m_{≥3} vanish.
struct LoadedModule {
    ModulePtr module;
    std::optional<StrictModule> strict;
};

/**
 * { "algebra", "kind": "regular" | "trivial" } or
 * { "algebra", "kind": "conjugation", "group", "n", "top" } or explicit
 * { "algebra", "space", "differential", "action": [entries over [m, a]],
 *   "higher": [ { "arity": k, "entries": [...] } ], "arity": K }.
 * Without "algebra" the context algebra is used. Module axioms are not checked here; run the verifier.
 */
inline LoadedModule parse_module(const json& raw, const Context& ctx, const std::string& where,
                                 const AlgebraPtr& fallback = nullptr)
{
    json node = ctx.resolve(raw);
    AlgebraPtr A = node.contains("algebra") ? parse_algebra(node["algebra"], ctx, where + ".algebra") : fallback;
    if (!A)
        throw SchemaError("schema error in " + where + ": missing field \"algebra\"");
    std::size_t K = node.contains("arity") ? field<std::size_t>(node, "arity", where) : 2;
    if (K < 2)
        throw ArityError("arity bound violation in " + where + ": a module needs arity at least 2");
    try {
        if (node.contains("kind")) {
            auto kind = field<std::string>(node, "kind", where);
            StrictModule M;
            if (kind == "regular")
                M = regular_module(A);
            else if (kind == "trivial")
                M = trivial_module(A);
            else if (kind == "conjugation")
                M = conjugation_module(parse_group(child(node, "group", where), where), A, field<int>(node, "n", where),
                                       field<int>(node, "top", where));
            else
                throw SchemaError("schema error in " + where + ": unknown module kind '" + kind + "'");
            return {std::make_shared<const AInftyModule>(AInftyModule::from_strict(M, K)), M};
        }
        ChainComplex C = parse_complex(node, where, false);
        const SpacePtr& S = C.space();
        GradedMap act = parse_map(child(node, "action", where), {S, A->space()}, {S}, 0, where);
        std::vector<GradedMap> ops{act};
        bool strict = true;
        if (node.contains("higher"))
            for (const auto& h : node["higher"]) {
                auto k = field<std::size_t>(h, "arity", where);
                if (k != ops.size() + 2)
                    throw SchemaError("schema error in " + where + ": higher operations must be listed as m_3, m_4, ...");
                ops.push_back(parse_map(child(h, "entries", where), detail::fiber_factors(AInftyModule::frame_of(*A), S, k),
                                        {S}, static_cast<int>(k) - 2, where));
                strict = strict && ops.back().is_zero();
            }
        K = std::max(K, ops.size() + 1);
        for (std::size_t k = ops.size() + 2; k <= K; ++k)
            ops.emplace_back(detail::fiber_factors(AInftyModule::frame_of(*A), S, k), Factors{S}, static_cast<int>(k) - 2);
        std::optional<StrictModule> sm;
        if (strict)
            sm = StrictModule::unchecked(A, C, act);
        return {std::make_shared<const AInftyModule>(A, C, std::move(ops)), sm};
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json module_json(const AInftyModule& M)
{
    json out = complex_json(M.complex());
    out["algebra"] = algebra_json(*M.algebra());
    out["arity"] = M.arity();
    out["action"] = map_json(M.op(2));
    json higher = json::array();
    for (std::size_t k = 3; k <= M.arity(); ++k)
        higher.push_back(json{{"arity", k}, {"entries", map_json(M.op(k))}});
    out["higher"] = higher;
    return out;
}

struct LoadedMorphism {
    LoadedModule source;
    LoadedModule target;
    AInftyMorphism morphism;
};

/// { "source": module, "target": module, "shift": m, "maps": [[entries of f_1], [entries of f_2], ...] }.
inline LoadedMorphism parse_morphism(const json& raw, const Context& ctx, const std::string& where,
                                     const AlgebraPtr& fallback = nullptr)
{
    json node = ctx.resolve(raw);
    LoadedModule src = parse_module(child(node, "source", where), ctx, where + ".source", fallback);
    LoadedModule tgt = parse_module(child(node, "target", where), ctx, where + ".target", src.module->algebra());
    int shift = node.contains("shift") ? field<int>(node, "shift", where) : 0;
    const json& maps = child(node, "maps", where);
    if (!maps.is_array() || maps.empty())
        throw ArityError("arity bound violation in " + where + ": a morphism needs at least f_1");
    std::vector<GradedMap> fs;
    for (std::size_t k = 1; k <= maps.size(); ++k)
        fs.push_back(parse_map(maps[k - 1], detail::fiber_factors(src.module->frame(), src.module->space(), k),
                               {tgt.module->space()}, shift + static_cast<int>(k) - 1, where));
    try {
        return {src, tgt, AInftyMorphism(src.module, tgt.module, shift, std::move(fs))};
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json morphism_json(const AInftyMorphism& f)
{
    json maps = json::array();
    for (std::size_t k = 1; k <= f.arity(); ++k)
        maps.push_back(map_json(f.map(k)));
    return json{{"shift", f.shift()}, {"maps", maps}};
}

// ---- path modules ----

/// { "algebra", "coefficients": complex, "base": label } for A⊗W, or { "algebra" } for the trivial pair.
inline PairPtr parse_pair(const json& raw, const Context& ctx, const std::string& where)
{
    json node = ctx.resolve(raw);
    AlgebraPtr A = parse_algebra(child(node, "algebra", where), ctx, where + ".algebra");
    try {
        if (!node.contains("coefficients"))
            return std::make_shared<const PathPair>(PathPair::trivial(A));
        ChainComplex W = parse_complex(node["coefficients"], where + ".coefficients");
        return std::make_shared<const PathPair>(PathPair::tensor(A, W, field<std::string>(node, "base", where)));
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

struct LoadedPathModule {
    PathModulePtr module;
    std::optional<StrictModule> strict; ///< underlying module when the path module is strict
};

/**
 * { "pair", "module": strict module, "arity": K, "higher": [ { "arity": k, "entries" } ] }: the strict
 * path module of the module, with optional higher operations m_k: F⊗A^{⊗k-2}⊗P → E.
 */
inline LoadedPathModule parse_path_module(const json& raw, const Context& ctx, const std::string& where)
{
    json node = ctx.resolve(raw);
    PairPtr pair = parse_pair(child(node, "pair", where), ctx, where + ".pair");
    LoadedModule M = parse_module(child(node, "module", where), ctx, where + ".module", pair->algebra());
    if (!M.strict)
        throw SchemaError("schema error in " + where + ": the underlying module of a path module must be strict");
    std::size_t K = node.contains("arity") ? field<std::size_t>(node, "arity", where) : 2;
    if (K < 2)
        throw ArityError("arity bound violation in " + where + ": a path module needs arity at least 2");
    try {
        PathModule base = strict_path_module(StrictModule::unchecked(pair->algebra(), M.strict->complex(), M.strict->action()),
                                             pair, 2);
        std::vector<GradedMap> ops{base.op(2)};
        bool strict = true;
        if (node.contains("higher"))
            for (const auto& h : node["higher"]) {
                auto k = field<std::size_t>(h, "arity", where);
                if (k != ops.size() + 2)
                    throw SchemaError("schema error in " + where + ": higher operations must be listed as m_3, m_4, ...");
                ops.push_back(parse_map(child(h, "entries", where), detail::full_factors(base.frame(), base.fiber_space(), k),
                                        {base.total_space()}, static_cast<int>(k) - 2, where));
                strict = strict && ops.back().is_zero();
            }
        K = std::max(K, ops.size() + 1);
        for (std::size_t k = ops.size() + 2; k <= K; ++k)
            ops.emplace_back(detail::full_factors(base.frame(), base.fiber_space(), k), Factors{base.total_space()},
                             static_cast<int>(k) - 2);
        auto E = std::make_shared<const PathModule>(pair, base.total(), base.fiber(), std::move(ops));
        return {E, strict ? M.strict : std::nullopt};
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json path_module_json(const PathModule& E)
{
    json ops = json::array();
    for (std::size_t k = 2; k <= E.arity(); ++k)
        ops.push_back(json{{"arity", k}, {"entries", map_json(E.op(k))}});
    return json{{"total", complex_json(E.total())}, {"fiber", space_json(E.fiber_space())}, {"operations", ops}};
}

struct LoadedPathMorphism {
    LoadedPathModule source;
    LoadedPathModule target;
    PathMorphism morphism;
};

/// { "source": path module, "target": path module, "shift", "maps": [[η_1 on totals], [η_2 entries], ...] }.
inline LoadedPathMorphism parse_path_morphism(const json& raw, const Context& ctx, const std::string& where)
{
    json node = ctx.resolve(raw);
    LoadedPathModule src = parse_path_module(child(node, "source", where), ctx, where + ".source");
    LoadedPathModule tgt = parse_path_module(child(node, "target", where), ctx, where + ".target");
    int shift = node.contains("shift") ? field<int>(node, "shift", where) : 0;
    const json& maps = child(node, "maps", where);
    if (!maps.is_array() || maps.empty())
        throw ArityError("arity bound violation in " + where + ": a path morphism needs at least η_1");
    std::vector<GradedMap> fs;
    fs.push_back(parse_map(maps[0], {src.module->total_space()}, {tgt.module->total_space()}, shift, where));
    for (std::size_t k = 2; k <= maps.size(); ++k)
        fs.push_back(parse_map(maps[k - 1], detail::full_factors(src.module->frame(), src.module->fiber_space(), k),
                               {tgt.module->total_space()}, shift + static_cast<int>(k) - 1, where));
    try {
        return {src, tgt, PathMorphism(src.module, tgt.module, shift, std::move(fs))};
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json path_morphism_json(const PathMorphism& f)
{
    json maps = json::array();
    for (std::size_t k = 1; k <= f.arity(); ++k)
        maps.push_back(map_json(f.map(k)));
    return json{{"shift", f.shift()}, {"maps", maps}};
}

// ---- twisting cocycles ----

/**
 * { "lens": { "group", "n", "generator" (optional label) } } for the lens cocycle over ℝ[G], or
 * { "algebra", "critical": [["x", index], ...], "entries": [["x", "y", {"a": "p/q", ...}], ...] }.
 */
inline TwistingCocycle parse_cocycle(const json& raw, const Context& ctx, const std::string& where)
{
    json node = ctx.resolve(raw);
    try {
        if (node.contains("lens")) {
            const json& l = node["lens"];
            FiniteGroup G = parse_group(child(l, "group", where), where);
            auto A = std::make_shared<const DGAlgebra>(group_algebra(G));
            std::size_t gen = l.contains("generator") ? G.index(field<std::string>(l, "generator", where)) : 1;
            if (gen >= G.order())
                throw SchemaError("schema error in " + where + ": the lens generator is not a group element");
            return lens_cocycle(G, A, field<int>(l, "n", where), gen);
        }
        AlgebraPtr A = parse_algebra(child(node, "algebra", where), ctx, where + ".algebra");
        std::vector<std::pair<std::string, int>> points;
        for (const auto& p : child(node, "critical", where)) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_number_integer())
                throw SchemaError("schema error in " + where + ": critical points are [label, index] pairs");
            points.emplace_back(p[0].get<std::string>(), p[1].get<int>());
        }
        TwistingCocycle T(A, critical_set(points));
        if (node.contains("entries"))
            for (const auto& e : node["entries"]) {
                if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_object())
                    throw SchemaError("schema error in " + where + ": entries are [x, y, {algebra label: value}]");
                Vec m;
                for (const auto& [label, c] : e[2].items())
                    add_term(m, parse_key(json(label), {A->space()}, where), parse_value(c));
                T.set(e[0].get<std::string>(), e[1].get<std::string>(), m);
            }
        return T;
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    } catch (const std::out_of_range& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

inline json cocycle_json(const TwistingCocycle& T)
{
    json crit = json::array();
    for (const auto& b : T.crit()->basis())
        crit.push_back(json::array({b.label, b.degree}));
    json entries = json::array();
    for (const auto& [xy, m] : T.entries()) {
        json value = json::object();
        for (const auto& [k, c] : m)
            value[T.algebra()->space()->label(static_cast<std::size_t>(k[0]))] = scalar_json(c);
        entries.push_back(json::array({T.crit()->label(xy.first), T.crit()->label(xy.second), value}));
    }
    return json{{"critical", crit}, {"entries", entries}};
}

/// Fiber reference inside a Morse document: "regular", "trivial", or a module document.
inline StrictModule parse_fiber(const json& raw, const Context& ctx, const AlgebraPtr& A, const std::string& where)
{
    try {
        if (raw.is_string() && raw == "regular")
            return regular_module(A);
        if (raw.is_string() && raw == "trivial")
            return trivial_module(A);
        LoadedModule M = parse_module(raw, ctx, where, A);
        if (!M.strict)
            throw SchemaError("schema error in " + where + ": fibers of enriched complexes must be strict modules");
        return StrictModule(A, M.strict->complex(), M.strict->action());
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

// ---- cubical sets ----

inline CubeRef parse_cube_ref(const CubicalSet& X, const json& node, const std::string& where)
{
    try {
        if (node.is_string())
            return X.cube(node.get<std::string>());
        CubeRef c = X.cube(field<std::string>(node, "cube", where));
        for (int i : field<std::vector<int>>(node, "degeneracies", where))
            c = X.degeneracy(c, i);
        return c;
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    } catch (const std::out_of_range& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

/**
 * { "builtin": "cube:n" | "sphere:n" | "torus" } or
 * { "cubes": [ { "label", "dim", "faces": [[∂ᵢ⁰, ∂ᵢ¹], ...] } ] }, where a face is a label or
 * { "cube": label, "degeneracies": [i, ...] } for s_{i_r}⋯s_{i_1}(cube), applied in list order.
 * "product": [doc, doc, ...] forms the product of several sets.
 */
inline CubicalSet parse_cubical_set(const json& raw, const Context& ctx, const std::string& where)
{
    json node = ctx.resolve(raw);
    try {
        if (node.contains("product")) {
            const json& parts = node["product"];
            if (!parts.is_array() || parts.empty())
                throw SchemaError("schema error in " + where + ": \"product\" must be a nonempty list");
            CubicalSet X = parse_cubical_set(parts[0], ctx, where);
            for (std::size_t i = 1; i < parts.size(); ++i)
                X = product(X, parse_cubical_set(parts[i], ctx, where));
            return X;
        }
        if (node.contains("builtin")) {
            auto name = field<std::string>(node, "builtin", where);
            if (name == "torus")
                return torus();
            auto colon = name.find(':');
            if (colon != std::string::npos) {
                std::string kind = name.substr(0, colon);
                int n = std::stoi(name.substr(colon + 1));
                if (kind == "cube")
                    return standard_cube(n);
                if (kind == "sphere")
                    return sphere(n);
            }
            throw SchemaError("schema error in " + where + ": unknown builtin cubical set '" + name + "'");
        }
        CubicalSet X;
        for (const auto& c : child(node, "cubes", where)) {
            auto label = field<std::string>(c, "label", where);
            int dim = field<int>(c, "dim", where);
            CubicalSet::Faces faces;
            if (c.contains("faces"))
                for (const auto& pair : c["faces"]) {
                    if (!pair.is_array() || pair.size() != 2)
                        throw SchemaError("schema error in " + where + ": faces of '" + label + "' come in pairs [∂⁰, ∂¹]");
                    faces.push_back({parse_cube_ref(X, pair[0], where), parse_cube_ref(X, pair[1], where)});
                }
            X.add_cube(label, dim, std::move(faces));
        }
        return X;
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error in " + where + ": " + e.what());
    }
}

// ---- reports ----

inline json witness_json(const Witness& w)
{
    return json{{"degree", w.degree}, {"tensor", w.tensor}, {"value", w.value}};
}

inline json report_json(const Report& r)
{
    json checks = json::array();
    for (const auto& c : r.checks) {
        json j{{"name", c.name}, {"pass", c.pass}};
        if (c.witness)
            j["witness"] = witness_json(*c.witness);
        if (!c.detail.empty())
            j["detail"] = c.detail;
        checks.push_back(j);
    }
    return json{{"subject", r.subject}, {"pass", r.pass()}, {"checks", checks}};
}

inline json dims_json(const std::map<int, std::size_t>& dims)
{
    json out = json::object();
    for (const auto& [q, d] : dims)
        out[std::to_string(q)] = d;
    return out;
}

inline json loop_class_json(const FiniteGroup& G, const FreeLoopClass& c, int n)
{
    return json{{"class", class_label(G, c)}, {"degree", c.degree(n)}};
}

inline json coproduct_row_json(const FiniteGroup& G, const CoproductRow& row)
{
    json out = json::array();
    for (const auto& [pair, c] : row)
        out.push_back(json{{"left", class_label(G, pair.first)}, {"right", class_label(G, pair.second)}, {"coefficient", scalar_json(c)}});
    return out;
}

} // namespace dgmorse::io

#endif // DGMORSE_IO_HPP
