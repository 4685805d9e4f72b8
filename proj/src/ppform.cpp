#include <absorb/ppform.hpp>

#include <absorb/engine.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace absorb {

using namespace json_util;

PPFormula::PPFormula(std::vector<std::string> variables, std::vector<int> free, std::vector<Atom> atoms)
    : variables_(std::move(variables)), free_(std::move(free)), atoms_(std::move(atoms))
{
    std::set<std::string> names;
    for (const auto& name : variables_) {
        if (name.empty())
            throw InputError("variable names must be nonempty");
        if (!names.insert(name).second)
            throw InputError("duplicate variable '" + name + "'");
    }
    const int n = variable_count();
    std::set<int> seen;
    for (int v : free_) {
        if (v < 0 || v >= n)
            throw InputError("free variable index out of range");
        if (!seen.insert(v).second)
            throw InputError("free variable '" + variables_[v] + "' listed twice");
    }
    for (const auto& atom : atoms_) {
        if (atom.relation.empty())
            throw InputError("atom without relation name");
        if (atom.scope.empty())
            throw InputError("atom '" + atom.relation + "' has empty scope");
        for (int v : atom.scope)
            if (v < 0 || v >= n)
                throw InputError("atom '" + atom.relation + "' refers to an unknown variable");
    }
}

PPFormula PPFormula::from_names(const std::vector<std::string>& free,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& atoms,
                                const std::vector<std::string>& extra_bound)
{
    std::vector<std::string> variables;
    std::map<std::string, int> index;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = index.emplace(name, static_cast<int>(variables.size()));
        if (inserted)
            variables.push_back(name);
        return it->second;
    };
    std::vector<int> free_idx;
    for (const auto& name : free) {
        if (index.contains(name))
            throw InputError("free variable '" + name + "' listed twice");
        free_idx.push_back(intern(name));
    }
    std::vector<Atom> out;
    for (const auto& [rel, scope] : atoms) {
        Atom atom{rel, {}};
        for (const auto& name : scope)
            atom.scope.push_back(intern(name));
        out.push_back(std::move(atom));
    }
    for (const auto& name : extra_bound)
        intern(name);
    return PPFormula(std::move(variables), std::move(free_idx), std::move(out));
}

int PPFormula::index_of(const std::string& name) const
{
    auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end())
        throw InputError("unknown variable '" + name + "'");
    return static_cast<int>(it - variables_.begin());
}

bool PPFormula::is_free(int variable) const
{
    return std::find(free_.begin(), free_.end(), variable) != free_.end();
}

void PPFormula::check_against(const RelationalStructure& structure) const
{
    for (const auto& atom : atoms_) {
        const Relation& rel = structure.relation(atom.relation);
        if (rel.arity() != static_cast<int>(atom.scope.size()))
            throw InputError("atom '" + atom.relation + "' has " + std::to_string(atom.scope.size()) +
                             " arguments but the relation has arity " + std::to_string(rel.arity()));
    }
}

Json to_json(const PPFormula& formula)
{
    const auto& names = formula.variables();
    Json free = Json::array();
    for (int v : formula.free())
        free.push_back(names[v]);
    Json atoms = Json::array();
    std::vector<bool> used(names.size(), false);
    for (int v : formula.free())
        used[v] = true;
    for (const auto& atom : formula.atoms()) {
        Json scope = Json::array();
        for (int v : atom.scope) {
            scope.push_back(names[v]);
            used[v] = true;
        }
        atoms.push_back(Json{{"rel", atom.relation}, {"scope", scope}});
    }
    Json j{{"free", free}, {"atoms", atoms}};
    Json bound = Json::array();
    for (std::size_t v = 0; v < names.size(); ++v)
        if (!used[v])
            bound.push_back(names[v]);
    if (!bound.empty())
        j["bound"] = bound;
    return j;
}

PPFormula formula_from_json(const Json& json)
{
    if (!json.is_object())
        throw ParseError("", "formula must be an object");
    auto names = [](const Json& arr, const std::string& where) {
        if (!arr.is_array())
            throw ParseError(where, "expected an array of variable names");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_string())
                throw ParseError(where + "/" + std::to_string(i), "expected a variable name");
            out.push_back(arr[i].get<std::string>());
        }
        return out;
    };
    auto free = names(member(json, "free", ""), "/free");
    const Json& atoms_json = member(json, "atoms", "");
    if (!atoms_json.is_array())
        throw ParseError("/atoms", "expected an array");
    std::vector<std::pair<std::string, std::vector<std::string>>> atoms;
    for (std::size_t i = 0; i < atoms_json.size(); ++i) {
        const std::string where = "/atoms/" + std::to_string(i);
        const Json& rel = member(atoms_json[i], "rel", where);
        if (!rel.is_string())
            throw ParseError(where + "/rel", "expected a relation name");
        atoms.emplace_back(rel.get<std::string>(), names(member(atoms_json[i], "scope", where), where + "/scope"));
    }
    std::vector<std::string> bound;
    if (json.contains("bound"))
        bound = names(json["bound"], "/bound");
    return PPFormula::from_names(free, atoms, bound);
}

namespace {

void check_tuple_cap(std::size_t count, const Limits& limits)
{
    if (count > limits.max_power_vertices)
        throw CapExceeded("formula evaluation exceeds " + std::to_string(limits.max_power_vertices) + " tuples");
}

// Tuples over the free variables of a subtree, grouped by the value of the
// subtree's root variable.
struct Partial {
    std::vector<int> vars;
    std::vector<std::vector<Tuple>> by_value;
};

std::vector<Tuple> product(const std::vector<Tuple>& left, const std::vector<Tuple>& right, const Limits& limits)
{
    check_tuple_cap(left.size() * right.size(), limits);
    std::vector<Tuple> out;
    out.reserve(left.size() * right.size());
    for (const auto& l : left)
        for (const auto& r : right) {
            Tuple t = l;
            t.insert(t.end(), r.begin(), r.end());
            out.push_back(std::move(t));
        }
    return out;
}

class TreeEvaluator {
public:
    TreeEvaluator(const PPFormula& formula, const RelationalStructure& structure, const FormulaReport& report,
                  const Limits& limits)
        : formula_(formula), structure_(structure), report_(report), limits_(limits)
    {
    }

    Partial solve_variable(int v, int parent_atom) const
    {
        const int size = structure_.size();
        Partial out;
        const bool free = formula_.is_free(v);
        if (free)
            out.vars.push_back(v);
        out.by_value.resize(size);
        for (Element a = 0; a < size; ++a)
            out.by_value[a].push_back(free ? Tuple{a} : Tuple{});
        for (int e : report_.atoms_of(v)) {
            if (e == parent_atom)
                continue;
            Partial child = solve_atom(e, v);
            out.vars.insert(out.vars.end(), child.vars.begin(), child.vars.end());
            for (Element a = 0; a < size; ++a)
                out.by_value[a] = product(out.by_value[a], child.by_value[a], limits_);
        }
        return out;
    }

    Partial solve_atom(int e, int parent_var) const
    {
        const Atom& atom = formula_.atoms()[e];
        const Relation& rel = structure_.relation(atom.relation);
        const int arity = static_cast<int>(atom.scope.size());
        const int p = static_cast<int>(std::find(atom.scope.begin(), atom.scope.end(), parent_var) - atom.scope.begin());
        std::vector<Partial> children(arity);
        Partial out;
        for (int q = 0; q < arity; ++q) {
            if (q == p)
                continue;
            children[q] = solve_variable(atom.scope[q], e);
            out.vars.insert(out.vars.end(), children[q].vars.begin(), children[q].vars.end());
        }
        out.by_value.resize(structure_.size());
        std::size_t total = 0;
        for (const auto& t : rel.tuples()) {
            std::vector<Tuple> acc{Tuple{}};
            for (int q = 0; q < arity && !acc.empty(); ++q)
                if (q != p)
                    acc = product(acc, children[q].by_value[t[q]], limits_);
            auto& bucket = out.by_value[t[p]];
            total += acc.size();
            check_tuple_cap(total, limits_);
            bucket.insert(bucket.end(), acc.begin(), acc.end());
        }
        for (auto& bucket : out.by_value) {
            std::sort(bucket.begin(), bucket.end());
            bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
        }
        return out;
    }

private:
    const PPFormula& formula_;
    const RelationalStructure& structure_;
    const FormulaReport& report_;
    const Limits& limits_;
};

} // namespace

Relation evaluate_pp_tree(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits)
{
    formula.check_against(structure);
    if (formula.variable_count() == 0)
        return Relation(0, {Tuple{}});
    FormulaReport report(formula);
    if (!report.is_tree())
        throw InputError("formula is not a tree");
    const int root = formula.free().empty() ? 0 : formula.free().front();
    Partial top = TreeEvaluator(formula, structure, report, limits).solve_variable(root, -1);
    // Reorder the columns into the order of the free variables.
    std::vector<int> column(formula.variable_count(), -1);
    for (std::size_t i = 0; i < top.vars.size(); ++i)
        column[top.vars[i]] = static_cast<int>(i);
    std::vector<Tuple> tuples;
    for (const auto& bucket : top.by_value)
        for (const auto& t : bucket) {
            Tuple out;
            out.reserve(formula.free().size());
            for (int v : formula.free())
                out.push_back(t[column[v]]);
            tuples.push_back(std::move(out));
        }
    return Relation(static_cast<int>(formula.free().size()), std::move(tuples));
}

Relation evaluate_pp_search(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits)
{
    formula.check_against(structure);
    if (formula.variable_count() == 0)
        return Relation(0, {Tuple{}});
    std::map<std::string, std::vector<Tuple>> grouped;
    for (const auto& atom : formula.atoms())
        grouped[atom.relation].push_back(atom.scope);
    std::map<std::string, Relation> relations;
    for (auto& [name, tuples] : grouped)
        relations.emplace(name, Relation(structure.relation(name).arity(), std::move(tuples)));
    auto source = std::make_shared<const RelationalStructure>(formula.variable_count(), std::move(relations));
    auto target = std::make_shared<const RelationalStructure>(structure);
    HomInstance instance(source, target);
    auto tuples = enumerate_images(instance, formula.free());
    check_tuple_cap(tuples.size(), limits);
    return Relation(static_cast<int>(formula.free().size()), std::move(tuples));
}

Relation evaluate_pp(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits)
{
    if (formula.variable_count() > 0 && FormulaReport(formula).is_tree())
        return evaluate_pp_tree(formula, structure, limits);
    return evaluate_pp_search(formula, structure, limits);
}

FormulaReport::FormulaReport(const PPFormula& formula) : formula_(formula)
{
    const int n = formula.variable_count();
    const int m = static_cast<int>(formula.atoms().size());
    var_atoms_.assign(n, {});
    degrees_.assign(n, 0);
    // Union-find over variables (0..n-1) and atoms (n..n+m-1).
    std::vector<int> parent(n + m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    int merges = 0;
    for (int e = 0; e < m; ++e) {
        const auto& scope = formula.atoms()[e].scope;
        for (int pos = 0; pos < static_cast<int>(scope.size()); ++pos) {
            const int v = scope[pos];
            incidences_.push_back({v, e, pos});
            ++degrees_[v];
            if (var_atoms_[v].empty() || var_atoms_[v].back() != e)
                var_atoms_[v].push_back(e);
            else
                simple_ = false;
            const int rv = find(v), re = find(n + e);
            if (rv != re) {
                parent[rv] = re;
                ++merges;
            }
        }
        std::vector<int> sorted = scope;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            simple_ = false;
    }
    // A forest has exactly (nodes - components) edges, i.e. every edge merges.
    acyclic_ = merges == static_cast<int>(incidences_.size());
    component_.assign(n, -1);
    std::map<int, int> ids;
    for (int v = 0; v < n; ++v) {
        auto [it, inserted] = ids.emplace(find(v), static_cast<int>(ids.size()));
        component_[v] = it->second;
    }
    component_count_ = static_cast<int>(ids.size());
}

std::vector<int> FormulaReport::leaves() const
{
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(degrees_.size()); ++v)
        if (degrees_[v] <= 1)
            out.push_back(v);
    return out;
}

std::vector<int> FormulaReport::atoms_of(int variable) const
{
    return var_atoms_.at(variable);
}

std::vector<int> FormulaReport::neighborhood(int variable) const
{
    std::set<int> out;
    for (int e : var_atoms_.at(variable))
        for (int w : formula_.atoms()[e].scope)
            if (w != variable)
                out.insert(w);
    return {out.begin(), out.end()};
}

std::vector<int> FormulaReport::branch(int root, int towards) const
{
    const int n = formula_.variable_count();
    if (root < 0 || root >= n || towards < 0 || towards >= n || root == towards)
        throw InputError("branch needs two distinct variables");
    auto spread = [&](std::vector<int> queue, std::vector<bool>& seen_var, std::vector<bool>& seen_atom) {
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (int e : var_atoms_[queue[i]]) {
                if (seen_atom[e])
                    continue;
                seen_atom[e] = true;
                for (int w : formula_.atoms()[e].scope)
                    if (!seen_var[w]) {
                        seen_var[w] = true;
                        queue.push_back(w);
                    }
            }
    };
    // Variables reachable from `towards` without passing through `root`.
    std::vector<bool> side(n, false), side_atoms(formula_.atoms().size(), false);
    side[root] = true;
    side[towards] = true;
    spread({towards}, side, side_atoms);
    int kept = -1;
    for (int e : var_atoms_[root]) {
        const auto& scope = formula_.atoms()[e].scope;
        if (std::any_of(scope.begin(), scope.end(), [&](int w) { return w != root && side[w]; })) {
            kept = e;
            break;
        }
    }
    if (kept < 0)
        throw InputError("branch: '" + formula_.variables()[towards] + "' is not connected to '" +
                         formula_.variables()[root] + "'");
    std::vector<bool> seen_var(n, false), seen_atom(formula_.atoms().size(), false);
    seen_var[root] = true;
    seen_atom[kept] = true;
    std::vector<int> queue;
    for (int w : formula_.atoms()[kept].scope)
        if (!seen_var[w]) {
            seen_var[w] = true;
            queue.push_back(w);
        }
    // Atoms on root other than `kept` stay removed.
    for (int e : var_atoms_[root])
        seen_atom[e] = true;
    spread(queue, seen_var, seen_atom);
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (seen_var[v])
            out.push_back(v);
    return out;
}

Json FormulaReport::to_json() const
{
    Json leaves_json = Json::array();
    for (int v : leaves())
        leaves_json.push_back(formula_.variables()[v]);
    Json degrees = Json::object();
    for (int v = 0; v < formula_.variable_count(); ++v)
        degrees[formula_.variables()[v]] = degrees_[v];
    return Json{{"variables", formula_.variable_count()},
                {"atoms", formula_.atoms().size()},
                {"degrees", degrees},
                {"leaves", leaves_json},
                {"components", component_count_},
                {"simple", simple_},
                {"acyclic", acyclic_},
                {"tree", is_tree()}};
}

FormulaReport analyze_formula(const PPFormula& formula)
{
    return FormulaReport(formula);
}

std::string register_relation(RelationalStructure& structure, const Relation& relation, const std::string& prefix)
{
    for (const auto& [name, rel] : structure.relations())
        if (rel == relation)
            return name;
    std::string name = prefix;
    for (int k = 0; structure.has_relation(name); ++k)
        name = prefix + std::to_string(k);
    structure = structure.with_relation(name, relation);
    return name;
}

std::optional<std::string> simplified_violation(const PPFormula& formula)
{
    const int n = formula.variable_count();
    if (n == 0)
        return "formula has no variables";
    if (n == 1) {
        if (!formula.is_free(0))
            return "single variable is bound";
        if (formula.atoms().size() > 1)
            return "single variable carries more than one atom";
        return std::nullopt;
    }
    FormulaReport report(formula);
    if (!report.connected())
        return "formula is not connected";
    for (const auto& atom : formula.atoms()) {
        if (atom.scope.size() == 1)
            return "unary atom '" + atom.relation + "'";
        std::vector<int> sorted = atom.scope;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            return "atom '" + atom.relation + "' repeats a variable";
    }
    for (int v = 0; v < n; ++v) {
        const int d = report.degree(v);
        const std::string& name = formula.variables()[v];
        if (formula.is_free(v) && d != 1)
            return "free variable '" + name + "' has degree " + std::to_string(d);
        if (!formula.is_free(v) && (d < 2 || d > 3))
            return "bound variable '" + name + "' has degree " + std::to_string(d);
    }
    return std::nullopt;
}

namespace {

// Mutable formula representation used while simplifying.
struct Work {
    std::vector<std::string> names;
    std::vector<bool> var_alive;
    std::vector<bool> is_free;
    std::vector<int> free;
    std::vector<Atom> atoms;
    std::vector<bool> atom_alive;
    RelationalStructure structure;
    std::set<std::string> used;
    const Limits* limits;

    int add_variable(const std::string& base)
    {
        std::string name = base + "'";
        while (used.contains(name))
            name += "'";
        used.insert(name);
        names.push_back(name);
        var_alive.push_back(true);
        is_free.push_back(false);
        return static_cast<int>(names.size()) - 1;
    }

    void add_atom(Atom atom)
    {
        atoms.push_back(std::move(atom));
        atom_alive.push_back(true);
    }

    std::vector<std::pair<int, int>> incidences(int v) const
    {
        std::vector<std::pair<int, int>> out;
        for (int e = 0; e < static_cast<int>(atoms.size()); ++e)
            if (atom_alive[e])
                for (int pos = 0; pos < static_cast<int>(atoms[e].scope.size()); ++pos)
                    if (atoms[e].scope[pos] == v)
                        out.emplace_back(e, pos);
        return out;
    }

    // Relation defined by a conjunction of atoms, projected onto `out_vars`.
    Relation derive(const std::vector<Atom>& parts, const std::vector<int>& out_vars) const
    {
        std::map<int, int> local;
        std::vector<std::string> local_names;
        auto intern = [&](int v) {
            auto [it, inserted] = local.emplace(v, static_cast<int>(local_names.size()));
            if (inserted)
                local_names.push_back("v" + std::to_string(v));
            return it->second;
        };
        std::vector<int> free_local;
        for (int v : out_vars)
            free_local.push_back(intern(v));
        std::vector<Atom> local_atoms;
        for (const auto& atom : parts) {
            Atom a{atom.relation, {}};
            for (int v : atom.scope)
                a.scope.push_back(intern(v));
            local_atoms.push_back(std::move(a));
        }
        return evaluate_pp(PPFormula(local_names, free_local, local_atoms), structure, *limits);
    }

    std::string name_of(const Relation& rel, const std::string& prefix)
    {
        return register_relation(structure, rel, prefix);
    }

    std::string equality()
    {
        return name_of(Relation::diagonal(structure.size(), 2), "_eq");
    }

    bool collapse_repeated_scopes()
    {
        bool changed = false;
        for (int e = 0; e < static_cast<int>(atoms.size()); ++e) {
            if (!atom_alive[e])
                continue;
            std::vector<int> unique;
            for (int v : atoms[e].scope)
                if (std::find(unique.begin(), unique.end(), v) == unique.end())
                    unique.push_back(v);
            if (unique.size() == atoms[e].scope.size())
                continue;
            Relation rel = derive({atoms[e]}, unique);
            atoms[e] = Atom{name_of(rel, "_d"), unique};
            changed = true;
        }
        return changed;
    }

    bool absorb_unary_atoms()
    {
        for (int e = 0; e < static_cast<int>(atoms.size()); ++e) {
            if (!atom_alive[e] || atoms[e].scope.size() != 1)
                continue;
            const int v = atoms[e].scope[0];
            const Relation& rel = structure.relation(atoms[e].relation);
            if (static_cast<int>(rel.size()) == structure.size()) {
                atom_alive[e] = false;
                return true;
            }
            for (auto [other, pos] : incidences(v)) {
                if (other == e)
                    continue;
                Relation merged = derive({atoms[other], atoms[e]}, atoms[other].scope);
                atoms[other].relation = name_of(merged, "_d");
                atom_alive[e] = false;
                return true;
            }
        }
        return false;
    }

    bool eliminate_bound_leaves()
    {
        for (int v = 0; v < static_cast<int>(names.size()); ++v) {
            if (!var_alive[v] || is_free[v])
                continue;
            auto inc = incidences(v);
            if (inc.empty()) {
                var_alive[v] = false;
                return true;
            }
            if (inc.size() != 1)
                continue;
            const int e = inc.front().first;
            if (atoms[e].scope.size() == 1) {
                if (structure.relation(atoms[e].relation).empty())
                    throw InputError("formula defines the empty relation");
                atom_alive[e] = false;
                var_alive[v] = false;
                return true;
            }
            std::vector<int> rest;
            for (int w : atoms[e].scope)
                if (w != v)
                    rest.push_back(w);
            Relation rel = derive({atoms[e]}, rest);
            atoms[e] = Atom{name_of(rel, "_d"), rest};
            var_alive[v] = false;
            return true;
        }
        return false;
    }

    bool detach_free_variables()
    {
        for (int v : free) {
            auto inc = incidences(v);
            if (inc.size() < 2)
                continue;
            const int copy = add_variable(names[v]);
            for (auto [e, pos] : inc)
                atoms[e].scope[pos] = copy;
            add_atom(Atom{equality(), {v, copy}});
            return true;
        }
        return false;
    }

    bool split_high_degree()
    {
        for (int v = 0; v < static_cast<int>(names.size()); ++v) {
            if (!var_alive[v] || is_free[v])
                continue;
            auto inc = incidences(v);
            if (inc.size() <= 3)
                continue;
            const int copy = add_variable(names[v]);
            for (std::size_t i = 2; i < inc.size(); ++i)
                atoms[inc[i].first].scope[inc[i].second] = copy;
            add_atom(Atom{equality(), {v, copy}});
            return true;
        }
        return false;
    }

    // Drops satisfiable components without free variables; rejects formulas
    // whose free variables are spread over several components.
    bool prune_components()
    {
        const int n = static_cast<int>(names.size());
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        for (int e = 0; e < static_cast<int>(atoms.size()); ++e)
            if (atom_alive[e])
                for (int v : atoms[e].scope)
                    parent[find(v)] = find(atoms[e].scope[0]);
        std::set<int> free_roots;
        for (int v : free)
            free_roots.insert(find(v));
        if (free_roots.size() > 1)
            throw InputError("free variables lie in different components");
        bool changed = false;
        std::map<int, std::vector<Atom>> bound_components;
        for (int v = 0; v < n; ++v)
            if (var_alive[v] && !free_roots.contains(find(v)))
                bound_components[find(v)];
        for (int e = 0; e < static_cast<int>(atoms.size()); ++e)
            if (atom_alive[e] && bound_components.contains(find(atoms[e].scope[0])))
                bound_components[find(atoms[e].scope[0])].push_back(atoms[e]);
        if (bound_components.empty())
            return false;
        for (const auto& [root, parts] : bound_components) {
            if (derive(parts, {}).empty())
                throw InputError("formula defines the empty relation");
            for (int v = 0; v < n; ++v)
                if (var_alive[v] && find(v) == root)
                    var_alive[v] = false;
            for (int e = 0; e < static_cast<int>(atoms.size()); ++e)
                if (atom_alive[e] && find(atoms[e].scope[0]) == root)
                    atom_alive[e] = false;
            changed = true;
        }
        return changed;
    }

    PPFormula compact() const
    {
        std::vector<int> index(names.size(), -1);
        std::vector<std::string> kept;
        for (std::size_t v = 0; v < names.size(); ++v)
            if (var_alive[v]) {
                index[v] = static_cast<int>(kept.size());
                kept.push_back(names[v]);
            }
        std::vector<int> new_free;
        for (int v : free)
            new_free.push_back(index[v]);
        std::vector<Atom> new_atoms;
        for (std::size_t e = 0; e < atoms.size(); ++e)
            if (atom_alive[e]) {
                Atom a{atoms[e].relation, {}};
                for (int v : atoms[e].scope)
                    a.scope.push_back(index[v]);
                new_atoms.push_back(std::move(a));
            }
        return PPFormula(kept, new_free, new_atoms);
    }
};

} // namespace

Rewritten simplify(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits)
{
    formula.check_against(structure);
    if (formula.free().empty())
        throw InputError("formula has no free variables");
    const Relation expected = evaluate_pp(formula, structure, limits);

    Work w;
    w.names = formula.variables();
    w.var_alive.assign(w.names.size(), true);
    w.is_free.assign(w.names.size(), false);
    for (int v : formula.free())
        w.is_free[v] = true;
    w.free = formula.free();
    w.atoms = formula.atoms();
    w.atom_alive.assign(w.atoms.size(), true);
    w.structure = structure;
    w.used.insert(w.names.begin(), w.names.end());
    w.limits = &limits;

    while (w.collapse_repeated_scopes() || w.absorb_unary_atoms() || w.eliminate_bound_leaves() ||
           w.detach_free_variables() || w.split_high_degree() || w.prune_components()) {
    }

    Rewritten out{w.compact(), std::move(w.structure)};
    if (evaluate_pp(out.formula, out.structure, limits) != expected)
        throw Error("simplification changed the defined relation");
    return out;
}

Rewritten pp_substitute(const PPFormula& formula, const RelationalStructure& structure,
                        const std::map<int, Relation>& replacements)
{
    formula.check_against(structure);
    RelationalStructure extended = structure;
    std::vector<Atom> atoms = formula.atoms();
    for (const auto& [index, rel] : replacements) {
        if (index < 0 || index >= static_cast<int>(atoms.size()))
            throw InputError("substitution refers to atom " + std::to_string(index) + " which does not exist");
        if (rel.arity() != static_cast<int>(atoms[index].scope.size()))
            throw InputError("substituted relation has the wrong arity");
        for (const auto& t : rel.tuples())
            for (Element e : t)
                if (e < 0 || e >= structure.size())
                    throw InputError("substituted relation leaves the domain");
        atoms[index].relation = register_relation(extended, rel, "_r");
    }
    return {PPFormula(formula.variables(), formula.free(), std::move(atoms)), std::move(extended)};
}

} // namespace absorb
