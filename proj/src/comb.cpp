#include <absorb/comb.hpp>

#include <absorb/bounds.hpp>
#include <absorb/engine.hpp>

#include <algorithm>
#include <set>

namespace absorb {

Rewritten comb_to_formula(const CombFormula& comb, const RelationalStructure& structure)
{
    const int lambda = comb.lambda();
    if (lambda < 1)
        throw InputError("a comb needs at least one section");
    RelationalStructure extended = structure;
    std::vector<std::string> names;
    for (int i = 1; i <= lambda; ++i)
        names.push_back("z" + std::to_string(i));
    for (int i = 1; i <= lambda + 1; ++i)
        names.push_back("w" + std::to_string(i));
    std::vector<int> free;
    for (int i = 0; i < lambda; ++i)
        free.push_back(i);
    std::vector<Atom> atoms;
    for (int i = 0; i < lambda; ++i) {
        if (comb.sections[i].arity() != 3)
            throw InputError("comb sections must be ternary");
        atoms.push_back({register_relation(extended, comb.sections[i], "_comb" + std::to_string(i + 1)),
                         {i, lambda + i, lambda + i + 1}});
    }
    return {PPFormula(names, free, atoms), std::move(extended)};
}

Json to_json(const CombFormula& comb)
{
    Json sections = Json::array();
    for (const auto& s : comb.sections)
        sections.push_back(to_json(s));
    Json j{{"sections", sections}};
    if (!comb.provenance.empty())
        j["provenance"] = comb.provenance;
    return j;
}

CombFormula comb_from_json(const Json& json, int domain_size)
{
    const Json& sections = json_util::member(json, "sections", "");
    if (!sections.is_array() || sections.empty())
        throw ParseError("/sections", "expected a nonempty array of relations");
    CombFormula comb;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const std::string where = "/sections/" + std::to_string(i);
        Relation rel = relation_from_json(sections[i], domain_size, where);
        if (rel.arity() != 3)
            throw ParseError(where, "comb sections must be ternary");
        comb.sections.push_back(std::move(rel));
    }
    if (json.contains("provenance") && json["provenance"].is_array())
        for (const auto& p : json["provenance"])
            comb.provenance.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    return comb;
}

int leaves_outside(const FormulaReport& report, const PPFormula& phi, int u, int z1)
{
    const auto inside = report.branch(u, z1);
    int count = 0;
    for (int x : phi.free())
        if (!std::binary_search(inside.begin(), inside.end(), x))
            ++count;
    if (phi.is_free(u))
        ++count;
    return count;
}

namespace {

std::vector<int> difference(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

int argmax_leaves(const FormulaReport& report, const PPFormula& phi, const std::vector<int>& candidates, int z1)
{
    int best = -1, best_l = -1;
    for (int u : candidates) {
        const int l = leaves_outside(report, phi, u, z1);
        if (l > best_l) {
            best = u;
            best_l = l;
        }
    }
    return best;
}

// Sub-formula induced on `vars`, with the given free variables and B on the
// unselected free variables it contains.
PPFormula induced(const PPFormula& phi, const std::vector<int>& vars, const std::vector<int>& free,
                  const std::vector<bool>& selected, const std::string& b_name)
{
    std::vector<int> local(phi.variable_count(), -1);
    std::vector<std::string> names;
    for (int v : vars) {
        local[v] = static_cast<int>(names.size());
        names.push_back(phi.variables()[v]);
    }
    std::vector<Atom> atoms;
    for (const auto& atom : phi.atoms()) {
        if (!std::all_of(atom.scope.begin(), atom.scope.end(), [&](int v) { return local[v] >= 0; }))
            continue;
        Atom a{atom.relation, {}};
        for (int v : atom.scope)
            a.scope.push_back(local[v]);
        atoms.push_back(std::move(a));
    }
    for (int v : vars)
        if (phi.is_free(v) && !selected[v])
            atoms.push_back({b_name, {local[v]}});
    std::vector<int> local_free;
    for (int v : free)
        local_free.push_back(local[v]);
    return PPFormula(names, local_free, atoms);
}

std::string variable_list(const PPFormula& phi, const std::vector<int>& vars)
{
    std::string out;
    for (int v : vars)
        out += (out.empty() ? "" : ",") + phi.variables()[v];
    return out;
}

} // namespace

CombExtraction comb_extract(const PPFormula& phi, const RelationalStructure& structure, const Subset& b, int z1,
                            const Limits& limits)
{
    phi.check_against(structure);
    structure.check_subset(b);
    const FormulaReport report(phi);
    if (!report.is_tree())
        throw InputError("comb extraction needs a tree formula");
    if (auto violation = simplified_violation(phi))
        throw InputError("formula is not in simplified form: " + *violation);
    if (z1 < 0 || z1 >= phi.variable_count() || !phi.is_free(z1))
        throw InputError("z1 must be a free variable");
    const auto first = report.neighborhood(z1);
    if (first.empty())
        throw InputError("z1 has no neighbours");

    CombExtraction out;
    out.kappa = static_cast<int>(phi.free().size());
    out.theta = 2;
    for (const auto& atom : phi.atoms())
        out.theta = std::max(out.theta, static_cast<int>(atom.scope.size()));

    int prev = z1;
    int cur = argmax_leaves(report, phi, first, z1);
    out.selected.push_back(z1);
    out.spine.push_back(cur);
    while (report.degree(cur) > 1) {
        const auto back = report.branch(cur, prev);
        const auto forward = difference(report.neighborhood(cur), back);
        if (forward.empty())
            break;
        if (forward.size() == 1) {
            cur = forward.front();
            out.spine.back() = cur;
            continue;
        }
        const int next = argmax_leaves(report, phi, forward, z1);
        const auto region = difference(report.branch(next, cur), back);
        int tooth = -1;
        for (int v : region)
            if (v != next && phi.is_free(v)) {
                tooth = v;
                break;
            }
        if (tooth < 0)
            throw Error("comb extraction found no leaf in a new branch");
        out.selected.push_back(tooth);
        prev = cur;
        cur = next;
        out.spine.push_back(cur);
    }
    const int lambda = static_cast<int>(out.selected.size());
    if (!within_comb_bound(out.kappa, out.theta, lambda))
        throw Error("comb arity bound fails: kappa " + std::to_string(out.kappa) + ", lambda " +
                    std::to_string(lambda));

    out.structure = structure;
    std::vector<Tuple> b_tuples;
    for (Element e : b.elements())
        b_tuples.push_back({e});
    const std::string b_name = register_relation(out.structure, Relation(1, b_tuples), "_B");
    std::vector<bool> selected(phi.variable_count(), false);
    for (int z : out.selected)
        selected[z] = true;

    std::vector<Atom> fixed_atoms = phi.atoms();
    for (int x : phi.free())
        if (!selected[x])
            fixed_atoms.push_back({b_name, {x}});
    out.fixed = PPFormula(phi.variables(), out.selected, fixed_atoms);

    // w(1) = z1, w(j) = spine[j - 2].
    auto w = [&](int j) { return j == 1 ? z1 : out.spine[j - 2]; };
    for (int i = 1; i <= lambda; ++i) {
        std::vector<int> vars = report.branch(w(i + 1), w(i));
        if (i > 1) {
            vars = difference(vars, report.branch(w(i), w(i - 1)));
            vars.insert(std::lower_bound(vars.begin(), vars.end(), w(i)), w(i));
        }
        Relation section;
        if (i == 1) {
            const Relation pair = evaluate_pp(induced(phi, vars, {z1, w(2)}, selected, b_name), out.structure, limits);
            std::vector<Tuple> tuples;
            for (const auto& t : pair.tuples())
                tuples.push_back({t[0], t[0], t[1]});
            section = Relation(3, std::move(tuples));
        } else {
            section = evaluate_pp(induced(phi, vars, {out.selected[i - 1], w(i), w(i + 1)}, selected, b_name),
                                  out.structure, limits);
        }
        out.comb.sections.push_back(std::move(section));
        out.comb.provenance.push_back("induced on " + variable_list(phi, vars));
    }
    return out;
}

Digraph comb_step(const CombFormula& comb, int i, const Subset& support, int domain_size)
{
    if (i < 1 || i > comb.lambda())
        throw InputError("comb section index out of range");
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : comb.sections[i - 1].tuples())
        if (support.contains(t[0]))
            edges.emplace_back(t[1], t[2]);
    return Digraph(domain_size, std::move(edges));
}

Digraph comb_path(const CombFormula& comb, int k, int l, const Subset& support, int domain_size)
{
    if (k < 1 || l <= k || l > comb.lambda() + 1)
        throw InputError("comb path needs 1 <= k < l <= lambda + 1");
    Digraph out = comb_step(comb, k, support, domain_size);
    for (int i = k + 1; i < l; ++i)
        out = compose(out, comb_step(comb, i, support, domain_size));
    return out;
}

namespace {

Subset image(const Subset& from, const Digraph& d)
{
    std::set<Element> out;
    for (auto [u, v] : d.edges())
        if (from.contains(u))
            out.insert(v);
    return Subset({out.begin(), out.end()});
}

Subset preimage(const Subset& to, const Digraph& d)
{
    std::set<Element> out;
    for (auto [u, v] : d.edges())
        if (to.contains(v))
            out.insert(u);
    return Subset({out.begin(), out.end()});
}

} // namespace

CombReport comb_analyze(const CombFormula& comb, const RelationalStructure& structure, const Subset& b,
                        const Limits& limits)
{
    structure.check_subset(b);
    const int lambda = comb.lambda();
    if (lambda < 1)
        throw InputError("a comb needs at least one section");
    const int n = structure.size();
    const Subset all = Subset::full(n);
    CombReport report;
    report.lambda = lambda;
    std::vector<Digraph> pb;
    for (int i = 1; i <= lambda; ++i)
        pb.push_back(comb_step(comb, i, b, n));
    for (int i = 2; i <= lambda; ++i) {
        Subset g = all;
        for (int j = 1; j < i; ++j)
            g = image(g, pb[j - 1]);
        Subset h = all;
        for (int j = lambda; j >= i; --j)
            h = preimage(h, pb[j - 1]);
        report.g.push_back(std::move(g));
        report.h.push_back(std::move(h));
    }
    for (int k = 2; k <= lambda && !report.repeated; ++k)
        for (int l = k + 1; l <= lambda; ++l)
            if (report.g[k - 2] == report.g[l - 2] && report.h[k - 2] == report.h[l - 2]) {
                report.repeated = std::make_pair(k, l);
                break;
            }
    if (lambda >= 2) {
        const Rewritten f = comb_to_formula(comb, structure);
        report.comb_essential = is_b_essential(evaluate_pp(f.formula, f.structure, limits), b);
    }
    if (!report.repeated)
        return report;

    const auto [k, l] = *report.repeated;
    const Subset& g = report.g[k - 2];
    const Subset& h = report.h[k - 2];
    const Digraph p = comb_path(comb, k, l, b, n);
    const Digraph q = comb_path(comb, k, l, all, n);
    report.gh_disjoint = std::none_of(g.elements().begin(), g.elements().end(),
                                      [&](Element e) { return h.contains(e); });
    report.q_meets_gh = std::any_of(q.edges().begin(), q.edges().end(),
                                    [&](const auto& e) { return g.contains(e.first) && h.contains(e.second); });
    report.g_predecessors = std::all_of(g.elements().begin(), g.elements().end(), [&](Element c) {
        return std::any_of(p.edges().begin(), p.edges().end(),
                           [&](const auto& e) { return e.second == c && g.contains(e.first); });
    });
    report.h_successors = std::all_of(h.elements().begin(), h.elements().end(), [&](Element a) {
        return std::any_of(p.edges().begin(), p.edges().end(),
                           [&](const auto& e) { return e.first == a && h.contains(e.second); });
    });
    report.g_closed = std::all_of(p.edges().begin(), p.edges().end(),
                                  [&](const auto& e) { return !g.contains(e.first) || g.contains(e.second); });
    report.p_within_q = std::all_of(p.edges().begin(), p.edges().end(),
                                    [&](const auto& e) { return q.has_edge(e.first, e.second); });
    report.reach = digraph_reach(p, g, h);
    report.contradiction = report.comb_essential && report.gh_disjoint && report.g_closed && report.q_meets_gh &&
                           report.g_predecessors && report.h_successors;
    report.p = p;
    report.q = q;
    return report;
}

Json to_json(const CombReport& report)
{
    Json g = Json::array(), h = Json::array();
    for (const auto& s : report.g)
        g.push_back(s.elements());
    for (const auto& s : report.h)
        h.push_back(s.elements());
    Json j{{"lambda", report.lambda},
           {"g", g},
           {"h", h},
           {"comb_essential", report.comb_essential},
           {"contradiction", report.contradiction}};
    if (report.repeated) {
        j["repeated"] = {report.repeated->first, report.repeated->second};
        j["p"] = to_json(*report.p);
        j["q"] = to_json(*report.q);
        j["gh_disjoint"] = report.gh_disjoint;
        j["q_meets_gh"] = report.q_meets_gh;
        j["g_predecessors"] = report.g_predecessors;
        j["h_successors"] = report.h_successors;
        j["g_closed"] = report.g_closed;
        j["p_within_q"] = report.p_within_q;
        j["reach"] = report.reach ? Json(*report.reach) : Json(nullptr);
    } else {
        j["repeated"] = nullptr;
    }
    return j;
}

} // namespace absorb
