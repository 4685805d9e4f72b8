#include <absorb/decide.hpp>

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace absorb {

namespace {

std::vector<Tuple> quintuple_generators(const Quintuple& q)
{
    return {{q.b1, q.a, q.a}, {q.b2, q.c, q.c}, {q.d, q.a, q.c}};
}

JonssonDigraph digraph_over(const PowerStructure& cube, const Subset& b, const Quintuple& q)
{
    Subpower sub = generate_subpower(cube, quintuple_generators(q));
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : sub.tuples.tuples())
        if (b.contains(t[0]))
            edges.emplace_back(t[1], t[2]);
    return {std::move(sub.tuples), Digraph(cube.base_size(), std::move(edges))};
}

/// A ternary polymorphism of the expanded structure sending the generator
/// columns (b1,b2,d), (a,c,a), (a,c,c) to b, u, v.
OperationTable generating_table(const PowerStructure& cube, const Quintuple& q, Element b, Element u, Element v)
{
    HomInstance instance(cube.structure(), cube.base());
    auto columns = cube.columns_of(quintuple_generators(q));
    instance.pin(columns[0], b);
    instance.pin(columns[1], u);
    instance.pin(columns[2], v);
    auto table = find_hom(instance);
    if (!table)
        throw Error("internal: generated triple has no generating polymorphism");
    return OperationTable(cube.base_size(), 3, std::move(*table));
}

void check_input(const RelationalStructure& structure, const Subset& b)
{
    if (b.empty())
        throw InputError("B must be nonempty");
    structure.check_subset(b);
}

std::string describe(const Tuple& t)
{
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < t.size(); ++i)
        out << (i ? "," : "") << t[i];
    out << ')';
    return out.str();
}

} // namespace

JonssonDigraph jonsson_digraph(const RelationalStructure& structure, const Subset& b, const Quintuple& q,
                               const Limits& limits)
{
    check_input(structure, b);
    for (Element e : {q.a, q.c, q.d, q.b1, q.b2})
        if (e < 0 || e >= structure.size())
            throw InputError("quintuple entry out of range");
    if (!b.contains(q.b1) || !b.contains(q.b2))
        throw InputError("b1 and b2 must lie in B");
    PowerStructure cube(with_singletons(structure).structure, 3, limits);
    return digraph_over(cube, b, q);
}

Decision decide_jonsson(const RelationalStructure& structure, const Subset& b, const Limits& limits)
{
    check_input(structure, b);
    const auto expanded = with_singletons(structure).structure;
    if (!closure_unary(expanded, b, limits).is_subuniverse)
        throw InputError("B is not a subuniverse of the idempotent polymorphism algebra");

    Decision decision;
    decision.property = "jonsson-absorbing";
    const int n = structure.size();
    if (static_cast<int>(b.size()) == n) {
        decision.holds = true;
        decision.certificate = Certificate{};
        return decision;
    }

    PowerStructure cube(expanded, 3, limits);
    Certificate certificate;
    for (Element a = 0; a < n; ++a)
        for (Element c = 0; c < n; ++c)
            for (Element d = 0; d < n; ++d)
                for (Element b1 : b.elements())
                    for (Element b2 : b.elements()) {
                        Quintuple q{a, c, d, b1, b2};
                        JonssonDigraph jd = digraph_over(cube, b, q);
                        auto walk = digraph_reach(jd.edges, Subset({a}), Subset({c}));
                        if (!walk) {
                            decision.holds = false;
                            decision.failing = q;
                            return decision;
                        }
                        QuintupleCertificate entry{q, {}};
                        for (std::size_t i = 0; i + 1 < walk->size(); ++i) {
                            Element u = (*walk)[i];
                            Element v = (*walk)[i + 1];
                            Element color = -1;
                            for (Element cand : b.elements())
                                if (jd.generated.contains(Tuple{cand, u, v})) {
                                    color = cand;
                                    break;
                                }
                            entry.steps.push_back({color, u, v, generating_table(cube, q, color, u, v)});
                        }
                        certificate.quintuples.push_back(std::move(entry));
                    }
    decision.holds = true;
    decision.certificate = std::move(certificate);
    return decision;
}

Decision decide_absorption(const RelationalStructure& structure, const Subset& b, const Limits& limits)
{
    Decision decision = decide_jonsson(structure, b, limits);
    decision.property = "absorbing";
    return decision;
}

bool is_absorption_term(const RelationalStructure& structure, const Subset& b, const OperationTable& term)
{
    if (term.domain_size() != structure.size())
        return false;
    if (!term.is_idempotent() || !is_polymorphism(structure, term))
        return false;
    for (std::size_t idx = 0; idx < term.values().size(); ++idx) {
        Tuple args = term.arguments_of(idx);
        auto outside = std::count_if(args.begin(), args.end(), [&](Element e) { return !b.contains(e); });
        if (outside <= 1 && !b.contains(term.values()[idx]))
            return false;
    }
    return true;
}

ChainCheck is_jonsson_chain(const RelationalStructure& structure, const Subset& b, const ChainWitness& chain)
{
    const int n = structure.size();
    if (chain.terms.empty())
        return {false, "empty chain"};
    for (std::size_t i = 0; i < chain.terms.size(); ++i) {
        const auto& d = chain.terms[i];
        if (d.arity() != 3 || d.domain_size() != n)
            return {false, "term " + std::to_string(i) + " is not a ternary operation on the domain"};
    }
    const auto& first = chain.terms.front();
    const auto& last = chain.terms.back();
    for (std::size_t idx = 0; idx < first.values().size(); ++idx) {
        Tuple xyz = first.arguments_of(idx);
        if (first.values()[idx] != xyz[0])
            return {false, "d_0 differs from the first projection at " + describe(xyz)};
        if (last.values()[idx] != xyz[2])
            return {false, "d_" + std::to_string(chain.terms.size() - 1) + " differs from the third projection at " +
                               describe(xyz)};
    }
    for (std::size_t i = 0; i + 1 < chain.terms.size(); ++i)
        for (Element x = 0; x < n; ++x)
            for (Element y = 0; y < n; ++y) {
                Element lhs = chain.terms[i]({x, y, y});
                Element rhs = chain.terms[i + 1]({x, x, y});
                if (lhs != rhs) {
                    std::ostringstream msg;
                    msg << "link " << i << ": d_" << i << "(x,y,y)=" << lhs << " vs d_" << i + 1 << "(x,x,y)=" << rhs
                        << " at x=" << x << ",y=" << y;
                    return {false, msg.str()};
                }
            }
    for (std::size_t i = 0; i < chain.terms.size(); ++i) {
        const auto& d = chain.terms[i];
        if (!d.is_idempotent() || !is_polymorphism(structure, d))
            return {false, "d_" + std::to_string(i) + " is not an idempotent polymorphism"};
        for (Element x : b.elements())
            for (Element y = 0; y < n; ++y)
                for (Element z : b.elements())
                    if (!b.contains(d({x, y, z})))
                        return {false, "d_" + std::to_string(i) + " maps " + describe({x, y, z}) + " outside B"};
    }
    return {true, ""};
}

ChainWitness chain_from_absorption_term(const OperationTable& term)
{
    const int size = term.domain_size();
    const int n = term.arity();
    ChainWitness chain;
    chain.terms.push_back(OperationTable::projection(size, 3, 0));
    // For n = 1 the middle term is (x,y,z) -> t(y); this only links up when B = A.
    for (int i = 1; i <= n; ++i) {
        chain.terms.push_back(OperationTable::from_function(size, 3, [&](std::span<const Element> xyz) {
            Tuple args(n);
            for (int p = 0; p < n; ++p)
                args[p] = p < i - 1 ? xyz[2] : (p == i - 1 ? xyz[1] : xyz[0]);
            return term(args);
        }));
    }
    chain.terms.push_back(OperationTable::projection(size, 3, 2));
    return chain;
}

std::optional<ChainWitness> oracle_chain_search(const RelationalStructure& structure, const Relation& outer,
                                                const Relation& inner)
{
    const int size = structure.size();
    if (size > 2)
        throw CapExceeded("exhaustive chain search needs a domain of at most 2 elements");
    if (outer.arity() != inner.arity())
        throw InputError("inner and outer relations must share an arity");
    const int cells = size * size * size;
    const std::size_t table_count = std::size_t{1} << (size == 1 ? 0 : cells);

    std::vector<OperationTable> candidates;
    for (std::size_t code = 0; code < table_count; ++code) {
        std::vector<Element> values(cells);
        for (int i = 0; i < cells; ++i)
            values[i] = size == 1 ? 0 : static_cast<Element>((code >> (cells - 1 - i)) & 1);
        OperationTable d(size, 3, std::move(values));
        if (!d.is_idempotent() || !is_polymorphism(structure, d))
            continue;
        bool absorbs = true;
        Tuple image(inner.arity());
        for (const auto& s1 : inner.tuples()) {
            for (const auto& r : outer.tuples()) {
                for (const auto& s2 : inner.tuples()) {
                    for (int j = 0; j < inner.arity(); ++j)
                        image[j] = d({s1[j], r[j], s2[j]});
                    if (!inner.contains(image)) {
                        absorbs = false;
                        break;
                    }
                }
                if (!absorbs)
                    break;
            }
            if (!absorbs)
                break;
        }
        if (absorbs)
            candidates.push_back(std::move(d));
    }

    auto linked = [size](const OperationTable& d, const OperationTable& e) {
        for (Element x = 0; x < size; ++x)
            for (Element y = 0; y < size; ++y)
                if (d({x, y, y}) != e({x, x, y}))
                    return false;
        return true;
    };
    const auto first = OperationTable::projection(size, 3, 0);
    const auto third = OperationTable::projection(size, 3, 2);
    auto index_of = [&](const OperationTable& t) {
        return static_cast<int>(std::find(candidates.begin(), candidates.end(), t) - candidates.begin());
    };
    const int start = index_of(first);
    const int goal = index_of(third);

    // BFS over walks of length >= 1 from the first to the third projection.
    const int count = static_cast<int>(candidates.size());
    std::vector<int> parent(count, -2);
    std::deque<int> queue{start};
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int next = 0; next < count; ++next) {
            if (!linked(candidates[cur], candidates[next]))
                continue;
            if (next == goal) {
                std::vector<int> path{goal};
                for (int v = cur; v != start; v = parent[v])
                    path.push_back(v);
                path.push_back(start);
                std::reverse(path.begin(), path.end());
                ChainWitness chain;
                for (int v : path)
                    chain.terms.push_back(candidates[v]);
                return chain;
            }
            if (parent[next] == -2 && next != start) {
                parent[next] = cur;
                queue.push_back(next);
            }
        }
    }
    return std::nullopt;
}

std::optional<ChainWitness> oracle_chain_search(const RelationalStructure& structure, const Subset& b)
{
    if (b.empty())
        throw InputError("B must be nonempty");
    structure.check_subset(b);
    std::vector<Tuple> inner;
    for (Element e : b.elements())
        inner.push_back({e});
    return oracle_chain_search(structure, Relation::full(structure.size(), 1), Relation(1, std::move(inner)));
}

Verification verify_np_certificate(const RelationalStructure& structure, const Subset& b, const Certificate& cert)
{
    const int n = structure.size();
    if (b.empty())
        return {false, "B is empty"};
    for (Element e : b.elements())
        if (e < 0 || e >= n)
            return {false, "B has an element out of range"};
    if (static_cast<int>(b.size()) == n && cert.quintuples.empty())
        return {true, ""};

    std::set<Quintuple> seen;
    for (const auto& entry : cert.quintuples) {
        const Quintuple& q = entry.q;
        std::string where = "quintuple " + describe({q.a, q.c, q.d, q.b1, q.b2});
        for (Element e : {q.a, q.c, q.d, q.b1, q.b2})
            if (e < 0 || e >= n)
                return {false, where + ": entry out of range"};
        if (!b.contains(q.b1) || !b.contains(q.b2))
            return {false, where + ": b1, b2 must lie in B"};
        if (!seen.insert(q).second)
            return {false, where + ": listed twice"};
        if (static_cast<int>(entry.steps.size()) > n)
            return {false, where + ": walk longer than the domain size"};
        Element at = q.a;
        for (std::size_t s = 0; s < entry.steps.size(); ++s) {
            const auto& step = entry.steps[s];
            std::string here = where + " step " + std::to_string(s);
            const auto& phi = step.phi;
            if (phi.arity() != 3 || phi.domain_size() != n)
                return {false, here + ": phi is not a ternary table on the domain"};
            if (!phi.is_idempotent() || !is_polymorphism(structure, phi))
                return {false, here + ": not a polymorphism"};
            if (phi({q.b1, q.b2, q.d}) != step.b || phi({q.a, q.c, q.a}) != step.u ||
                phi({q.a, q.c, q.c}) != step.v)
                return {false, here + ": phi does not generate (b,u,v)"};
            if (!b.contains(step.b))
                return {false, here + ": color not in B"};
            if (step.u != at)
                return {false, here + ": walk is not continuous"};
            at = step.v;
        }
        if (at != q.c)
            return {false, where + ": path endpoint differs from c"};
    }
    const std::size_t expected = static_cast<std::size_t>(n) * n * n * b.size() * b.size();
    if (seen.size() != expected)
        return {false, "certificate covers " + std::to_string(seen.size()) + " of " + std::to_string(expected) +
                           " quintuples"};
    return {true, ""};
}

Json to_json(const Quintuple& q)
{
    return Json::array({q.a, q.c, q.d, q.b1, q.b2});
}

Json to_json(const Certificate& cert)
{
    Json list = Json::array();
    for (const auto& entry : cert.quintuples) {
        Json steps = Json::array();
        for (const auto& step : entry.steps)
            steps.push_back({{"b", step.b}, {"u", step.u}, {"v", step.v}, {"phi", to_json(step.phi)}});
        list.push_back({{"q", to_json(entry.q)}, {"steps", std::move(steps)}});
    }
    return Json{{"quintuples", std::move(list)}};
}

Json to_json(const Decision& decision)
{
    Json j{{"holds", decision.holds}, {"property", decision.property}};
    if (decision.failing)
        j["failing"] = to_json(*decision.failing);
    if (decision.certificate)
        j["certificate"] = to_json(*decision.certificate);
    return j;
}

Json to_json(const ChainWitness& chain)
{
    Json terms = Json::array();
    for (const auto& t : chain.terms)
        terms.push_back(to_json(t));
    return Json{{"terms", std::move(terms)}};
}

Certificate certificate_from_json(const Json& json, int domain_size)
{
    using namespace json_util;
    const Json& list = member(json, "quintuples", "");
    if (!list.is_array())
        throw ParseError("/quintuples", "expected an array");
    Certificate cert;
    for (std::size_t i = 0; i < list.size(); ++i) {
        std::string at = "/quintuples/" + std::to_string(i);
        Tuple q = tuple(member(list[i], "q", at), domain_size, at + "/q");
        if (q.size() != 5)
            throw ParseError(at + "/q", "expected five entries");
        QuintupleCertificate entry{{q[0], q[1], q[2], q[3], q[4]}, {}};
        const Json& steps = member(list[i], "steps", at);
        if (!steps.is_array())
            throw ParseError(at + "/steps", "expected an array");
        for (std::size_t s = 0; s < steps.size(); ++s) {
            std::string st = at + "/steps/" + std::to_string(s);
            entry.steps.push_back({element(member(steps[s], "b", st), domain_size, st + "/b"),
                                   element(member(steps[s], "u", st), domain_size, st + "/u"),
                                   element(member(steps[s], "v", st), domain_size, st + "/v"),
                                   table_from_json(member(steps[s], "phi", st), domain_size, st + "/phi")});
        }
        cert.quintuples.push_back(std::move(entry));
    }
    return cert;
}

ChainWitness chain_from_json(const Json& json, int domain_size)
{
    const Json& terms = json_util::member(json, "terms", "");
    if (!terms.is_array())
        throw ParseError("/terms", "expected an array");
    ChainWitness chain;
    for (std::size_t i = 0; i < terms.size(); ++i)
        chain.terms.push_back(table_from_json(terms[i], domain_size, "/terms/" + std::to_string(i)));
    return chain;
}

} // namespace absorb
