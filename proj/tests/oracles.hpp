#pragma once

// Brute-force reference implementations. They enumerate operation tables and
// assignments directly and share no search code with the library.

#include <absorb/decide.hpp>
#include <absorb/model.hpp>
#include <absorb/ppform.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using absorb::Element;
using absorb::OperationTable;
using absorb::Relation;
using absorb::RelationalStructure;
using absorb::Subset;
using absorb::Tuple;

inline std::size_t ipow(std::size_t base, int exp)
{
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

inline Tuple digits(std::size_t index, int size, int length)
{
    Tuple t(length);
    for (int i = length - 1; i >= 0; --i) {
        t[i] = static_cast<Element>(index % size);
        index /= size;
    }
    return t;
}

inline Element apply_op(const OperationTable& f, const Tuple& args)
{
    std::size_t idx = 0;
    for (Element a : args)
        idx = idx * f.domain_size() + a;
    return f.values()[idx];
}

inline bool preserves(const RelationalStructure& s, const OperationTable& f)
{
    const int k = f.arity();
    for (const auto& [name, rel] : s.relations()) {
        const auto& tuples = rel.tuples();
        const std::size_t rows = ipow(tuples.size(), k);
        for (std::size_t choice = 0; choice < rows; ++choice) {
            Tuple pick = digits(choice, static_cast<int>(tuples.size()), k);
            Tuple image(rel.arity());
            for (int pos = 0; pos < rel.arity(); ++pos) {
                Tuple args(k);
                for (int r = 0; r < k; ++r)
                    args[r] = tuples[pick[r]][pos];
                image[pos] = apply_op(f, args);
            }
            if (!rel.contains(image))
                return false;
        }
    }
    return true;
}

inline bool idempotent(const OperationTable& f)
{
    for (Element a = 0; a < f.domain_size(); ++a)
        if (apply_op(f, Tuple(f.arity(), a)) != a)
            return false;
    return true;
}

/// Every k-ary table on the domain, in lexicographic order of value lists.
inline void for_each_table(int size, int arity, const std::function<void(const OperationTable&)>& visit)
{
    const std::size_t cells = ipow(size, arity);
    const std::size_t count = ipow(size, static_cast<int>(cells));
    for (std::size_t idx = 0; idx < count; ++idx) {
        Tuple v = digits(idx, size, static_cast<int>(cells));
        visit(OperationTable(size, arity, v));
    }
}

inline std::vector<OperationTable> polymorphisms(const RelationalStructure& s, int arity)
{
    std::vector<OperationTable> out;
    for_each_table(s.size(), arity, [&](const OperationTable& f) {
        if (preserves(s, f))
            out.push_back(f);
    });
    return out;
}

/// {f(columns) : f polymorphism of arity |generators|}.
inline Relation subpower(const RelationalStructure& s, const std::vector<Tuple>& generators)
{
    const int k = static_cast<int>(generators.size());
    const int n = static_cast<int>(generators.front().size());
    std::vector<Tuple> out;
    for (const auto& f : polymorphisms(s, k)) {
        Tuple t(n);
        for (int pos = 0; pos < n; ++pos) {
            Tuple col(k);
            for (int r = 0; r < k; ++r)
                col[r] = generators[r][pos];
            t[pos] = apply_op(f, col);
        }
        out.push_back(t);
    }
    return Relation(n, out);
}

inline bool in(const Subset& b, const Tuple& t)
{
    return std::all_of(t.begin(), t.end(), [&](Element e) { return b.contains(e); });
}

inline bool essential(const Relation& r, const Subset& b)
{
    for (const auto& t : r.tuples())
        if (in(b, t))
            return false;
    for (int i = 0; i < r.arity(); ++i) {
        bool meets = false;
        for (const auto& t : r.tuples()) {
            bool ok = true;
            for (int j = 0; j < r.arity(); ++j)
                if (j != i && !b.contains(t[j]))
                    ok = false;
            meets = meets || ok;
        }
        if (!meets)
            return false;
    }
    return true;
}

inline bool absorbs_with(const OperationTable& t, const Subset& b)
{
    const int n = t.arity();
    const int size = t.domain_size();
    for (std::size_t idx = 0; idx < ipow(size, n); ++idx) {
        Tuple args = digits(idx, size, n);
        int outside = 0;
        for (Element a : args)
            outside += b.contains(a) ? 0 : 1;
        if (outside <= 1 && !b.contains(apply_op(t, args)))
            return false;
    }
    return true;
}

inline bool has_absorption_term(const RelationalStructure& s, const Subset& b, int n)
{
    bool found = false;
    for_each_table(s.size(), n, [&](const OperationTable& f) {
        if (!found && idempotent(f) && absorbs_with(f, b) && preserves(s, f))
            found = true;
    });
    return found;
}

/// Closure of a subset under all unary-image applications of polymorphisms
/// of arity |subset|.
inline Subset closure(const RelationalStructure& s, const Subset& subset)
{
    std::vector<Tuple> gens;
    for (Element e : subset.elements())
        gens.push_back({e});
    Relation r = subpower(s, gens);
    std::vector<Element> out;
    for (const auto& t : r.tuples())
        out.push_back(t[0]);
    return Subset(out);
}

inline bool reaches(int size, const std::set<std::pair<int, int>>& edges, int from, int to)
{
    std::vector<bool> seen(size, false);
    std::queue<int> q;
    q.push(from);
    seen[from] = true;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (u == to)
            return true;
        for (auto [x, y] : edges)
            if (x == u && !seen[y]) {
                seen[y] = true;
                q.push(y);
            }
    }
    return false;
}

/// Local characterization computed from all ternary polymorphisms. Returns
/// the least failing quintuple (a,c,d,b1,b2), or nullopt when every one passes.
inline std::optional<absorb::Quintuple> failing_quintuple(const RelationalStructure& s, const Subset& b)
{
    const auto ternary = polymorphisms(s, 3);
    const int n = s.size();
    for (Element a = 0; a < n; ++a)
        for (Element c = 0; c < n; ++c)
            for (Element d = 0; d < n; ++d)
                for (Element b1 : b.elements())
                    for (Element b2 : b.elements()) {
                        std::set<std::pair<int, int>> edges;
                        for (const auto& f : ternary)
                            if (b.contains(apply_op(f, {b1, b2, d})))
                                edges.emplace(apply_op(f, {a, c, a}), apply_op(f, {a, c, c}));
                        if (!reaches(n, edges, a, c))
                            return absorb::Quintuple{a, c, d, b1, b2};
                    }
    return std::nullopt;
}

/// Relation over the free variables by trying every assignment.
inline Relation evaluate(const absorb::PPFormula& phi, const RelationalStructure& s)
{
    const int nv = phi.variable_count();
    std::set<Tuple> out;
    for (std::size_t idx = 0; idx < ipow(s.size(), nv); ++idx) {
        Tuple val = digits(idx, s.size(), nv);
        bool ok = true;
        for (const auto& atom : phi.atoms()) {
            Tuple t;
            for (int v : atom.scope)
                t.push_back(val[v]);
            if (!s.relation(atom.relation).contains(t)) {
                ok = false;
                break;
            }
        }
        if (!ok)
            continue;
        Tuple f;
        for (int v : phi.free())
            f.push_back(val[v]);
        out.insert(f);
    }
    return Relation(static_cast<int>(phi.free().size()), {out.begin(), out.end()});
}

/// Independent judgement of a certificate: every quintuple listed exactly
/// once, each step's table a polymorphism producing its (b,u,v), colours in
/// B, a continuous walk from a ending at c of at most |A| steps.
inline bool certificate_valid(const RelationalStructure& s, const Subset& b, const absorb::Certificate& cert)
{
    const int n = s.size();
    std::set<absorb::Quintuple> listed;
    for (const auto& qc : cert.quintuples) {
        const auto& q = qc.q;
        for (Element e : {q.a, q.c, q.d})
            if (e < 0 || e >= n)
                return false;
        if (!b.contains(q.b1) || !b.contains(q.b2))
            return false;
        if (!listed.insert(q).second)
            return false;
        if (static_cast<int>(qc.steps.size()) > n)
            return false;
        Element cur = q.a;
        for (const auto& step : qc.steps) {
            const auto& f = step.phi;
            if (f.domain_size() != n || f.arity() != 3 || !preserves(s, f))
                return false;
            if (apply_op(f, {q.b1, q.b2, q.d}) != step.b || apply_op(f, {q.a, q.c, q.a}) != step.u ||
                apply_op(f, {q.a, q.c, q.c}) != step.v)
                return false;
            if (!b.contains(step.b) || step.u != cur)
                return false;
            cur = step.v;
        }
        if (cur != q.c)
            return false;
    }
    const std::size_t expected = static_cast<std::size_t>(n) * n * n * b.size() * b.size();
    return listed.size() == expected;
}

} // namespace oracle
