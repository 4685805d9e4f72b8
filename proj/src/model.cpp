#include <absorb/model.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <deque>
#include <limits>
#include <string_view>

namespace absorb {

Limits Limits::from_environment()
{
    Limits limits;
    if (const char* env = std::getenv("ABSORB_MAX_VERTICES")) {
        std::string_view text(env);
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0)
            throw InputError("ABSORB_MAX_VERTICES must be a positive integer");
        limits.max_power_vertices = value;
    }
    return limits;
}

Relation::Relation(int arity, std::vector<Tuple> tuples) : arity_(arity), tuples_(std::move(tuples))
{
    if (arity_ < 0)
        throw InputError("relation arity must be non-negative");
    for (const auto& t : tuples_)
        if (static_cast<int>(t.size()) != arity_)
            throw InputError("tuple length " + std::to_string(t.size()) + " does not match arity " +
                             std::to_string(arity_));
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

Relation Relation::full(int domain_size, int arity)
{
    std::vector<Tuple> tuples;
    Tuple t(arity, 0);
    while (true) {
        tuples.push_back(t);
        int pos = arity - 1;
        while (pos >= 0 && ++t[pos] == domain_size)
            t[pos--] = 0;
        if (pos < 0)
            break;
    }
    return Relation(arity, std::move(tuples));
}

Relation Relation::diagonal(int domain_size, int arity)
{
    std::vector<Tuple> tuples;
    for (Element a = 0; a < domain_size; ++a)
        tuples.emplace_back(arity, a);
    return Relation(arity, std::move(tuples));
}

bool Relation::contains(std::span<const Element> tuple) const
{
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), tuple, [](const Tuple& lhs, std::span<const Element> rhs) {
        return std::lexicographical_compare(lhs.begin(), lhs.end(), rhs.begin(), rhs.end());
    });
    return it != tuples_.end() && std::equal(it->begin(), it->end(), tuple.begin(), tuple.end());
}

Subset::Subset(std::vector<Element> elements) : elements_(std::move(elements))
{
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

Subset Subset::full(int domain_size)
{
    std::vector<Element> all(domain_size);
    for (Element a = 0; a < domain_size; ++a)
        all[a] = a;
    return Subset(std::move(all));
}

bool Subset::contains(Element e) const
{
    return std::binary_search(elements_.begin(), elements_.end(), e);
}

Subset Subset::complement(int domain_size) const
{
    std::vector<Element> rest;
    for (Element a = 0; a < domain_size; ++a)
        if (!contains(a))
            rest.push_back(a);
    return Subset(std::move(rest));
}

RelationalStructure::RelationalStructure(int size, std::map<std::string, Relation> relations)
    : size_(size), relations_(std::move(relations))
{
    if (size_ < 1)
        throw InputError("domain size must be positive");
    for (const auto& [name, rel] : relations_) {
        if (name.empty())
            throw InputError("relation names must be nonempty");
        if (rel.arity() < 1)
            throw InputError("relation '" + name + "' must have positive arity");
        for (const auto& t : rel.tuples())
            for (Element e : t)
                if (e < 0 || e >= size_)
                    throw InputError("relation '" + name + "': entry " + std::to_string(e) + " out of range");
    }
}

const Relation& RelationalStructure::relation(const std::string& name) const
{
    auto it = relations_.find(name);
    if (it == relations_.end())
        throw InputError("unknown relation '" + name + "'");
    return it->second;
}

RelationalStructure RelationalStructure::with_relation(const std::string& name, Relation relation) const
{
    if (relations_.contains(name))
        throw InputError("relation '" + name + "' already defined");
    auto relations = relations_;
    relations.emplace(name, std::move(relation));
    return RelationalStructure(size_, std::move(relations));
}

int RelationalStructure::theta() const
{
    int theta = 2;
    for (const auto& [name, rel] : relations_)
        theta = std::max(theta, rel.arity());
    return theta;
}

void RelationalStructure::check_subset(const Subset& subset) const
{
    for (Element e : subset.elements())
        if (e < 0 || e >= size_)
            throw InputError("subset element " + std::to_string(e) + " out of range");
}

SingletonExpansion with_singletons(const RelationalStructure& structure)
{
    auto relations = structure.relations();
    bool added = false;
    for (Element a = 0; a < structure.size(); ++a) {
        Relation singleton(1, {{a}});
        bool present = std::any_of(relations.begin(), relations.end(),
                                   [&](const auto& entry) { return entry.second == singleton; });
        if (present)
            continue;
        std::string name = "_s" + std::to_string(a);
        if (relations.contains(name))
            throw InputError("relation name '" + name + "' collides with the reserved singleton prefix");
        relations.emplace(name, std::move(singleton));
        added = true;
    }
    return {RelationalStructure(structure.size(), std::move(relations)), added};
}

namespace {

std::size_t checked_power(int base, int exponent)
{
    std::size_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(base))
            throw CapExceeded("table size overflow");
        result *= static_cast<std::size_t>(base);
    }
    return result;
}

} // namespace

OperationTable::OperationTable(int domain_size, int arity, std::vector<Element> values)
    : size_(domain_size), arity_(arity), values_(std::move(values))
{
    if (size_ < 1)
        throw InputError("operation domain size must be positive");
    if (arity_ < 1)
        throw InputError("operation arity must be at least 1");
    if (values_.size() != checked_power(size_, arity_))
        throw InputError("operation table has " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(checked_power(size_, arity_)));
    for (Element v : values_)
        if (v < 0 || v >= size_)
            throw InputError("operation value " + std::to_string(v) + " out of range");
}

OperationTable OperationTable::projection(int domain_size, int arity, int coordinate)
{
    return from_function(domain_size, arity, [coordinate](std::span<const Element> args) { return args[coordinate]; });
}

std::size_t OperationTable::index_of(std::span<const Element> args) const
{
    std::size_t index = 0;
    for (Element a : args)
        index = index * static_cast<std::size_t>(size_) + static_cast<std::size_t>(a);
    return index;
}

Tuple OperationTable::arguments_of(std::size_t index) const
{
    Tuple args(arity_);
    for (int pos = arity_ - 1; pos >= 0; --pos) {
        args[pos] = static_cast<Element>(index % static_cast<std::size_t>(size_));
        index /= static_cast<std::size_t>(size_);
    }
    return args;
}

bool OperationTable::is_idempotent() const
{
    for (Element a = 0; a < size_; ++a) {
        Tuple diag(arity_, a);
        if ((*this)(diag) != a)
            return false;
    }
    return true;
}

std::optional<PolymorphismViolation> find_polymorphism_violation(const RelationalStructure& structure,
                                                                 const OperationTable& f)
{
    if (f.domain_size() != structure.size())
        throw InputError("operation domain size does not match the structure");
    const int k = f.arity();
    for (const auto& [name, rel] : structure.relations()) {
        if (rel.empty())
            continue;
        const auto& tuples = rel.tuples();
        std::vector<std::size_t> choice(k, 0);
        Tuple args(k), image(rel.arity());
        while (true) {
            for (int col = 0; col < rel.arity(); ++col) {
                for (int row = 0; row < k; ++row)
                    args[row] = tuples[choice[row]][col];
                image[col] = f(args);
            }
            if (!rel.contains(image)) {
                PolymorphismViolation violation{name, {}, image};
                for (int row = 0; row < k; ++row)
                    violation.rows.push_back(tuples[choice[row]]);
                return violation;
            }
            int pos = k - 1;
            while (pos >= 0 && ++choice[pos] == tuples.size())
                choice[pos--] = 0;
            if (pos < 0)
                break;
        }
    }
    return std::nullopt;
}

bool is_polymorphism(const RelationalStructure& structure, const OperationTable& f)
{
    return !find_polymorphism_violation(structure, f);
}

Relation relation_project(const Relation& relation, int drop)
{
    if (relation.arity() < 2)
        throw InputError("projection needs arity at least 2");
    if (drop < 1 || drop > relation.arity())
        throw InputError("projection coordinate " + std::to_string(drop) + " out of range");
    std::vector<Tuple> tuples;
    tuples.reserve(relation.size());
    for (const auto& t : relation.tuples()) {
        Tuple shorter;
        shorter.reserve(t.size() - 1);
        for (int i = 0; i < relation.arity(); ++i)
            if (i != drop - 1)
                shorter.push_back(t[i]);
        tuples.push_back(std::move(shorter));
    }
    return Relation(relation.arity() - 1, std::move(tuples));
}

Digraph::Digraph(int vertex_count, std::vector<std::pair<int, int>> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges))
{
    if (vertex_count_ < 0)
        throw InputError("vertex count must be non-negative");
    for (auto [u, v] : edges_)
        if (u < 0 || v < 0 || u >= vertex_count_ || v >= vertex_count_)
            throw InputError("edge endpoint out of range");
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool Digraph::has_edge(int from, int to) const
{
    return std::binary_search(edges_.begin(), edges_.end(), std::pair{from, to});
}

std::vector<std::vector<int>> Digraph::successors() const
{
    std::vector<std::vector<int>> out(vertex_count_);
    for (auto [u, v] : edges_)
        out[u].push_back(v);
    return out;
}

std::vector<std::vector<int>> Digraph::predecessors() const
{
    std::vector<std::vector<int>> in(vertex_count_);
    for (auto [u, v] : edges_)
        in[v].push_back(u);
    for (auto& list : in)
        std::sort(list.begin(), list.end());
    return in;
}

std::optional<Walk> digraph_reach(const Digraph& digraph, const Subset& from, const Subset& to)
{
    const int n = digraph.vertex_count();
    // Distance to the target set, by reverse BFS.
    std::vector<int> dist(n, -1);
    std::deque<int> queue;
    for (Element t : to.elements()) {
        if (t < 0 || t >= n)
            throw InputError("walk target out of range");
        dist[t] = 0;
        queue.push_back(t);
    }
    auto preds = digraph.predecessors();
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : preds[v])
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    int start = -1;
    for (Element s : from.elements()) {
        if (s < 0 || s >= n)
            throw InputError("walk source out of range");
        if (dist[s] >= 0 && (start < 0 || dist[s] < dist[start]))
            start = s;
    }
    if (start < 0)
        return std::nullopt;
    auto succ = digraph.successors();
    Walk walk{start};
    int current = start;
    while (dist[current] > 0) {
        for (int v : succ[current])
            if (dist[v] == dist[current] - 1) {
                current = v;
                break;
            }
        walk.push_back(current);
    }
    return walk;
}

std::optional<Walk> digraph_closed_walk(const Digraph& digraph)
{
    const int n = digraph.vertex_count();
    auto succ = digraph.successors();
    for (int root = 0; root < n; ++root) {
        // BFS from the successors of root back to root.
        std::vector<int> parent(n, -2);
        std::deque<int> queue;
        for (int v : succ[root]) {
            if (v == root)
                return Walk{root, root};
            if (parent[v] == -2) {
                parent[v] = root;
                queue.push_back(v);
            }
        }
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int w : succ[v]) {
                if (w == root) {
                    Walk back{root};
                    for (int x = v; x != root; x = parent[x])
                        back.push_back(x);
                    back.push_back(root);
                    std::reverse(back.begin(), back.end());
                    return back;
                }
                if (parent[w] == -2) {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    return std::nullopt;
}

bool meets_diagonal(const Digraph& digraph)
{
    return std::any_of(digraph.edges().begin(), digraph.edges().end(), [](auto e) { return e.first == e.second; });
}

Digraph compose(const Digraph& first, const Digraph& second)
{
    if (first.vertex_count() != second.vertex_count())
        throw InputError("composed digraphs must share a vertex set");
    auto succ = second.successors();
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : first.edges())
        for (int w : succ[v])
            edges.emplace_back(u, w);
    return Digraph(first.vertex_count(), std::move(edges));
}

} // namespace absorb
