#include <absorb/engine.hpp>

#include <algorithm>
#include <bit>
#include <limits>

namespace absorb {

Subset subset_of(Mask mask)
{
    std::vector<Element> elements;
    for (Element e = 0; mask != 0; ++e, mask >>= 1)
        if (mask & 1)
            elements.push_back(e);
    return Subset(std::move(elements));
}

namespace {

Mask full_mask(int size)
{
    return size >= 64 ? ~Mask{0} : (Mask{1} << size) - 1;
}

struct TargetRelation {
    int arity = 0;
    std::size_t count = 0;
    std::vector<Element> flat;
};

struct Constraint {
    int relation = 0;
    std::vector<int> scope;
    std::vector<std::pair<int, int>> equal_positions;
};

/// Compiled constraint network of one HomInstance.
class Network {
public:
    explicit Network(const HomInstance& instance);

    bool propagate(std::vector<Mask>& domains, std::vector<int> queue) const;
    bool propagate_all(std::vector<Mask>& domains) const;
    bool search(std::vector<Mask>& domains) const;
    void enumerate(const std::vector<Mask>& domains, std::span<const int> vertices, std::size_t depth,
                   std::vector<Tuple>& out) const;

private:
    bool revise(const Constraint& c, std::vector<Mask>& domains, std::vector<int>& changed) const;

    std::vector<TargetRelation> relations_;
    std::vector<Constraint> constraints_;
    std::vector<std::vector<int>> watching_;
};

Network::Network(const HomInstance& instance)
{
    const auto& source = instance.source();
    const auto& target = instance.target();
    watching_.resize(source.size());
    for (const auto& [name, rel] : source.relations()) {
        const Relation& trel = target.relation(name);
        TargetRelation compiled;
        compiled.arity = trel.arity();
        compiled.count = trel.size();
        compiled.flat.reserve(trel.size() * static_cast<std::size_t>(trel.arity()));
        for (const auto& t : trel.tuples())
            compiled.flat.insert(compiled.flat.end(), t.begin(), t.end());
        int rel_index = static_cast<int>(relations_.size());
        relations_.push_back(std::move(compiled));
        for (const auto& scope : rel.tuples()) {
            Constraint c{rel_index, scope, {}};
            for (std::size_t p = 0; p < scope.size(); ++p)
                for (std::size_t q = p + 1; q < scope.size(); ++q)
                    if (scope[p] == scope[q])
                        c.equal_positions.emplace_back(static_cast<int>(p), static_cast<int>(q));
            int index = static_cast<int>(constraints_.size());
            for (std::size_t p = 0; p < scope.size(); ++p) {
                auto& list = watching_[scope[p]];
                if (list.empty() || list.back() != index)
                    list.push_back(index);
            }
            constraints_.push_back(std::move(c));
        }
    }
}

bool Network::revise(const Constraint& c, std::vector<Mask>& domains, std::vector<int>& changed) const
{
    const TargetRelation& rel = relations_[c.relation];
    const int arity = rel.arity;
    Mask supports[64] = {};
    std::vector<Mask> local_supports;
    Mask* sup = supports;
    if (arity > 64) {
        local_supports.assign(arity, 0);
        sup = local_supports.data();
    }
    const Element* t = rel.flat.data();
    for (std::size_t i = 0; i < rel.count; ++i, t += arity) {
        bool ok = true;
        for (int p = 0; p < arity && ok; ++p)
            ok = (domains[c.scope[p]] >> t[p]) & 1;
        for (std::size_t e = 0; ok && e < c.equal_positions.size(); ++e)
            ok = t[c.equal_positions[e].first] == t[c.equal_positions[e].second];
        if (ok)
            for (int p = 0; p < arity; ++p)
                sup[p] |= Mask{1} << t[p];
    }
    for (int p = 0; p < arity; ++p) {
        Mask& dom = domains[c.scope[p]];
        Mask reduced = dom & sup[p];
        if (reduced != dom) {
            if (reduced == 0)
                return false;
            dom = reduced;
            changed.push_back(c.scope[p]);
        }
    }
    return true;
}

bool Network::propagate(std::vector<Mask>& domains, std::vector<int> vars) const
{
    std::vector<int> queue;
    std::vector<char> queued(constraints_.size(), 0);
    for (int v : vars)
        for (int c : watching_[v])
            if (!queued[c]) {
                queued[c] = 1;
                queue.push_back(c);
            }
    std::vector<int> changed;
    while (!queue.empty()) {
        int c = queue.back();
        queue.pop_back();
        queued[c] = 0;
        changed.clear();
        if (!revise(constraints_[c], domains, changed))
            return false;
        for (int v : changed)
            for (int d : watching_[v])
                if (!queued[d]) {
                    queued[d] = 1;
                    queue.push_back(d);
                }
    }
    return true;
}

bool Network::propagate_all(std::vector<Mask>& domains) const
{
    for (Mask m : domains)
        if (m == 0)
            return false;
    std::vector<int> all(domains.size());
    for (std::size_t v = 0; v < all.size(); ++v)
        all[v] = static_cast<int>(v);
    return propagate(domains, std::move(all));
}

bool Network::search(std::vector<Mask>& domains) const
{
    int best = -1;
    int best_count = std::numeric_limits<int>::max();
    for (std::size_t v = 0; v < domains.size(); ++v) {
        if (watching_[v].empty())
            continue;
        int count = std::popcount(domains[v]);
        if (count > 1 && count < best_count) {
            best = static_cast<int>(v);
            best_count = count;
        }
    }
    if (best < 0) {
        for (auto& dom : domains)
            dom &= ~dom + 1; // lowest remaining value
        return true;
    }
    for (Mask rest = domains[best]; rest != 0; rest &= rest - 1) {
        std::vector<Mask> trial = domains;
        trial[best] = rest & (~rest + 1);
        if (propagate(trial, {best}) && search(trial)) {
            domains = std::move(trial);
            return true;
        }
    }
    return false;
}

void Network::enumerate(const std::vector<Mask>& domains, std::span<const int> vertices, std::size_t depth,
                        std::vector<Tuple>& out) const
{
    if (depth == vertices.size()) {
        std::vector<Mask> trial = domains;
        if (search(trial)) {
            Tuple image;
            image.reserve(vertices.size());
            for (int v : vertices)
                image.push_back(std::countr_zero(trial[v]));
            out.push_back(std::move(image));
        }
        return;
    }
    const int v = vertices[depth];
    for (Mask rest = domains[v]; rest != 0; rest &= rest - 1) {
        std::vector<Mask> trial = domains;
        trial[v] = rest & (~rest + 1);
        if (propagate(trial, {v}))
            enumerate(trial, vertices, depth + 1, out);
    }
}

std::size_t checked_power(std::size_t base, int exponent, std::size_t cap, const char* what)
{
    std::size_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && result > cap / base)
            throw CapExceeded(std::string(what) + " exceeds the configured cap of " + std::to_string(cap));
        result *= base;
    }
    return result;
}

constexpr std::size_t max_power_tuples = 50'000'000;

} // namespace

HomInstance::HomInstance(std::shared_ptr<const RelationalStructure> source,
                         std::shared_ptr<const RelationalStructure> target)
    : source_(std::move(source)), target_(std::move(target))
{
    if (target_->size() > max_target_size)
        throw CapExceeded("target domains larger than 64 elements are not supported");
    for (const auto& [name, rel] : source_->relations()) {
        if (!target_->has_relation(name))
            throw InputError("relation '" + name + "' of the source is missing from the target");
        if (target_->relation(name).arity() != rel.arity())
            throw InputError("relation '" + name + "' has different arities in source and target");
    }
    domains_.assign(source_->size(), full_mask(target_->size()));
}

HomInstance::HomInstance(RelationalStructure source, RelationalStructure target)
    : HomInstance(std::make_shared<const RelationalStructure>(std::move(source)),
                  std::make_shared<const RelationalStructure>(std::move(target)))
{
}

void HomInstance::pin(int vertex, Element value)
{
    if (value < 0 || value >= target_->size())
        throw InputError("pinned value out of range");
    restrict(vertex, Mask{1} << value);
}

void HomInstance::restrict(int vertex, const Subset& allowed)
{
    target_->check_subset(allowed);
    restrict(vertex, mask_of(allowed));
}

void HomInstance::restrict(int vertex, Mask allowed)
{
    if (vertex < 0 || vertex >= static_cast<int>(domains_.size()))
        throw InputError("source vertex out of range");
    domains_[vertex] &= allowed;
}

std::optional<std::vector<Subset>> ac_fixpoint(const HomInstance& instance)
{
    Network network(instance);
    std::vector<Mask> domains = instance.domains();
    if (!network.propagate_all(domains))
        return std::nullopt;
    std::vector<Subset> result;
    result.reserve(domains.size());
    for (Mask m : domains)
        result.push_back(subset_of(m));
    return result;
}

std::optional<std::vector<Element>> find_hom(const HomInstance& instance)
{
    Network network(instance);
    std::vector<Mask> domains = instance.domains();
    if (!network.propagate_all(domains) || !network.search(domains))
        return std::nullopt;
    std::vector<Element> assignment;
    assignment.reserve(domains.size());
    for (Mask m : domains)
        assignment.push_back(std::countr_zero(m));
    return assignment;
}

std::vector<Tuple> enumerate_images(const HomInstance& instance, std::span<const int> vertices)
{
    Network network(instance);
    std::vector<Mask> domains = instance.domains();
    std::vector<Tuple> out;
    if (network.propagate_all(domains))
        network.enumerate(domains, vertices, 0, out);
    return out;
}

PowerStructure::PowerStructure(const RelationalStructure& base, int exponent, const Limits& limits)
    : base_(std::make_shared<const RelationalStructure>(base)), exponent_(exponent), base_size_(base.size())
{
    if (exponent < 1)
        throw InputError("power exponent must be positive");
    vertex_count_ = checked_power(static_cast<std::size_t>(base_size_), exponent, limits.max_power_vertices,
                                  "power structure vertex count");
    if (vertex_count_ > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw CapExceeded("power structure vertex count exceeds the index range");
    std::map<std::string, Relation> relations;
    for (const auto& [name, rel] : base.relations()) {
        std::size_t count =
            checked_power(rel.size(), exponent, max_power_tuples, ("power of relation '" + name + "'").c_str());
        std::vector<Tuple> tuples;
        tuples.reserve(count);
        if (count > 0) {
            const auto& rows = rel.tuples();
            std::vector<std::size_t> choice(exponent, 0);
            Tuple column(exponent);
            while (true) {
                Tuple t(rel.arity());
                for (int j = 0; j < rel.arity(); ++j) {
                    for (int i = 0; i < exponent; ++i)
                        column[i] = rows[choice[i]][j];
                    t[j] = vertex_of(column);
                }
                tuples.push_back(std::move(t));
                int pos = exponent - 1;
                while (pos >= 0 && ++choice[pos] == rows.size())
                    choice[pos--] = 0;
                if (pos < 0)
                    break;
            }
        }
        relations.emplace(name, Relation(rel.arity(), std::move(tuples)));
    }
    power_ = std::make_shared<const RelationalStructure>(static_cast<int>(vertex_count_), std::move(relations));
}

int PowerStructure::vertex_of(std::span<const Element> column) const
{
    std::size_t index = 0;
    for (Element a : column)
        index = index * static_cast<std::size_t>(base_size_) + static_cast<std::size_t>(a);
    return static_cast<int>(index);
}

Tuple PowerStructure::column_of(int vertex) const
{
    Tuple column(exponent_);
    auto index = static_cast<std::size_t>(vertex);
    for (int pos = exponent_ - 1; pos >= 0; --pos) {
        column[pos] = static_cast<Element>(index % static_cast<std::size_t>(base_size_));
        index /= static_cast<std::size_t>(base_size_);
    }
    return column;
}

std::vector<int> PowerStructure::columns_of(const std::vector<Tuple>& generators) const
{
    if (static_cast<int>(generators.size()) != exponent_)
        throw InputError("generator count does not match the power exponent");
    const std::size_t arity = generators.front().size();
    std::vector<int> columns(arity);
    Tuple column(exponent_);
    for (std::size_t j = 0; j < arity; ++j) {
        for (int i = 0; i < exponent_; ++i) {
            if (generators[i].size() != arity)
                throw InputError("generators must share one arity");
            column[i] = generators[i][j];
        }
        columns[j] = vertex_of(column);
    }
    return columns;
}

RelationalStructure power_structure(const RelationalStructure& structure, int exponent, const Limits& limits)
{
    return *PowerStructure(structure, exponent, limits).structure();
}

namespace {

void check_generators(const RelationalStructure& structure, const std::vector<Tuple>& generators)
{
    if (generators.empty())
        throw InputError("at least one generator is required");
    for (const auto& g : generators) {
        if (g.size() != generators.front().size() || g.empty())
            throw InputError("generators must share one positive arity");
        for (Element e : g)
            if (e < 0 || e >= structure.size())
                throw InputError("generator entry out of range");
    }
}

} // namespace

bool subpower_membership(const RelationalStructure& structure, const std::vector<Tuple>& generators,
                         const Tuple& tuple, const Limits& limits)
{
    check_generators(structure, generators);
    if (tuple.size() != generators.front().size())
        throw InputError("tuple arity does not match the generators");
    PowerStructure power(structure, static_cast<int>(generators.size()), limits);
    HomInstance instance(power.structure(), power.base());
    auto columns = power.columns_of(generators);
    for (std::size_t j = 0; j < columns.size(); ++j)
        instance.pin(columns[j], tuple[j]);
    return find_hom(instance).has_value();
}

Subpower generate_subpower(const PowerStructure& power, const std::vector<Tuple>& generators)
{
    check_generators(*power.base(), generators);
    HomInstance instance(power.structure(), power.base());
    auto columns = power.columns_of(generators);
    const int arity = static_cast<int>(columns.size());
    return Subpower{arity, Relation(arity, enumerate_images(instance, columns)), generators};
}

Subpower generate_subpower(const RelationalStructure& structure, const std::vector<Tuple>& generators, int arity,
                           const Limits& limits)
{
    check_generators(structure, generators);
    if (static_cast<int>(generators.front().size()) != arity)
        throw InputError("generator arity does not match the requested arity");
    PowerStructure power(structure, static_cast<int>(generators.size()), limits);
    return generate_subpower(power, generators);
}

Closure closure_unary(const RelationalStructure& structure, const Subset& subset, const Limits& limits)
{
    if (subset.empty())
        throw InputError("closure of the empty set is not supported");
    structure.check_subset(subset);
    std::vector<Tuple> generators;
    for (Element b : subset.elements())
        generators.push_back({b});
    Subpower sub = generate_subpower(structure, generators, 1, limits);
    std::vector<Element> elements;
    for (const auto& t : sub.tuples.tuples())
        elements.push_back(t[0]);
    Subset closure(std::move(elements));
    bool closed = closure == subset;
    return {std::move(closure), closed};
}

bool is_b_essential(const Relation& relation, const Subset& b)
{
    const int n = relation.arity();
    if (n < 2)
        throw InputError("B-essentiality needs arity at least 2");
    std::vector<char> hit(n, 0);
    for (const auto& t : relation.tuples()) {
        int outside = -1;
        int outside_count = 0;
        for (int i = 0; i < n; ++i)
            if (!b.contains(t[i])) {
                outside = i;
                ++outside_count;
            }
        if (outside_count == 0)
            return false;
        if (outside_count == 1)
            hit[outside] = 1;
    }
    return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

std::optional<EssentialWitness> essential_witness_search(const RelationalStructure& structure, const Subset& b,
                                                         int arity, const Limits& limits)
{
    if (b.empty())
        throw InputError("B must be nonempty");
    if (arity < 2)
        throw InputError("essential witnesses need arity at least 2");
    structure.check_subset(b);
    const Subset outside = b.complement(structure.size());
    if (outside.empty())
        return std::nullopt;
    const auto expanded = with_singletons(structure).structure;
    PowerStructure power(expanded, arity, limits);

    // candidates[i]: tuples with coordinate i outside B and all others in B, lexicographic.
    std::vector<std::vector<Tuple>> candidates(arity);
    for (int i = 0; i < arity; ++i) {
        Tuple t(arity);
        std::vector<std::size_t> pick(arity, 0);
        auto choices = [&](int pos) -> const std::vector<Element>& {
            return pos == i ? outside.elements() : b.elements();
        };
        while (true) {
            for (int pos = 0; pos < arity; ++pos)
                t[pos] = choices(pos)[pick[pos]];
            candidates[i].push_back(t);
            int pos = arity - 1;
            while (pos >= 0 && ++pick[pos] == choices(pos).size())
                pick[pos--] = 0;
            if (pos < 0)
                break;
        }
    }

    const Mask b_mask = mask_of(b);
    std::vector<std::size_t> pick(arity, 0);
    std::vector<Tuple> generators(arity);
    while (true) {
        for (int i = 0; i < arity; ++i)
            generators[i] = candidates[i][pick[i]];
        HomInstance instance(power.structure(), power.base());
        for (int column : power.columns_of(generators))
            instance.restrict(column, b_mask);
        if (!find_hom(instance)) {
            Subpower sub = generate_subpower(power, generators);
            return EssentialWitness{arity, generators, std::move(sub.tuples)};
        }
        int pos = arity - 1;
        while (pos >= 0 && ++pick[pos] == candidates[pos].size())
            pick[pos--] = 0;
        if (pos < 0)
            break;
    }
    return std::nullopt;
}

std::optional<OperationTable> absorption_term_search(const RelationalStructure& structure, const Subset& b, int arity,
                                                     const Limits& limits)
{
    if (b.empty())
        throw InputError("B must be nonempty");
    if (arity < 1)
        throw InputError("term arity must be positive");
    structure.check_subset(b);
    PowerStructure power(structure, arity, limits);
    HomInstance instance(power.structure(), power.base());
    const Mask b_mask = mask_of(b);
    for (std::size_t v = 0; v < power.vertex_count(); ++v) {
        Tuple column = power.column_of(static_cast<int>(v));
        int outside = 0;
        for (Element e : column)
            outside += b.contains(e) ? 0 : 1;
        if (outside <= 1)
            instance.restrict(static_cast<int>(v), b_mask);
        if (std::all_of(column.begin(), column.end(), [&](Element e) { return e == column.front(); }))
            instance.pin(static_cast<int>(v), column.front());
    }
    auto assignment = find_hom(instance);
    if (!assignment)
        return std::nullopt;
    return OperationTable(structure.size(), arity, std::move(*assignment));
}

} // namespace absorb
