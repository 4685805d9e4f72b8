#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace absorb {

using Element = int;
using Tuple = std::vector<Element>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid input (CLI exit code 2).
class InputError : public Error {
public:
    using Error::Error;
};

/// A configured resource cap was exceeded (CLI exit code 3).
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Resource caps shared by the search routines.
struct Limits {
    std::size_t max_power_vertices = 1'000'000;

    /// Defaults, overridden by ABSORB_MAX_VERTICES when it is set.
    static Limits from_environment();
};

/// A finite relation stored as a sorted, duplicate-free list of tuples.
class Relation {
public:
    Relation() = default;
    explicit Relation(int arity, std::vector<Tuple> tuples = {});

    static Relation full(int domain_size, int arity);
    static Relation diagonal(int domain_size, int arity);

    int arity() const { return arity_; }
    const std::vector<Tuple>& tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }
    bool contains(std::span<const Element> tuple) const;

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    int arity_ = 1;
    std::vector<Tuple> tuples_;
};

/// Sorted duplicate-free set of domain elements.
class Subset {
public:
    Subset() = default;
    explicit Subset(std::vector<Element> elements);

    static Subset full(int domain_size);

    const std::vector<Element>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    bool contains(Element e) const;
    Subset complement(int domain_size) const;

    friend bool operator==(const Subset&, const Subset&) = default;
    friend auto operator<=>(const Subset&, const Subset&) = default;

private:
    std::vector<Element> elements_;
};

/// Finite domain {0,...,size-1} with named relations.
class RelationalStructure {
public:
    RelationalStructure() = default;
    RelationalStructure(int size, std::map<std::string, Relation> relations = {});

    int size() const { return size_; }
    const std::map<std::string, Relation>& relations() const { return relations_; }
    bool has_relation(const std::string& name) const { return relations_.contains(name); }
    const Relation& relation(const std::string& name) const;

    /// Copy with one more relation; throws InputError if the name is taken.
    RelationalStructure with_relation(const std::string& name, Relation relation) const;

    /// Largest relation arity, padded to at least 2.
    int theta() const;

    /// Throws InputError unless every element of `subset` is in the domain.
    void check_subset(const Subset& subset) const;

    friend bool operator==(const RelationalStructure&, const RelationalStructure&) = default;

private:
    int size_ = 1;
    std::map<std::string, Relation> relations_;
};

struct SingletonExpansion {
    RelationalStructure structure;
    bool added = false;
};

/// Adds the unary relations `_s<a>` = {(a)} that are not already present.
SingletonExpansion with_singletons(const RelationalStructure& structure);

/// A k-ary operation on {0,...,size-1}; values[i] is the image of the tuple
/// whose lexicographic rank is i.
class OperationTable {
public:
    OperationTable() = default;
    OperationTable(int domain_size, int arity, std::vector<Element> values);

    static OperationTable projection(int domain_size, int arity, int coordinate);

    template <typename F>
    static OperationTable from_function(int domain_size, int arity, F&& f);

    int domain_size() const { return size_; }
    int arity() const { return arity_; }
    const std::vector<Element>& values() const { return values_; }
    std::vector<Element>& mutable_values() { return values_; }

    std::size_t index_of(std::span<const Element> args) const;
    Tuple arguments_of(std::size_t index) const;
    Element operator()(std::span<const Element> args) const { return values_[index_of(args)]; }
    Element operator()(std::initializer_list<Element> args) const
    {
        return (*this)(std::span<const Element>(args.begin(), args.size()));
    }

    bool is_idempotent() const;

    friend bool operator==(const OperationTable&, const OperationTable&) = default;

private:
    int size_ = 1;
    int arity_ = 1;
    std::vector<Element> values_{0};
};

template <typename F>
OperationTable OperationTable::from_function(int domain_size, int arity, F&& f)
{
    std::size_t count = 1;
    for (int i = 0; i < arity; ++i)
        count *= static_cast<std::size_t>(domain_size);
    std::vector<Element> values(count);
    Tuple args(arity, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
        values[idx] = f(std::span<const Element>(args));
        for (int pos = arity - 1; pos >= 0; --pos) {
            if (++args[pos] < domain_size)
                break;
            args[pos] = 0;
        }
    }
    return OperationTable(domain_size, arity, std::move(values));
}

struct PolymorphismViolation {
    std::string relation;
    std::vector<Tuple> rows;
    Tuple image;
};

/// First (relation name, lexicographic row choice) that f fails to preserve.
std::optional<PolymorphismViolation> find_polymorphism_violation(const RelationalStructure& structure,
                                                                 const OperationTable& f);

bool is_polymorphism(const RelationalStructure& structure, const OperationTable& f);

/// Deletes coordinate `drop` (1-based) from every tuple.
Relation relation_project(const Relation& relation, int drop);

using Walk = std::vector<int>;

class Digraph {
public:
    Digraph() = default;
    Digraph(int vertex_count, std::vector<std::pair<int, int>> edges);

    int vertex_count() const { return vertex_count_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool has_edge(int from, int to) const;
    std::vector<std::vector<int>> successors() const;
    std::vector<std::vector<int>> predecessors() const;

    friend bool operator==(const Digraph&, const Digraph&) = default;

private:
    int vertex_count_ = 0;
    std::vector<std::pair<int, int>> edges_;
};

/// Lexicographically least among the shortest walks from `from` to `to`.
std::optional<Walk> digraph_reach(const Digraph& digraph, const Subset& from, const Subset& to);

/// Shortest closed walk through the least vertex that lies on a cycle.
std::optional<Walk> digraph_closed_walk(const Digraph& digraph);

bool meets_diagonal(const Digraph& digraph);

/// Composition as a binary relation: (u,w) with (u,v) in first and (v,w) in second.
Digraph compose(const Digraph& first, const Digraph& second);

} // namespace absorb
