#pragma once

#include <absorb/model.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace absorb {

/// Candidate values of one source vertex, as a bitset over target elements.
using Mask = std::uint64_t;

inline constexpr int max_target_size = 64;

inline Mask mask_of(const Subset& subset)
{
    Mask m = 0;
    for (Element e : subset.elements())
        m |= Mask{1} << e;
    return m;
}

Subset subset_of(Mask mask);

/// A homomorphism-extension problem: find h : source -> target respecting
/// every relation and the per-vertex candidate sets.
class HomInstance {
public:
    HomInstance(std::shared_ptr<const RelationalStructure> source, std::shared_ptr<const RelationalStructure> target);
    HomInstance(RelationalStructure source, RelationalStructure target);

    const RelationalStructure& source() const { return *source_; }
    const RelationalStructure& target() const { return *target_; }
    const std::vector<Mask>& domains() const { return domains_; }

    void pin(int vertex, Element value);
    void restrict(int vertex, const Subset& allowed);
    void restrict(int vertex, Mask allowed);

private:
    std::shared_ptr<const RelationalStructure> source_;
    std::shared_ptr<const RelationalStructure> target_;
    std::vector<Mask> domains_;
};

/// Greatest generalized-arc-consistent refinement of the candidate sets, or
/// nullopt when some set empties.
std::optional<std::vector<Subset>> ac_fixpoint(const HomInstance& instance);

/// First homomorphism in MRV / lexicographic-value order.
std::optional<std::vector<Element>> find_hom(const HomInstance& instance);

/// Every distinct tuple (h(v_1),...,h(v_m)) over all homomorphisms h, sorted.
std::vector<Tuple> enumerate_images(const HomInstance& instance, std::span<const int> vertices);

/// The k-th power of a structure. Vertex i is the k-tuple of lexicographic
/// rank i, so homomorphisms into the base are k-ary operation tables.
class PowerStructure {
public:
    PowerStructure(const RelationalStructure& base, int exponent, const Limits& limits = {});

    int exponent() const { return exponent_; }
    int base_size() const { return base_size_; }
    std::size_t vertex_count() const { return vertex_count_; }
    const std::shared_ptr<const RelationalStructure>& structure() const { return power_; }
    const std::shared_ptr<const RelationalStructure>& base() const { return base_; }

    int vertex_of(std::span<const Element> column) const;
    Tuple column_of(int vertex) const;

    /// Vertices (c_1,...,c_n) of the columns of a list of generator n-tuples.
    std::vector<int> columns_of(const std::vector<Tuple>& generators) const;

private:
    std::shared_ptr<const RelationalStructure> base_;
    std::shared_ptr<const RelationalStructure> power_;
    int exponent_;
    int base_size_;
    std::size_t vertex_count_;
};

RelationalStructure power_structure(const RelationalStructure& structure, int exponent, const Limits& limits = {});

struct Subpower {
    int arity = 1;
    Relation tuples;
    std::vector<Tuple> generators;
};

bool subpower_membership(const RelationalStructure& structure, const std::vector<Tuple>& generators,
                         const Tuple& tuple, const Limits& limits = {});

Subpower generate_subpower(const RelationalStructure& structure, const std::vector<Tuple>& generators, int arity,
                           const Limits& limits = {});

/// Same, over a power structure built once by the caller (exponent = |generators|).
Subpower generate_subpower(const PowerStructure& power, const std::vector<Tuple>& generators);

struct Closure {
    Subset closure;
    bool is_subuniverse = false;
};

Closure closure_unary(const RelationalStructure& structure, const Subset& subset, const Limits& limits = {});

bool is_b_essential(const Relation& relation, const Subset& b);

struct EssentialWitness {
    int arity = 2;
    std::vector<Tuple> generators;
    Relation relation;
};

/// First generator list t_1..t_n, t_i in B^(i-1) x (A\B) x B^(n-i), whose
/// generated subpower avoids B^n. Computed over the idempotent reduct.
std::optional<EssentialWitness> essential_witness_search(const RelationalStructure& structure, const Subset& b,
                                                         int arity, const Limits& limits = {});

/// An idempotent n-ary polymorphism t with t(B,..,B,A,B,..,B) in B for every position.
std::optional<OperationTable> absorption_term_search(const RelationalStructure& structure, const Subset& b, int arity,
                                                     const Limits& limits = {});

} // namespace absorb
