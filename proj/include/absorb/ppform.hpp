#pragma once

#include <absorb/codec.hpp>
#include <absorb/model.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace absorb {

struct Atom {
    std::string relation;
    std::vector<int> scope;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// A primitive-positive formula: existentially quantified conjunction of
/// atoms. Variables are indices into `variables()`; the free variables are
/// listed in output order and every other variable is bound.
class PPFormula {
public:
    PPFormula() = default;
    PPFormula(std::vector<std::string> variables, std::vector<int> free, std::vector<Atom> atoms);

    /// Builds a formula from variable names. Bound variables are collected
    /// from the atoms in order of first appearance, then `extra_bound`.
    static PPFormula from_names(const std::vector<std::string>& free,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& atoms,
                                const std::vector<std::string>& extra_bound = {});

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<int>& free() const { return free_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    int variable_count() const { return static_cast<int>(variables_.size()); }

    int index_of(const std::string& name) const;
    bool is_free(int variable) const;

    /// Throws InputError unless every atom names a relation of `structure`
    /// with matching arity.
    void check_against(const RelationalStructure& structure) const;

    friend bool operator==(const PPFormula&, const PPFormula&) = default;

private:
    std::vector<std::string> variables_;
    std::vector<int> free_;
    std::vector<Atom> atoms_;
};

Json to_json(const PPFormula& formula);
PPFormula formula_from_json(const Json& json);

/// The relation defined over the free variables. Uses dynamic programming
/// along the incidence tree for tree formulas, backtracking search otherwise.
Relation evaluate_pp(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits = {});
Relation evaluate_pp_search(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits = {});
Relation evaluate_pp_tree(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits = {});

/// Incidence multigraph of a formula: variables on one side, atoms on the
/// other, one edge per scope position.
class FormulaReport {
public:
    explicit FormulaReport(const PPFormula& formula);

    struct Incidence {
        int variable;
        int atom;
        int position;
    };

    const std::vector<Incidence>& incidences() const { return incidences_; }
    const std::vector<int>& degrees() const { return degrees_; }
    int degree(int variable) const { return degrees_[variable]; }
    std::vector<int> leaves() const;
    std::vector<int> atoms_of(int variable) const;

    const std::vector<int>& component_of() const { return component_; }
    int component_count() const { return component_count_; }
    bool connected() const { return component_count_ <= 1; }
    bool simple() const { return simple_; }
    bool acyclic() const { return acyclic_; }
    /// Connected, acyclic and without multiple edges.
    bool is_tree() const { return simple_ && acyclic_ && connected(); }

    /// Variables other than v sharing an atom with v.
    std::vector<int> neighborhood(int variable) const;

    /// Variables of the component containing `towards` once every atom on
    /// `root` except the first one leading towards `towards` is removed.
    /// Includes `root`; the two variables need not be adjacent.
    std::vector<int> branch(int root, int towards) const;

    Json to_json() const;

private:
    PPFormula formula_;
    std::vector<Incidence> incidences_;
    std::vector<std::vector<int>> var_atoms_;
    std::vector<int> degrees_;
    std::vector<int> component_;
    int component_count_ = 0;
    bool simple_ = true;
    bool acyclic_ = true;
};

FormulaReport analyze_formula(const PPFormula& formula);

/// A formula together with the structure its atoms resolve against, after
/// derived relations were registered.
struct Rewritten {
    PPFormula formula;
    RelationalStructure structure;
};

/// Registers `relation` under a fresh name with the given prefix, reusing an
/// existing relation with identical tuples when there is one.
std::string register_relation(RelationalStructure& structure, const Relation& relation, const std::string& prefix);

/// First violated simplified-form property, if any: connected, free
/// variables exactly the leaves, bound degrees 2 or 3, non-repeating scopes,
/// no unary atoms.
std::optional<std::string> simplified_violation(const PPFormula& formula);

Rewritten simplify(const PPFormula& formula, const RelationalStructure& structure, const Limits& limits = {});

Rewritten pp_substitute(const PPFormula& formula, const RelationalStructure& structure,
                        const std::map<int, Relation>& replacements);

} // namespace absorb
