#pragma once

#include <absorb/codec.hpp>
#include <absorb/model.hpp>
#include <absorb/ppform.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace absorb {

/// (exists w_1..w_{lambda+1}) AND_i S_i(z_i, w_i, w_{i+1}) with free z_1..z_lambda.
struct CombFormula {
    std::vector<Relation> sections;
    /// How each section was obtained, e.g. the generators of a subpower.
    std::vector<std::string> provenance;

    int lambda() const { return static_cast<int>(sections.size()); }
};

/// The comb as an explicit formula over `structure` extended by relations
/// "_comb<i>".
Rewritten comb_to_formula(const CombFormula& comb, const RelationalStructure& structure);

Json to_json(const CombFormula& comb);
CombFormula comb_from_json(const Json& json, int domain_size);

struct CombExtraction {
    CombFormula comb;
    /// Free variables z_1..z_lambda of the input formula, in comb order.
    std::vector<int> selected;
    /// w_2..w_{lambda+1}; w_1 stands for z_1.
    std::vector<int> spine;
    /// Input formula with B(x) added for every unselected free x, free
    /// variables = selected.
    PPFormula fixed;
    RelationalStructure structure;
    int kappa = 0;
    int theta = 2;
};

/// Walks a simplified tree formula from the leaf z1, selecting the leaves
/// of a comb. Throws Error if the arity bound kappa <= (2theta-2)^lambda/2+1
/// fails.
CombExtraction comb_extract(const PPFormula& phi, const RelationalStructure& structure, const Subset& b, int z1,
                            const Limits& limits = {});

/// Number of free variables outside Branch(u; z1), counting u itself when
/// it is free.
int leaves_outside(const FormulaReport& report, const PPFormula& phi, int u, int z1);

/// p_i restricted to teeth in `support`: {(u,v) : exists z in support, (z,u,v) in S_i}.
Digraph comb_step(const CombFormula& comb, int i, const Subset& support, int domain_size);

/// p_k o ... o p_{l-1} (1-based, k < l <= lambda + 1).
Digraph comb_path(const CombFormula& comb, int k, int l, const Subset& support, int domain_size);

struct CombReport {
    int lambda = 0;
    /// Index i - 2 holds G_i / H_i for i = 2..lambda.
    std::vector<Subset> g;
    std::vector<Subset> h;
    std::optional<std::pair<int, int>> repeated;
    std::optional<Digraph> p;
    std::optional<Digraph> q;
    bool comb_essential = false;
    bool gh_disjoint = false;
    bool q_meets_gh = false;
    bool g_predecessors = false;
    bool h_successors = false;
    bool g_closed = false;
    bool p_within_q = false;
    std::optional<Walk> reach;
    bool contradiction = false;
};

CombReport comb_analyze(const CombFormula& comb, const RelationalStructure& structure, const Subset& b,
                        const Limits& limits = {});

Json to_json(const CombReport& report);

} // namespace absorb
