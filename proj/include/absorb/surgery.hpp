#pragma once

#include <absorb/codec.hpp>
#include <absorb/model.hpp>
#include <absorb/ppform.hpp>

#include <string>
#include <vector>

namespace absorb {

struct SurgeryChoice {
    int y = -1;    // variable of the input formula
    int atom = -1; // atom of the input formula whose occurrence of y is moved
    Relation c;    // C = phi(y)
    int copies = 1;
    /// Per free variable i: index (0-based copy) kept as x_i.
    std::vector<int> m;
    /// Per free variable i and copy j: 'A' or 'B' for the added restriction,
    /// '-' at the kept copy.
    std::vector<std::string> restrictions;
};

struct SurgeryResult {
    PPFormula psi;
    PPFormula theta;
    PPFormula result;
    /// Input structure plus C, B and derived relations used by psi/theta/result.
    RelationalStructure structure;
    /// Theta evaluated over block-ordered copies x_1^1..x_1^l, x_2^1, ...
    Relation v;
    bool v_avoids_b = false;
    bool v_meets_every_block = false;
    Relation result_relation;
    bool result_essential = false;
    SurgeryChoice choice;
};

/// Block-wise check: W avoids B^s and meets B^.. x A^{l_i} x B^.. for every block.
bool has_block_property(const Relation& w, const std::vector<int>& block_sizes, const Subset& b);

/// Picks the kept copy m_i and restrictions C_i^j for a block-essential W,
/// reducing the last block with more than one coordinate first.
void choose_block_restrictions(const Relation& w, const std::vector<int>& block_sizes, const Subset& b,
                               std::vector<int>& m, std::vector<std::string>& restrictions);

/// One surgery step: move the occurrence of y in `atom` to a fresh copy,
/// chain |A| copies of the result and keep one coordinate per block.
SurgeryResult surgery_step(const PPFormula& phi, const RelationalStructure& structure, const Subset& b, int y,
                           int atom, const Limits& limits = {});

Json to_json(const SurgeryChoice& choice, const PPFormula& phi);

} // namespace absorb
