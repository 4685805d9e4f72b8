#include <absorb/surgery.hpp>

#include <absorb/decide.hpp>
#include <absorb/engine.hpp>

#include <algorithm>
#include <numeric>

namespace absorb {

namespace {

struct Coordinate {
    int block;
    int copy;
};

bool all_in_b_except(const Tuple& t, const Subset& b, const std::vector<Coordinate>& coords, int block, int skip)
{
    for (std::size_t q = 0; q < t.size(); ++q) {
        if (static_cast<int>(q) == skip || coords[q].block == block)
            continue;
        if (!b.contains(t[q]))
            return false;
    }
    return true;
}

void reduce(const Relation& w, std::vector<Coordinate> coords, const Subset& b, std::vector<int>& m,
            std::vector<std::string>& restrictions)
{
    std::map<int, int> count;
    for (const auto& c : coords)
        ++count[c.block];
    int block = -1;
    for (const auto& [i, k] : count)
        if (k > 1)
            block = i;
    if (block < 0) {
        for (const auto& c : coords)
            m[c.block] = c.copy;
        return;
    }
    int p = -1;
    for (int q = 0; q < static_cast<int>(coords.size()); ++q)
        if (coords[q].block == block)
            p = q;
    const bool meets = std::any_of(w.tuples().begin(), w.tuples().end(),
                                   [&](const Tuple& t) { return all_in_b_except(t, b, coords, -1, p); });
    if (!meets) {
        restrictions[block][coords[p].copy] = 'A';
        Relation projected = relation_project(w, p + 1);
        coords.erase(coords.begin() + p);
        reduce(projected, std::move(coords), b, m, restrictions);
        return;
    }
    // Keep coordinate p; every other copy in its block is restricted to B.
    std::vector<int> keep;
    for (int q = 0; q < static_cast<int>(coords.size()); ++q) {
        if (coords[q].block == block && q != p)
            restrictions[block][coords[q].copy] = 'B';
        else
            keep.push_back(q);
    }
    std::vector<Tuple> tuples;
    for (const auto& t : w.tuples()) {
        bool ok = true;
        for (int q = 0; q < static_cast<int>(coords.size()) && ok; ++q)
            if (coords[q].block == block && q != p && !b.contains(t[q]))
                ok = false;
        if (!ok)
            continue;
        Tuple reduced;
        for (int q : keep)
            reduced.push_back(t[q]);
        tuples.push_back(std::move(reduced));
    }
    std::vector<Coordinate> kept;
    for (int q : keep)
        kept.push_back(coords[q]);
    Relation reduced_w(static_cast<int>(kept.size()), std::move(tuples));
    reduce(reduced_w, std::move(kept), b, m, restrictions);
}

std::vector<Coordinate> block_coordinates(const std::vector<int>& block_sizes)
{
    std::vector<Coordinate> coords;
    for (int i = 0; i < static_cast<int>(block_sizes.size()); ++i) {
        if (block_sizes[i] < 1)
            throw InputError("block sizes must be positive");
        for (int j = 0; j < block_sizes[i]; ++j)
            coords.push_back({i, j});
    }
    return coords;
}

} // namespace

bool has_block_property(const Relation& w, const std::vector<int>& block_sizes, const Subset& b)
{
    auto coords = block_coordinates(block_sizes);
    if (static_cast<int>(coords.size()) != w.arity())
        throw InputError("block sizes do not add up to the relation arity");
    for (const auto& t : w.tuples())
        if (all_in_b_except(t, b, coords, -1, -1))
            return false;
    for (int i = 0; i < static_cast<int>(block_sizes.size()); ++i)
        if (std::none_of(w.tuples().begin(), w.tuples().end(),
                         [&](const Tuple& t) { return all_in_b_except(t, b, coords, i, -1); }))
            return false;
    return true;
}

void choose_block_restrictions(const Relation& w, const std::vector<int>& block_sizes, const Subset& b,
                               std::vector<int>& m, std::vector<std::string>& restrictions)
{
    auto coords = block_coordinates(block_sizes);
    if (static_cast<int>(coords.size()) != w.arity())
        throw InputError("block sizes do not add up to the relation arity");
    m.assign(block_sizes.size(), 0);
    restrictions.clear();
    for (int size : block_sizes)
        restrictions.emplace_back(static_cast<std::size_t>(size), '-');
    reduce(w, std::move(coords), b, m, restrictions);
}

SurgeryResult surgery_step(const PPFormula& phi, const RelationalStructure& structure, const Subset& b, int y,
                           int atom, const Limits& limits)
{
    phi.check_against(structure);
    structure.check_subset(b);
    if (auto violation = simplified_violation(phi))
        throw InputError("formula is not in simplified form: " + *violation);
    if (y < 0 || y >= phi.variable_count() || phi.is_free(y))
        throw InputError("surgery needs a bound variable");
    if (atom < 0 || atom >= static_cast<int>(phi.atoms().size()))
        throw InputError("atom index out of range");
    const auto& scope = phi.atoms()[atom].scope;
    if (std::find(scope.begin(), scope.end(), y) == scope.end())
        throw InputError("the chosen atom does not contain the chosen variable");
    const Relation u = evaluate_pp(phi, structure, limits);
    if (u.arity() < 2 || !is_b_essential(u, b))
        throw InputError("formula does not define a B-essential relation");
    if (!decide_jonsson(structure, b, limits).holds)
        throw InputError("B is not Jonsson absorbing");

    SurgeryResult out;
    out.structure = structure;
    const Relation c = evaluate_pp(PPFormula(phi.variables(), {y}, phi.atoms()), structure, limits);
    const std::string c_name = register_relation(out.structure, c, "_C");
    std::vector<Tuple> b_tuples;
    for (Element e : b.elements())
        b_tuples.push_back({e});
    const std::string b_name = register_relation(out.structure, Relation(1, b_tuples), "_B");

    // First step: y_* takes over the chosen occurrence of y.
    std::vector<std::string> psi_names = phi.variables();
    std::string star = phi.variables()[y] + "*";
    while (std::find(psi_names.begin(), psi_names.end(), star) != psi_names.end())
        star += "*";
    psi_names.push_back(star);
    const int y_star = static_cast<int>(psi_names.size()) - 1;
    std::vector<Atom> psi_atoms = phi.atoms();
    std::replace(psi_atoms[atom].scope.begin(), psi_atoms[atom].scope.end(), y, y_star);
    psi_atoms.push_back({c_name, {y}});
    psi_atoms.push_back({c_name, {y_star}});
    out.psi = PPFormula(psi_names, phi.free(), psi_atoms);

    // Second step: l chained copies, y_*^i identified with y^{i+1}.
    const int l = structure.size();
    const int nv = out.psi.variable_count();
    std::vector<std::vector<int>> id(l, std::vector<int>(nv, -1));
    std::vector<std::string> theta_names;
    for (int i = 0; i < l; ++i)
        for (int v = 0; v < nv; ++v) {
            if (i > 0 && v == y) {
                id[i][v] = id[i - 1][y_star];
                continue;
            }
            id[i][v] = static_cast<int>(theta_names.size());
            theta_names.push_back(psi_names[v] + "^" + std::to_string(i + 1));
        }
    std::vector<Atom> theta_atoms;
    for (int i = 0; i < l; ++i)
        for (const auto& a : psi_atoms) {
            Atom copy{a.relation, {}};
            for (int v : a.scope)
                copy.scope.push_back(id[i][v]);
            theta_atoms.push_back(std::move(copy));
        }
    std::vector<int> theta_free;
    for (int x : phi.free())
        for (int i = 0; i < l; ++i)
            theta_free.push_back(id[i][x]);
    out.theta = PPFormula(theta_names, theta_free, theta_atoms);
    out.v = evaluate_pp(out.theta, out.structure, limits);

    const int kappa = static_cast<int>(phi.free().size());
    const std::vector<int> blocks(kappa, l);
    auto coords = block_coordinates(blocks);
    out.v_avoids_b = std::none_of(out.v.tuples().begin(), out.v.tuples().end(),
                                  [&](const Tuple& t) { return all_in_b_except(t, b, coords, -1, -1); });
    out.v_meets_every_block = true;
    for (int i = 0; i < kappa; ++i)
        if (std::none_of(out.v.tuples().begin(), out.v.tuples().end(),
                         [&](const Tuple& t) { return all_in_b_except(t, b, coords, i, -1); }))
            out.v_meets_every_block = false;

    // Third step.
    SurgeryChoice& choice = out.choice;
    choice.y = y;
    choice.atom = atom;
    choice.c = c;
    choice.copies = l;
    choose_block_restrictions(out.v, blocks, b, choice.m, choice.restrictions);

    std::vector<std::string> result_names = theta_names;
    std::vector<int> result_free;
    std::vector<Atom> result_atoms = theta_atoms;
    for (int i = 0; i < kappa; ++i) {
        const int x = phi.free()[i];
        const int kept = id[choice.m[i]][x];
        result_names[kept] = phi.variables()[x];
        result_free.push_back(kept);
        for (int j = 0; j < l; ++j)
            if (choice.restrictions[i][j] == 'B')
                result_atoms.push_back({b_name, {id[j][x]}});
    }
    out.result = PPFormula(result_names, result_free, result_atoms);
    out.result_relation = evaluate_pp(out.result, out.structure, limits);
    out.result_essential = out.result_relation.arity() >= 2 && is_b_essential(out.result_relation, b);
    return out;
}

Json to_json(const SurgeryChoice& choice, const PPFormula& phi)
{
    Json m = Json::array();
    for (int k : choice.m)
        m.push_back(k + 1);
    return Json{{"y", phi.variables().at(choice.y)},
                {"atom", choice.atom},
                {"c", to_json(choice.c)},
                {"copies", choice.copies},
                {"m", m},
                {"restrictions", choice.restrictions}};
}

} // namespace absorb
