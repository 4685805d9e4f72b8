#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <absorb/bounds.hpp>
#include <absorb/comb.hpp>
#include <absorb/engine.hpp>
#include <absorb/surgery.hpp>

#include <doctest.h>

#include <random>

using namespace absorb;

namespace {

// neq composed three times is neq again, which is {0}-essential.
PPFormula neq_chain()
{
    return PPFormula::from_names({"x1", "x2"}, {{"neq", {"x1", "y1"}}, {"neq", {"y1", "y2"}}, {"neq", {"y2", "x2"}}});
}

// Keeps the copies chosen by the third step and applies its restrictions.
Relation restrict_blocks(const Relation& v, const SurgeryChoice& choice, const Subset& b)
{
    std::vector<Tuple> out;
    const int l = choice.copies;
    for (const auto& t : v.tuples()) {
        bool ok = true;
        Tuple kept;
        for (std::size_t i = 0; i < choice.m.size(); ++i)
            for (int j = 0; j < l; ++j) {
                const Element e = t[i * l + j];
                if (j == choice.m[i])
                    kept.push_back(e);
                else if (choice.restrictions[i][j] == 'B' && !b.contains(e))
                    ok = false;
            }
        if (ok)
            out.push_back(kept);
    }
    return Relation(static_cast<int>(choice.m.size()), out);
}

} // namespace

TEST_CASE("surgery step on the disequality chain")
{
    const auto a = fixture::neq2();
    const Subset b({0});
    auto phi = neq_chain();
    REQUIRE(is_b_essential(evaluate_pp(phi, a), b));
    auto r = surgery_step(phi, a, b, phi.index_of("y1"), 0);

    CHECK(r.psi.variable_count() == phi.variable_count() + 1);
    CHECK(r.psi.atoms().size() == phi.atoms().size() + 2);
    const int l = a.size();
    CHECK(r.theta.variable_count() == l * r.psi.variable_count() - (l - 1));
    CHECK(r.theta.atoms().size() == l * r.psi.atoms().size());
    CHECK(r.v.arity() == l * 2);

    CHECK(r.v == oracle::evaluate(r.theta, r.structure));
    CHECK(r.v_avoids_b);
    CHECK(r.v_meets_every_block);
    CHECK(has_block_property(r.v, {l, l}, b));
    CHECK(r.result_essential);
    CHECK(r.result_relation == oracle::evaluate(r.result, r.structure));
    CHECK(r.result_relation == restrict_blocks(r.v, r.choice, b));
    CHECK(oracle::essential(r.result_relation, b));
    for (std::size_t i = 0; i < r.choice.m.size(); ++i) {
        CHECK(r.choice.m[i] >= 0);
        CHECK(r.choice.m[i] < l);
        CHECK(r.choice.restrictions[i][r.choice.m[i]] == '-');
    }
    auto j = to_json(r.choice, phi);
    CHECK(j["y"] == "y1");
    CHECK(j["copies"] == 2);
}

TEST_CASE("surgery preconditions")
{
    const auto a = fixture::neq2();
    auto phi = neq_chain();
    CHECK_THROWS_AS(surgery_step(phi, a, Subset({0}), phi.index_of("x1"), 0), InputError);
    CHECK_THROWS_AS(surgery_step(phi, a, Subset({0}), phi.index_of("y1"), 2), InputError);
    // leq composed with itself is not {0}-essential.
    auto ord = PPFormula::from_names({"x1", "x2"}, {{"leq", {"x1", "y"}}, {"leq", {"y", "x2"}}});
    CHECK_THROWS_AS(surgery_step(ord, fixture::ord2(), Subset({0}), ord.index_of("y"), 0), InputError);
    // The affine structure defines {0}-essential relations but {0} does not absorb.
    auto aff = PPFormula::from_names({"x1", "x2"}, {{"aff", {"x1", "x2", "y"}}, {"s1", {"y"}}});
    CHECK_THROWS_AS(surgery_step(aff, fixture::aff2(), Subset({0}), aff.index_of("y"), 0), InputError);
}

TEST_CASE("third step on a hand-made block relation")
{
    // Two blocks of two coordinates over {0,1}, B = {0}.
    const Subset b({0});
    Relation w(4, {{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}});
    REQUIRE(has_block_property(w, {2, 2}, b));
    std::vector<int> m;
    std::vector<std::string> restrictions;
    choose_block_restrictions(w, {2, 2}, b, m, restrictions);
    SurgeryChoice choice;
    choice.copies = 2;
    choice.m = m;
    choice.restrictions = restrictions;
    CHECK(oracle::essential(restrict_blocks(w, choice, b), b));
    CHECK_FALSE(has_block_property(Relation(4, {{0, 0, 0, 0}}), {2, 2}, b));
}

TEST_CASE("comb extraction on a caterpillar")
{
    const auto a = fixture::aff2();
    const Subset b({0});
    // Spine u1 - u2 - u3 with teeth; free leaves x1..x5.
    auto phi = PPFormula::from_names({"x1", "x2", "x3", "x4", "x5"}, {{"aff", {"x1", "x2", "u1"}},
                                                                     {"aff", {"u1", "x3", "u2"}},
                                                                     {"aff", {"u2", "x4", "x5"}}});
    REQUIRE_FALSE(simplified_violation(phi));
    auto ex = comb_extract(phi, a, b, phi.index_of("x1"));
    CHECK(ex.kappa == 5);
    CHECK(ex.theta == 3);
    CHECK(ex.comb.lambda() == static_cast<int>(ex.selected.size()));
    CHECK(within_comb_bound(ex.kappa, ex.theta, ex.comb.lambda()));
    CHECK(ex.selected.front() == phi.index_of("x1"));
    for (int z : ex.selected)
        CHECK(phi.is_free(z));
    auto comb = comb_to_formula(ex.comb, a);
    CHECK(evaluate_pp(comb.formula, comb.structure) == oracle::evaluate(ex.fixed, ex.structure));
    auto back = comb_from_json(to_json(ex.comb), 2);
    CHECK(back.sections == ex.comb.sections);
}

TEST_CASE("comb extraction on a path")
{
    const auto ord = fixture::ord2();
    auto phi = PPFormula::from_names({"x1", "x2"}, {{"leq", {"x1", "w"}}, {"leq", {"w", "x2"}}});
    auto ex = comb_extract(phi, ord, Subset({0}), 0);
    CHECK(ex.comb.lambda() == 1);
    CHECK(ex.selected == std::vector<int>{0});
    auto comb = comb_to_formula(ex.comb, ord);
    CHECK(evaluate_pp(comb.formula, comb.structure) == evaluate_pp(ex.fixed, ex.structure));
    CHECK_THROWS_AS(comb_extract(phi, ord, Subset({0}), phi.index_of("w")), InputError);
    auto cyc = PPFormula::from_names({"x"}, {{"leq", {"x", "y"}}, {"leq", {"y", "z"}}, {"leq", {"z", "y"}}});
    CHECK_THROWS_AS(comb_extract(cyc, ord, Subset({0}), 0), InputError);
}

TEST_CASE("comb extraction on random simplified trees")
{
    std::mt19937 rng(5);
    int runs = 0;
    for (const auto& s : {fixture::ord2(), fixture::aff2(), fixture::neq2()})
        for (int trial = 0; trial < 40; ++trial) {
            auto raw = gen::tree_formula(rng, s, 2 + static_cast<int>(rng() % 5), true);
            Rewritten simple;
            try {
                simple = simplify(raw, s);
            } catch (const InputError&) {
                continue;
            }
            if (simple.formula.variable_count() < 2 || !analyze_formula(simple.formula).is_tree())
                continue;
            const Subset b({static_cast<Element>(rng() % 2)});
            CAPTURE(serialize(to_json(simple.formula)));
            auto ex = comb_extract(simple.formula, simple.structure, b, simple.formula.free().front());
            ++runs;
            CHECK(within_comb_bound(ex.kappa, ex.theta, ex.comb.lambda()));
            auto comb = comb_to_formula(ex.comb, simple.structure);
            CHECK(evaluate_pp(comb.formula, comb.structure) == oracle::evaluate(ex.fixed, ex.structure));
        }
    CHECK(runs > 40);
}

TEST_CASE("comb analysis examples")
{
    const auto a = fixture::aff2();
    const Subset b({0});
    SUBCASE("full sections")
    {
        CombFormula comb{std::vector<Relation>(4, Relation::full(2, 3)), {}};
        auto r = comb_analyze(comb, a, b);
        for (std::size_t i = 0; i < r.g.size(); ++i) {
            CHECK(r.g[i] == Subset::full(2));
            CHECK(r.h[i] == Subset::full(2));
        }
        REQUIRE(r.repeated);
        CHECK(*r.repeated == std::make_pair(2, 3));
        CHECK_FALSE(r.comb_essential);
        CHECK_FALSE(r.contradiction);
    }
    SUBCASE("affine sections against path enumeration")
    {
        const Relation s = oracle::subpower(a, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}});
        CombFormula comb{std::vector<Relation>(4, s), {}};
        auto r = comb_analyze(comb, a, b);
        const int lambda = 4;
        for (int i = 2; i <= lambda; ++i) {
            // Enumerate all spine walks with teeth in B.
            std::set<Element> g, h;
            for (std::size_t idx = 0; idx < oracle::ipow(2, lambda + 1); ++idx) {
                Tuple w = oracle::digits(idx, 2, lambda + 1);
                bool prefix = true, suffix = true;
                for (int k = 1; k <= lambda; ++k) {
                    const bool ok = s.contains(Tuple{0, w[k - 1], w[k]});
                    if (k < i)
                        prefix = prefix && ok;
                    else
                        suffix = suffix && ok;
                }
                if (prefix)
                    g.insert(w[i - 1]);
                if (suffix)
                    h.insert(w[i - 1]);
            }
            CHECK(r.g[i - 2] == Subset({g.begin(), g.end()}));
            CHECK(r.h[i - 2] == Subset({h.begin(), h.end()}));
        }
        REQUIRE(r.repeated);
        CHECK(*r.repeated == std::make_pair(2, 3));
        REQUIRE(r.p);
        CHECK(r.p_within_q);
    }
    SUBCASE("equal sections repeat")
    {
        CombFormula comb{std::vector<Relation>(3, Relation(3, {{0, 0, 1}, {1, 1, 0}, {0, 1, 1}})), {}};
        auto r = comb_analyze(comb, a, b);
        REQUIRE(r.repeated);
        CHECK(*r.repeated == std::make_pair(2, 3));
    }
    SUBCASE("single section")
    {
        CombFormula comb{{Relation::full(2, 3)}, {}};
        auto r = comb_analyze(comb, a, b);
        CHECK(r.g.empty());
        CHECK_FALSE(r.repeated);
        CHECK_FALSE(r.comb_essential);
    }
}
