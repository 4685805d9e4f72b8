#include "fixtures.hpp"
#include "oracles.hpp"

#include <absorb/bounds.hpp>
#include <absorb/decide.hpp>

#include <doctest.h>

using namespace absorb;

TEST_CASE("fixture verdicts")
{
    auto ord = decide_absorption(fixture::ord2(), Subset({0}));
    CHECK(ord.holds);
    CHECK(ord.property == "absorbing");
    CHECK_FALSE(ord.failing);

    auto aff = decide_jonsson(fixture::aff2(), Subset({0}));
    CHECK_FALSE(aff.holds);
    CHECK(aff.property == "jonsson-absorbing");
    REQUIRE(aff.failing);
    CHECK(*aff.failing == Quintuple{0, 1, 1, 0, 0});
    CHECK(oracle::failing_quintuple(fixture::aff2(), Subset({0})) == aff.failing);

    CHECK(decide_jonsson(fixture::triv1(), Subset({0})).holds);
    CHECK(decide_jonsson(fixture::neq2(), Subset({0})).holds);
    CHECK(decide_jonsson(fixture::ord3(), Subset({0})).holds);
    CHECK(decide_jonsson(fixture::ord3(), Subset({0, 1})).holds);
}

TEST_CASE("decision input errors")
{
    CHECK_THROWS_AS(decide_jonsson(fixture::aff2(), Subset()), InputError);
    CHECK_THROWS_AS(decide_jonsson(fixture::aff2(), Subset({3})), InputError);
    std::vector<Tuple> sums;
    for (Element x = 0; x < 3; ++x)
        for (Element y = 0; y < 3; ++y)
            sums.push_back({x, y, (x + y) % 3});
    // x - y + z preserves the graph of addition and leaves {0,1}.
    RelationalStructure z3(3, {{"sum", Relation(3, sums)}});
    CHECK_THROWS_AS(decide_jonsson(z3, Subset({0, 1})), InputError);
}

TEST_CASE("jonsson digraph of the failing affine quintuple")
{
    auto jd = jonsson_digraph(fixture::aff2(), Subset({0}), Quintuple{0, 1, 1, 0, 0});
    CHECK_FALSE(digraph_reach(jd.edges, Subset({0}), Subset({1})));
    for (const auto& t : jd.generated.tuples())
        CHECK((t[0] ^ t[1] ^ t[2]) == 0);
}

TEST_CASE("certificates round trip and verify")
{
    const auto a = fixture::ord2();
    const Subset b({0});
    auto d = decide_jonsson(a, b);
    REQUIRE(d.certificate);
    CHECK(oracle::certificate_valid(a, b, *d.certificate));
    auto v = verify_np_certificate(a, b, *d.certificate);
    CHECK(v.accepted);
    auto back = certificate_from_json(to_json(*d.certificate), 2);
    CHECK(verify_np_certificate(a, b, back).accepted);
    CHECK(serialize(to_json(back)) == serialize(to_json(*d.certificate)));

    SUBCASE("truncated walk")
    {
        auto cert = *d.certificate;
        for (auto& qc : cert.quintuples)
            if (!qc.steps.empty()) {
                qc.steps.pop_back();
                break;
            }
        auto r = verify_np_certificate(a, b, cert);
        CHECK_FALSE(r.accepted);
        CHECK(r.defect.find("path endpoint") != std::string::npos);
    }
    SUBCASE("missing quintuple")
    {
        auto cert = *d.certificate;
        cert.quintuples.pop_back();
        auto r = verify_np_certificate(a, b, cert);
        CHECK_FALSE(r.accepted);
        CHECK(r.defect.find("covers") != std::string::npos);
    }
    SUBCASE("table that is not a polymorphism")
    {
        auto cert = *d.certificate;
        for (auto& qc : cert.quintuples)
            if (!qc.steps.empty()) {
                qc.steps.front().phi = OperationTable(2, 3, {1, 0, 0, 0, 0, 0, 0, 0});
                break;
            }
        CHECK_FALSE(verify_np_certificate(a, b, cert).accepted);
    }
}

TEST_CASE("chains")
{
    const auto ord = fixture::ord2();
    auto min = OperationTable::from_function(2, 2, [](auto x) { return std::min(x[0], x[1]); });
    CHECK(is_absorption_term(ord, Subset({0}), min));
    CHECK_FALSE(is_absorption_term(ord, Subset({1}), min));
    auto chain = chain_from_absorption_term(min);
    CHECK(chain.terms.size() == 4);
    auto check = is_jonsson_chain(ord, Subset({0}), chain);
    CHECK_MESSAGE(check.holds, check.violation);

    auto broken = chain;
    broken.terms.erase(broken.terms.begin() + 1);
    auto bad = is_jonsson_chain(ord, Subset({0}), broken);
    CHECK_FALSE(bad.holds);
    CHECK(bad.violation.find("link") != std::string::npos);

    CHECK(oracle_chain_search(ord, Subset({0})));
    CHECK_FALSE(oracle_chain_search(fixture::aff2(), Subset({0})));
    CHECK_THROWS_AS(oracle_chain_search(fixture::ord3(), Subset({0})), CapExceeded);
    auto found = oracle_chain_search(fixture::neq2(), Subset({0}));
    REQUIRE(found);
    CHECK(is_jonsson_chain(fixture::neq2(), Subset({0}), *found).holds);
    auto round = chain_from_json(to_json(*found), 2);
    CHECK(round.terms == found->terms);
}

TEST_CASE("arity bounds")
{
    CHECK(bounds(2, 1).kappa == 5);
    CHECK(bounds(2, 2).kappa == 257);
    CHECK(bounds(3, 2).kappa == 131073);
    CHECK(bounds(2, 4).lower_bound == BigInt(4));
    CHECK(bounds(3, 3).lower_bound == BigInt(4));
    CHECK_FALSE(bounds(2, 3).lower_bound);
    CHECK_FALSE(bounds(3, 2).lower_bound);
    CHECK_THROWS_AS(bounds(1, 2), InputError);
    CHECK_THROWS_AS(bounds(2, 0), InputError);
    CHECK_THROWS_AS(bounds(5, 30), CapExceeded);
    CHECK(to_json(bounds(2, 2))["kappa"] == "257");
    CHECK(within_comb_bound(5, 2, 3));
    CHECK_FALSE(within_comb_bound(6, 2, 3));
    CHECK(within_comb_bound(1, 3, 0));
}
