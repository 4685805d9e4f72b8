#pragma once

#include <absorb/codec.hpp>
#include <absorb/engine.hpp>
#include <absorb/model.hpp>

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace absorb {

/// (a, c, d, b1, b2) with b1, b2 in B; ordered lexicographically in that order.
struct Quintuple {
    Element a = 0;
    Element c = 0;
    Element d = 0;
    Element b1 = 0;
    Element b2 = 0;

    friend auto operator<=>(const Quintuple&, const Quintuple&) = default;
};

/// phi applied coordinatewise to (b1,a,a), (b2,c,c), (d,a,c) yields (b,u,v).
struct CertificateStep {
    Element b = 0;
    Element u = 0;
    Element v = 0;
    OperationTable phi;
};

struct QuintupleCertificate {
    Quintuple q;
    std::vector<CertificateStep> steps;
};

struct Certificate {
    std::vector<QuintupleCertificate> quintuples;
};

struct Decision {
    bool holds = false;
    std::string property; // "jonsson-absorbing" or "absorbing"
    std::optional<Quintuple> failing;
    std::optional<Certificate> certificate;
};

struct JonssonDigraph {
    Relation generated; // <(b1,a,a), (b2,c,c), (d,a,c)> as a ternary relation
    Digraph edges;      // (u,v) such that (b,u,v) is generated for some b in B
};

JonssonDigraph jonsson_digraph(const RelationalStructure& structure, const Subset& b, const Quintuple& q,
                               const Limits& limits = {});

/// Local test: B is Jonsson absorbing iff every quintuple's digraph has a path a -> c.
Decision decide_jonsson(const RelationalStructure& structure, const Subset& b, const Limits& limits = {});

/// Same verdict as decide_jonsson; absorption and Jonsson absorption coincide for
/// finitely related algebras.
Decision decide_absorption(const RelationalStructure& structure, const Subset& b, const Limits& limits = {});

bool is_absorption_term(const RelationalStructure& structure, const Subset& b, const OperationTable& term);

struct ChainWitness {
    std::vector<OperationTable> terms;
};

struct ChainCheck {
    bool holds = false;
    std::string violation;
};

ChainCheck is_jonsson_chain(const RelationalStructure& structure, const Subset& b, const ChainWitness& chain);

/// first projection, (x,y,z) -> t(z,..,z,y,x,..,x) for each position of y, third projection.
ChainWitness chain_from_absorption_term(const OperationTable& term);

/// Exhaustive chain search over all ternary tables. Domain size at most 2.
std::optional<ChainWitness> oracle_chain_search(const RelationalStructure& structure, const Subset& b);

/// Chain search for inner <=_J outer, both subpowers of the same arity:
/// every term maps (inner, outer, inner) into inner coordinatewise.
std::optional<ChainWitness> oracle_chain_search(const RelationalStructure& structure, const Relation& outer,
                                                const Relation& inner);

struct Verification {
    bool accepted = false;
    std::string defect;
};

Verification verify_np_certificate(const RelationalStructure& structure, const Subset& b, const Certificate& cert);

Json to_json(const Quintuple& q);
Json to_json(const Certificate& cert);
Json to_json(const Decision& decision);
Json to_json(const ChainWitness& chain);
Certificate certificate_from_json(const Json& json, int domain_size);
ChainWitness chain_from_json(const Json& json, int domain_size);

} // namespace absorb
