#pragma once

#include <absorb/model.hpp>

namespace fixture {

using absorb::Relation;
using absorb::RelationalStructure;

inline RelationalStructure ord2()
{
    return RelationalStructure(2, {{"leq", Relation(2, {{0, 0}, {0, 1}, {1, 1}})},
                                   {"s0", Relation(1, {{0}})},
                                   {"s1", Relation(1, {{1}})}});
}

inline RelationalStructure aff2()
{
    return RelationalStructure(2, {{"aff", Relation(3, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}})},
                                   {"s0", Relation(1, {{0}})},
                                   {"s1", Relation(1, {{1}})}});
}

inline RelationalStructure triv1()
{
    return RelationalStructure(1, {{"r", Relation(2, {{0, 0}})}});
}

/// Disequality with constants: polymorphisms are the self-dual idempotent
/// operations, so {0} absorbs through the majority but through no binary term.
inline RelationalStructure neq2()
{
    return RelationalStructure(2, {{"neq", Relation(2, {{0, 1}, {1, 0}})},
                                   {"s0", Relation(1, {{0}})},
                                   {"s1", Relation(1, {{1}})}});
}

/// A three-element chain with constants.
inline RelationalStructure ord3()
{
    return RelationalStructure(3, {{"leq", Relation(2, {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}})},
                                   {"s0", Relation(1, {{0}})},
                                   {"s1", Relation(1, {{1}})},
                                   {"s2", Relation(1, {{2}})}});
}

} // namespace fixture
