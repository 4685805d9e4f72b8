#pragma once

#include <absorb/codec.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>

namespace absorb {

using BigInt = boost::multiprecision::cpp_int;

/// Arity bounds for absorption terms over a structure with relation arity
/// bound theta and domain size `domain_size`.
struct BoundReport {
    int theta = 2;
    int domain_size = 1;
    /// (2*theta - 2)^(3^|A|) / 2 + 1
    BigInt kappa;
    /// (theta-1)^(2^(|A|-2)) when theta >= 3 and |A| >= 3;
    /// 2^(2^(|A|-3)) when theta == 2 and |A| >= 4.
    std::optional<BigInt> lower_bound;
};

BoundReport bounds(int theta, int domain_size);

/// True iff arity <= (2*theta - 2)^lambda / 2 + 1.
bool within_comb_bound(int arity, int theta, int lambda);

Json to_json(const BoundReport& report);

} // namespace absorb
