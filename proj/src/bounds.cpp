#include <absorb/bounds.hpp>

#include <cmath>

namespace absorb {

namespace {

// Keeps the decimal rendering of the bound tractable.
constexpr double max_result_bits = 400'000.0;

unsigned long checked_exponent(int base, int exponent)
{
    unsigned long result = 1;
    for (int i = 0; i < exponent; ++i) {
        result *= static_cast<unsigned long>(base);
        if (result > 100'000'000UL)
            throw CapExceeded("bound exponent too large to evaluate exactly");
    }
    return result;
}

BigInt power(int base, unsigned long exponent)
{
    if (std::log2(std::max(base, 2)) * static_cast<double>(exponent) > max_result_bits)
        throw CapExceeded("bound too large to evaluate exactly");
    return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

} // namespace

BoundReport bounds(int theta, int domain_size)
{
    if (theta < 2)
        throw InputError("theta must be at least 2");
    if (domain_size < 1)
        throw InputError("domain size must be at least 1");
    BoundReport report;
    report.theta = theta;
    report.domain_size = domain_size;
    report.kappa = power(2 * theta - 2, checked_exponent(3, domain_size)) / 2 + 1;
    if (theta >= 3 && domain_size >= 3)
        report.lower_bound = power(theta - 1, checked_exponent(2, domain_size - 2));
    else if (theta == 2 && domain_size >= 4)
        report.lower_bound = power(2, checked_exponent(2, domain_size - 3));
    return report;
}

bool within_comb_bound(int arity, int theta, int lambda)
{
    if (lambda < 0)
        return false;
    return BigInt(arity) <= power(2 * theta - 2, static_cast<unsigned long>(lambda)) / 2 + 1;
}

Json to_json(const BoundReport& report)
{
    Json j{{"theta", report.theta}, {"size", report.domain_size}, {"kappa", report.kappa.str()}};
    if (report.lower_bound)
        j["lower_bound"] = report.lower_bound->str();
    return j;
}

} // namespace absorb
