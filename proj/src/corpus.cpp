#include <absorb/corpus.hpp>

#include <absorb/engine.hpp>

#include <algorithm>
#include <set>

namespace absorb {

std::size_t Corpus::instance_count() const
{
    std::size_t count = 0;
    for (const auto& s : structures)
        count += s.subuniverses.size();
    return count;
}

Corpus generate_corpus(int domain_size, int max_arity, const Limits& limits)
{
    if (domain_size < 1 || domain_size > 6)
        throw InputError("corpus domain size must be between 1 and 6");
    if (max_arity < 1)
        throw InputError("corpus arity must be positive");
    Corpus corpus;
    corpus.domain_size = domain_size;
    corpus.max_arity = max_arity;
    std::set<std::set<std::pair<int, std::vector<Tuple>>>> seen;
    for (int arity = 1; arity <= max_arity; ++arity) {
        const auto all = Relation::full(domain_size, arity).tuples();
        if (all.size() > 20)
            throw CapExceeded("corpus would enumerate more than 2^20 relations of arity " + std::to_string(arity));
        const std::size_t choices = std::size_t{1} << all.size();
        for (std::size_t mask = 0; mask < choices; ++mask) {
            ++corpus.relation_choices;
            std::vector<Tuple> tuples;
            for (std::size_t i = 0; i < all.size(); ++i)
                if (mask >> i & 1)
                    tuples.push_back(all[i]);
            RelationalStructure base(domain_size, {{"r", Relation(arity, std::move(tuples))}});
            RelationalStructure expanded = with_singletons(base).structure;
            std::set<std::pair<int, std::vector<Tuple>>> key;
            for (const auto& [name, rel] : expanded.relations())
                key.emplace(rel.arity(), rel.tuples());
            if (!seen.insert(key).second)
                continue;
            CorpusStructure entry{expanded, {}};
            for (std::size_t bits = 1; bits + 1 < (std::size_t{1} << domain_size); ++bits) {
                std::vector<Element> elements;
                for (int e = 0; e < domain_size; ++e)
                    if (bits >> e & 1)
                        elements.push_back(e);
                Subset b(std::move(elements));
                if (closure_unary(expanded, b, limits).is_subuniverse)
                    entry.subuniverses.push_back(std::move(b));
            }
            std::sort(entry.subuniverses.begin(), entry.subuniverses.end(),
                      [](const Subset& x, const Subset& y) { return x.elements() < y.elements(); });
            corpus.structures.push_back(std::move(entry));
        }
    }
    return corpus;
}

} // namespace absorb
