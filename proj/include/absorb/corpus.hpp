#pragma once

#include <absorb/model.hpp>

#include <cstddef>
#include <vector>

namespace absorb {

struct CorpusStructure {
    /// One relation "r" plus the singleton relations.
    RelationalStructure structure;
    /// Nonempty proper subuniverses, in lexicographic order of their elements.
    std::vector<Subset> subuniverses;
};

struct Corpus {
    int domain_size = 2;
    int max_arity = 1;
    /// Number of relations enumerated before structures with the same
    /// relation set were merged.
    std::size_t relation_choices = 0;
    std::vector<CorpusStructure> structures;

    std::size_t instance_count() const;
};

/// Every structure on {0..size-1} with one relation of arity 1..max_arity,
/// expanded by singletons and deduplicated by relation set.
Corpus generate_corpus(int domain_size, int max_arity, const Limits& limits = {});

} // namespace absorb
