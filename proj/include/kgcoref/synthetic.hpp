#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/eval.hpp"
#include "kgcoref/graph.hpp"

namespace kgcoref {

struct SyntheticParams {
  std::uint64_t seed = 1;
  std::size_t n_entities = 50;
  std::size_t n_docs = 20;
  std::size_t mentions_per_doc = 5;
  // Probability that an entity pair (e0,e1), (e2,e3), ... shares an alias.
  double ambiguity_rate = 0.0;
  // Probability of a relation between any two entities.
  double relation_density = 0.2;
  // Neighbor names written on each side of a mention.
  std::size_t context_per_side = 8;

  void validate() const;
};

struct SyntheticData {
  KnowledgeGraph graph;
  Corpus corpus;  // annotated, with gold ids
  GoldStandard gold;
  std::vector<std::pair<EntityId, EntityId>> decoy_pairs;
};

// Builds a graph and a gold-annotated corpus, fully determined by the seed.
//
// Entities get made-up single-word names and one alias each; any two words
// share at most one character trigram. A decoy pair shares its alias; every
// other alias is unique. Relations are
// drawn per unordered pair (never between decoy partners) and every entity
// gets at least one neighbor. Each mention is written as a segment of
// context_per_side neighbor names, the surface (name or an alias), another
// context_per_side neighbor names, then ".". With the default context
// window the mention sees only its own gold entity's neighbors, so a decoy
// alias resolves only through graph context.
SyntheticData generate_synthetic(const SyntheticParams& params);

}  // namespace kgcoref
