#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/embedding.hpp"
#include "kgcoref/graph.hpp"

namespace kgcoref {

inline constexpr double kDefaultGain = 5.0;
inline constexpr double kDefaultThreshold = 0.5;

// Cosine similarity; 0 when either side is the zero vector. Throws
// InputError on a dimension mismatch.
double similarity(std::span<const double> a, std::span<const double> b);

// sigmoid(gain * raw_score).
double link_likelihood(double raw_score, double gain);

// Raw mention-by-entity cosine scores. Rows follow corpus mention order,
// columns ascending entity id.
struct ScoreMatrix {
  std::vector<Mention> mentions;
  std::vector<EntityId> entities;
  std::vector<double> scores;  // row-major

  std::size_t rows() const { return mentions.size(); }
  std::size_t cols() const { return entities.size(); }
  double at(std::size_t mention, std::size_t entity) const {
    return scores[mention * cols() + entity];
  }
  std::span<const double> row(std::size_t mention) const {
    return {scores.data() + mention * cols(), cols()};
  }
};

// `entity_embeddings` is indexed like graph.entities().
ScoreMatrix build_score_matrix(std::span<const Mention> mentions,
                               const KnowledgeGraph& graph,
                               std::span<const Embedding> entity_embeddings,
                               const EmbeddingProvider& provider);
// Same, with mention vectors already computed.
ScoreMatrix build_score_matrix(std::span<const Mention> mentions,
                               std::span<const Embedding> mention_embeddings,
                               const KnowledgeGraph& graph,
                               std::span<const Embedding> entity_embeddings);

struct LinkDecision {
  Mention mention;
  EntityId entity;
  double raw_score = 0.0;
  double likelihood = 0.5;
  bool accepted = false;
};

// Best-scoring entity for one row; ties go to the smallest id.
std::pair<EntityId, double> link_mention(std::span<const double> row,
                                         std::span<const EntityId> entity_index);

// One decision per row, likelihood from the given gain. Nothing is accepted
// until filter_links() runs.
std::vector<LinkDecision> link_all(const ScoreMatrix& matrix, double gain);

// Which quantity is compared against the threshold.
enum class ThresholdOn { kLikelihood, kRaw };

// accepted = value > theta (strict). Rejected decisions are kept.
std::vector<LinkDecision> filter_links(std::vector<LinkDecision> decisions,
                                       double theta,
                                       ThresholdOn on = ThresholdOn::kLikelihood);

// One JSON object per line, floats with six decimals.
std::string links_to_jsonl(std::span<const LinkDecision> decisions);

}  // namespace kgcoref
