#include "kgcoref/linking.hpp"

#include <cmath>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"
#include "kgcoref/kernels.hpp"

namespace kgcoref {

double similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("similarity: dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  return kernels::cosine(a, b);
}

double link_likelihood(double raw_score, double gain) {
  return 1.0 / (1.0 + std::exp(-gain * raw_score));
}

ScoreMatrix build_score_matrix(std::span<const Mention> mentions,
                               const KnowledgeGraph& graph,
                               std::span<const Embedding> entity_embeddings,
                               const EmbeddingProvider& provider) {
  const auto mention_embeddings = provider.embed_mentions(mentions);
  return build_score_matrix(mentions, mention_embeddings, graph, entity_embeddings);
}

ScoreMatrix build_score_matrix(std::span<const Mention> mentions,
                               std::span<const Embedding> mention_embeddings,
                               const KnowledgeGraph& graph,
                               std::span<const Embedding> entity_embeddings) {
  if (entity_embeddings.size() != graph.size()) {
    throw InputError("missing entity embeddings: have " +
                     std::to_string(entity_embeddings.size()) + " for " +
                     std::to_string(graph.size()) + " entities");
  }
  if (mention_embeddings.size() != mentions.size()) {
    throw InputError("mention embedding count does not match mention count");
  }
  std::size_t d = entity_embeddings.empty() ? 0 : entity_embeddings[0].size();
  if (d == 0 && !mention_embeddings.empty()) d = mention_embeddings[0].size();
  for (std::size_t i = 0; i < entity_embeddings.size(); ++i) {
    if (entity_embeddings[i].size() != d) {
      throw InputError("entity '" + graph.entities()[i].id +
                       "': embedding dimension mismatch");
    }
  }
  for (const auto& m : mention_embeddings) {
    if (m.size() != d) throw InputError("mention embedding dimension mismatch");
  }

  ScoreMatrix matrix;
  matrix.mentions.assign(mentions.begin(), mentions.end());
  matrix.entities.reserve(graph.size());
  for (const auto& e : graph.entities()) matrix.entities.push_back(e.id);
  matrix.scores.assign(mentions.size() * graph.size(), 0.0);
  kernels::parallel::score_matrix(mention_embeddings, entity_embeddings,
                                  matrix.scores);
  return matrix;
}

std::pair<EntityId, double> link_mention(std::span<const double> row,
                                         std::span<const EntityId> entity_index) {
  if (row.empty() || entity_index.empty()) {
    throw InputError("cannot link a mention against an empty entity set");
  }
  if (row.size() != entity_index.size()) {
    throw InputError("score row and entity index differ in length");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best] ||
        (row[i] == row[best] && entity_index[i] < entity_index[best])) {
      best = i;
    }
  }
  return {entity_index[best], row[best]};
}

std::vector<LinkDecision> link_all(const ScoreMatrix& matrix, double gain) {
  std::vector<LinkDecision> out;
  out.reserve(matrix.rows());
  for (std::size_t j = 0; j < matrix.rows(); ++j) {
    auto [entity, raw] = link_mention(matrix.row(j), matrix.entities);
    LinkDecision d;
    d.mention = matrix.mentions[j];
    d.entity = std::move(entity);
    d.raw_score = raw;
    d.likelihood = link_likelihood(raw, gain);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<LinkDecision> filter_links(std::vector<LinkDecision> decisions,
                                       double theta, ThresholdOn on) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InputError("threshold must lie in [0, 1]");
  }
  for (auto& d : decisions) {
    const double value = on == ThresholdOn::kLikelihood ? d.likelihood : d.raw_score;
    d.accepted = value > theta;
  }
  return decisions;
}

std::string links_to_jsonl(std::span<const LinkDecision> decisions) {
  std::string out;
  for (const auto& d : decisions) {
    out += "{\"doc_id\":" + quote(d.mention.doc_id) +
           ",\"start\":" + std::to_string(d.mention.start) +
           ",\"end\":" + std::to_string(d.mention.end) +
           ",\"entity\":" + quote(d.entity) +
           ",\"raw_score\":" + fixed(d.raw_score) +
           ",\"likelihood\":" + fixed(d.likelihood) +
           ",\"accepted\":" + (d.accepted ? "true" : "false") + "}\n";
  }
  return out;
}

}  // namespace kgcoref
