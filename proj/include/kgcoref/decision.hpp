#pragma once

#include <span>
#include <string>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/embedding.hpp"
#include "kgcoref/linking.hpp"

namespace kgcoref {

struct CorefDecision {
  double likelihood = 0.5;
  bool coreferent = false;
};

// Calibrated cosine between a mention vector and an entity vector, gated
// by likelihood > theta. Same scorer as the linking step.
CorefDecision coref_decide(std::span<const double> mention_embedding,
                           std::span<const double> entity_embedding, double theta,
                           double gain);

struct CoreferenceCluster {
  EntityId entity;
  std::vector<Mention> mentions;  // sorted by (doc_id, start, end)
  bool cross_document = false;    // at least two distinct doc_ids
};

struct ClusterSet {
  std::vector<CoreferenceCluster> clusters;  // ascending entity id
  std::vector<Mention> unresolved;           // rejected links
};

// Groups accepted decisions by linked entity.
ClusterSet build_clusters(std::span<const LinkDecision> decisions);

std::string clusters_to_json(const ClusterSet& set);

}  // namespace kgcoref
