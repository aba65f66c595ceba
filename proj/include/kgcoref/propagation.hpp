#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kgcoref/embedding.hpp"
#include "kgcoref/graph.hpp"
#include "kgcoref/kernels.hpp"
#include "kgcoref/linking.hpp"

namespace kgcoref {

struct PropagationConfig {
  std::vector<double> weights;  // d*d row-major; empty means identity
  std::vector<double> bias;     // d; empty means zero
  double damping = 0.5;         // lambda
  double epsilon = 1e-6;
  std::size_t max_iterations = 50;
  std::size_t outer_rounds = 1;
  kernels::UpdateRule rule = kernels::UpdateRule::kAnchored;
  bool serial = false;  // run the serial reference kernel

  // Throws InputError for out-of-range values or shapes that do not fit d.
  void validate(std::size_t dimension) const;
};

// Reads "W:<row>" (rows 0..d-1, all or none) and "b" from a vector table.
void load_weights(const VectorTable& table, std::size_t dimension,
                  PropagationConfig& config);

// Entity vectors h(t) indexed like graph.entities(), plus the h(0) they
// started from.
struct EntityState {
  std::vector<Embedding> embeddings;
  std::vector<Embedding> initial;
  std::size_t iteration = 0;
  bool converged = false;
  double last_delta = 0.0;

  static EntityState start(std::vector<Embedding> initial_embeddings);
};

// One synchronous update of every entity from the t-snapshot.
EntityState message_pass_step(const KnowledgeGraph& graph, const EntityState& state,
                              const PropagationConfig& config);

using StepObserver = std::function<void(const EntityState&)>;

// Steps until last_delta < epsilon or max_iterations steps were taken.
// `observer` sees the state after every step.
EntityState propagate(const KnowledgeGraph& graph, EntityState state,
                      const PropagationConfig& config,
                      const StepObserver& observer = {});

struct LinkSettings {
  double theta = kDefaultThreshold;
  double gain = kDefaultGain;
  ThresholdOn threshold_on = ThresholdOn::kLikelihood;
};

struct RelinkResult {
  EntityState state;
  std::vector<LinkDecision> decisions;
  ScoreMatrix scores;  // from the final round
};

// Links every mention, then for each outer round propagates over the whole
// graph and re-links against the refined entity vectors. Zero rounds is
// plain linking.
RelinkResult refine_and_relink(const KnowledgeGraph& graph,
                               std::span<const Mention> mentions,
                               const EmbeddingProvider& provider,
                               const PropagationConfig& config,
                               const LinkSettings& link,
                               const std::function<void(std::size_t round,
                                                        const EntityState&)>&
                                   observer = {});

}  // namespace kgcoref
