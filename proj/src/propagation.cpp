#include "kgcoref/propagation.hpp"

#include <cmath>

#include "kgcoref/error.hpp"

namespace kgcoref {

void PropagationConfig::validate(std::size_t dimension) const {
  if (!(damping >= 0.0 && damping <= 1.0)) {
    throw InputError("damping lambda must lie in [0, 1]");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("epsilon must be a positive finite number");
  }
  if (max_iterations < 1) throw InputError("max iterations must be at least 1");
  if (!weights.empty() && weights.size() != dimension * dimension) {
    throw InputError("weight matrix must be " + std::to_string(dimension) + "x" +
                     std::to_string(dimension));
  }
  if (!bias.empty() && bias.size() != dimension) {
    throw InputError("bias must have dimension " + std::to_string(dimension));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw InputError("weight matrix has a non-finite entry");
  }
  for (double b : bias) {
    if (!std::isfinite(b)) throw InputError("bias has a non-finite entry");
  }
}

void load_weights(const VectorTable& table, std::size_t dimension,
                  PropagationConfig& config) {
  std::vector<double> weights;
  std::size_t rows = 0;
  for (std::size_t r = 0; r < dimension; ++r) {
    auto it = table.find("W:" + std::to_string(r));
    if (it == table.end()) continue;
    ++rows;
    weights.resize(dimension * dimension, 0.0);
    std::copy(it->second.begin(), it->second.end(), weights.begin() + r * dimension);
  }
  if (rows != 0 && rows != dimension) {
    throw InputError("weight file defines " + std::to_string(rows) + " of " +
                     std::to_string(dimension) + " rows of W");
  }
  if (rows == dimension) config.weights = std::move(weights);
  if (auto it = table.find("b"); it != table.end()) config.bias = it->second;
}

EntityState EntityState::start(std::vector<Embedding> initial_embeddings) {
  EntityState s;
  s.initial = initial_embeddings;
  s.embeddings = std::move(initial_embeddings);
  return s;
}

EntityState message_pass_step(const KnowledgeGraph& graph, const EntityState& state,
                              const PropagationConfig& config) {
  if (state.embeddings.size() != graph.size() ||
      state.initial.size() != graph.size()) {
    throw InputError("entity state does not cover every graph entity");
  }
  const std::size_t d = state.embeddings.empty() ? 0 : state.embeddings[0].size();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (state.embeddings[i].size() != d || state.initial[i].size() != d) {
      throw InputError("entity '" + graph.entities()[i].id +
                       "': embedding dimension mismatch");
    }
  }
  config.validate(d);

  const kernels::StepParams params{config.weights, config.bias, config.damping,
                                   config.rule};
  EntityState next;
  next.initial = state.initial;
  next.embeddings.resize(graph.size());
  next.last_delta =
      config.serial
          ? kernels::serial::message_pass(graph, state.embeddings, state.initial,
                                          params, next.embeddings)
          : kernels::parallel::message_pass(graph, state.embeddings, state.initial,
                                            params, next.embeddings);
  next.iteration = state.iteration + 1;
  next.converged = next.last_delta < config.epsilon;
  return next;
}

EntityState propagate(const KnowledgeGraph& graph, EntityState state,
                      const PropagationConfig& config, const StepObserver& observer) {
  state.converged = false;
  for (std::size_t step = 0; step < config.max_iterations; ++step) {
    state = message_pass_step(graph, state, config);
    if (observer) observer(state);
    if (state.converged) break;
  }
  return state;
}

RelinkResult refine_and_relink(
    const KnowledgeGraph& graph, std::span<const Mention> mentions,
    const EmbeddingProvider& provider, const PropagationConfig& config,
    const LinkSettings& link,
    const std::function<void(std::size_t, const EntityState&)>& observer) {
  config.validate(provider.dimension());
  if (!(link.gain > 0.0)) throw InputError("calibration gain must be positive");

  const auto mention_embeddings = provider.embed_mentions(mentions);
  RelinkResult result;
  result.state = EntityState::start(provider.embed_entities(graph));

  auto relink = [&] {
    result.scores = build_score_matrix(mentions, mention_embeddings, graph,
                                       result.state.embeddings);
    result.decisions = filter_links(link_all(result.scores, link.gain), link.theta,
                                    link.threshold_on);
  };

  relink();
  for (std::size_t round = 0; round < config.outer_rounds; ++round) {
    StepObserver step_observer;
    if (observer) {
      step_observer = [&observer, round](const EntityState& s) { observer(round, s); };
    }
    result.state = propagate(graph, std::move(result.state), config, step_observer);
    relink();
  }
  return result;
}

}  // namespace kgcoref
