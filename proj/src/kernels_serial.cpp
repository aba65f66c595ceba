#include "kgcoref/kernels.hpp"

namespace kgcoref::kernels {

double update_entity(const KnowledgeGraph& graph, std::size_t i,
                     std::span<const Embedding> current,
                     std::span<const Embedding> initial, const StepParams& params,
                     Embedding& next) {
  const Embedding& h = current[i];
  const std::size_t d = h.size();
  const auto nb = graph.neighbor_indices(i);

  Embedding sum(d, 0.0);
  for (std::size_t j : nb) {
    const Embedding& hj = current[j];
    for (std::size_t k = 0; k < d; ++k) sum[k] += hj[k];
  }
  if (params.rule != UpdateRule::kLiteral && !nb.empty()) {
    const double inv = 1.0 / static_cast<double>(nb.size());
    for (double& x : sum) x *= inv;
  }

  Embedding msg(d, 0.0);
  if (!nb.empty() || params.rule == UpdateRule::kLiteral) {
    if (params.weights.empty()) {
      msg = sum;
    } else {
      for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        const double* row = params.weights.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) acc += row[c] * sum[c];
        msg[r] = acc;
      }
    }
    if (!params.bias.empty()) {
      for (std::size_t k = 0; k < d; ++k) msg[k] += params.bias[k];
    }
  }

  next.resize(d);
  if (nb.empty() && params.rule != UpdateRule::kLiteral) {
    // No messages: normalize(lambda * base) is base itself for any lambda > 0,
    // and lambda = 0 would otherwise erase the entity. A base that is already
    // unit length is copied so the node stays bit-identical.
    const Embedding& base =
        params.rule == UpdateRule::kAnchored ? initial[i] : current[i];
    const double norm = l2_norm(base);
    next = std::abs(norm - 1.0) <= 1e-12 ? base : normalized(base);
  } else if (params.rule == UpdateRule::kLiteral) {
    next = msg;
  } else {
    const Embedding& base =
        params.rule == UpdateRule::kAnchored ? initial[i] : current[i];
    const double lambda = params.damping;
    for (std::size_t k = 0; k < d; ++k) {
      next[k] = lambda * base[k] + (1.0 - lambda) * msg[k];
    }
    next = normalized(std::move(next));
  }

  double delta = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    delta = std::max(delta, std::abs(next[k] - h[k]));
  }
  return delta;
}

namespace serial {

void score_matrix(std::span<const Embedding> mentions,
                  std::span<const Embedding> entities, std::span<double> out) {
  const std::size_t cols = entities.size();
  for (std::size_t j = 0; j < mentions.size(); ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      out[j * cols + i] = cosine(mentions[j], entities[i]);
    }
  }
}

double message_pass(const KnowledgeGraph& graph, std::span<const Embedding> current,
                    std::span<const Embedding> initial, const StepParams& params,
                    std::span<Embedding> next) {
  double delta = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    delta = std::max(delta, update_entity(graph, i, current, initial, params, next[i]));
  }
  return delta;
}

}  // namespace serial

}  // namespace kgcoref::kernels
