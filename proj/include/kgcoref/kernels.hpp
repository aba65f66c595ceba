#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "kgcoref/embedding.hpp"
#include "kgcoref/graph.hpp"

// Hot loops of the pipeline. Each kernel exists twice: a plain serial
// reference and an OpenMP version. Both call the same per-element routines
// below, so their outputs agree bit for bit regardless of thread count.
namespace kgcoref::kernels {

// Cosine similarity of equal-length vectors, clamped to [-1, 1]. Zero
// vectors score 0 against everything.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

enum class UpdateRule {
  // normalize(lambda * h_i(0) + (1 - lambda) * msg_i): damping pulls toward
  // the initial vector, so connected entities keep distinct identities.
  kAnchored,
  // normalize(lambda * h_i(t) + (1 - lambda) * msg_i).
  kDamped,
  // sum_j W h_j(t) + b with no averaging, damping or normalization.
  kLiteral,
};

// Parameters for one synchronous message passing step.
struct StepParams {
  std::span<const double> weights;  // d*d row-major; empty means identity
  std::span<const double> bias;     // d; empty means zero
  double damping = 0.5;
  UpdateRule rule = UpdateRule::kAnchored;
};

// Computes entity i's next vector from the t-snapshot `current` and returns
// the largest absolute coordinate change. Neighbors are summed in ascending
// index order.
double update_entity(const KnowledgeGraph& graph, std::size_t i,
                     std::span<const Embedding> current,
                     std::span<const Embedding> initial, const StepParams& params,
                     Embedding& next);

namespace serial {

// out[j * entities.size() + i] = cosine(mentions[j], entities[i])
void score_matrix(std::span<const Embedding> mentions,
                  std::span<const Embedding> entities, std::span<double> out);

// Fills next[i] for every entity; returns max_i ||next_i - current_i||_inf.
double message_pass(const KnowledgeGraph& graph, std::span<const Embedding> current,
                    std::span<const Embedding> initial, const StepParams& params,
                    std::span<Embedding> next);

}  // namespace serial

namespace parallel {

void score_matrix(std::span<const Embedding> mentions,
                  std::span<const Embedding> entities, std::span<double> out);

double message_pass(const KnowledgeGraph& graph, std::span<const Embedding> current,
                    std::span<const Embedding> initial, const StepParams& params,
                    std::span<Embedding> next);

}  // namespace parallel

}  // namespace kgcoref::kernels
