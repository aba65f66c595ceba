#include "kgcoref/kernels.hpp"

#include <omp.h>

namespace kgcoref::kernels::parallel {

void score_matrix(std::span<const Embedding> mentions,
                  std::span<const Embedding> entities, std::span<double> out) {
  const auto rows = static_cast<std::ptrdiff_t>(mentions.size());
  const std::size_t cols = entities.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < rows; ++j) {
    double* row = out.data() + static_cast<std::size_t>(j) * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      row[i] = cosine(mentions[j], entities[i]);
    }
  }
}

double message_pass(const KnowledgeGraph& graph, std::span<const Embedding> current,
                    std::span<const Embedding> initial, const StepParams& params,
                    std::span<Embedding> next) {
  const auto n = static_cast<std::ptrdiff_t>(graph.size());
  double delta = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : delta)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double d = update_entity(graph, static_cast<std::size_t>(i), current,
                                   initial, params, next[i]);
    delta = std::max(delta, d);
  }
  return delta;
}

}  // namespace kgcoref::kernels::parallel
