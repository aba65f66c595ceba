#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/decision.hpp"
#include "kgcoref/embedding.hpp"
#include "kgcoref/eval.hpp"
#include "kgcoref/graph.hpp"
#include "kgcoref/kernels.hpp"
#include "kgcoref/linking.hpp"
#include "kgcoref/propagation.hpp"
#include "kgcoref/synthetic.hpp"

namespace kgcoref {

// Every tunable of a run. Keys accepted by set() are the long CLI flag
// names without dashes, e.g. "max-iter" or "propagation-rounds".
struct PipelineConfig {
  std::string graph;
  std::string corpus;
  std::string vectors;
  std::string weights;
  std::string out = "out";

  std::size_t dimension = kDefaultDimension;
  std::uint64_t seed = 0;
  std::size_t window = kDefaultContextWindow;
  double alpha = kDefaultNameMix;
  double context_weight = kDefaultContextWeight;
  std::optional<ProviderKind> provider;  // unset: file iff vectors given
  bool fallback = true;

  double gain = kDefaultGain;
  double theta = kDefaultThreshold;
  ThresholdOn threshold_on = ThresholdOn::kLikelihood;

  double lambda = 0.5;
  double epsilon = 1e-6;
  std::size_t max_iter = 50;
  std::size_t rounds = 1;
  kernels::UpdateRule rule = kernels::UpdateRule::kAnchored;

  std::size_t threads = 0;  // 0: runtime default
  bool dump_states = false;

  void set(const std::string& key, const std::string& value);
  // Range checks for every field; throws InputError.
  void validate() const;
  ProviderKind resolved_provider() const;
  // Everything that can change results, in config-file syntax. Thread
  // count and output directory are left out.
  std::map<std::string, std::string> echo() const;

  ProviderSettings provider_settings() const;
  PropagationConfig propagation() const;
  LinkSettings link_settings() const;
};

// Flat "key = value" lines, '#' starts a comment. A file starting with '{'
// is read as JSON: either a report (its "config" object) or a flat object.
void apply_config_file(const std::filesystem::path& path, PipelineConfig& config);

struct LinkRun {
  KnowledgeGraph graph;
  Corpus corpus;
  EmbeddingProvider provider = EmbeddingProvider::hashed({});
  RelinkResult result;
  ClusterSet clusters;
};

// Load graph and corpus, extract mentions where not annotated, embed,
// propagate and re-link, then cluster. Writes nothing.
LinkRun run_link(const PipelineConfig& config,
                 const std::function<void(std::size_t, const EntityState&)>&
                     observer = {});

// Invariant checks on a finished run; throws InvariantError.
void check_run(const LinkRun& run);

EvalReport evaluate(const LinkRun& run, const PipelineConfig& config,
                    std::span<const LinkDecision> decisions, std::string label);

// Subcommands. Each writes into config.out and removes what it wrote when
// it fails.
void cmd_link(const PipelineConfig& config);
EvalReport cmd_eval(const PipelineConfig& config);
void cmd_synth(const SyntheticParams& params, const std::filesystem::path& out);
std::vector<EvalReport> cmd_sweep(const PipelineConfig& config,
                                  std::span<const double> thetas);
std::string cmd_inspect(const std::string& graph_path, const std::string& corpus_path);

std::string gold_to_jsonl(const GoldStandard& gold);

}  // namespace kgcoref
