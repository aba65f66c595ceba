#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/decision.hpp"
#include "kgcoref/graph.hpp"
#include "kgcoref/linking.hpp"

namespace kgcoref {

// (doc_id, start, end)
using MentionKey = std::tuple<std::string, std::size_t, std::size_t>;

inline MentionKey key_of(const Mention& m) { return {m.doc_id, m.start, m.end}; }

struct GoldStandard {
  std::map<MentionKey, EntityId> assignments;
};

// Collects gold_entity annotations. Every gold id must name a graph entity.
GoldStandard gold_from_corpus(const Corpus& corpus, const KnowledgeGraph& graph);

// Confusion counts with precision, recall and F1. Any 0/0 is taken as 0.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static Confusion from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

// Accepted decision matching gold = tp; any other accepted decision = fp;
// gold assignment without a matching accepted decision = fn.
Confusion linking_metrics(std::span<const LinkDecision> decisions,
                          const GoldStandard& gold);

// Over unordered pairs of gold-annotated mentions: predicted coreferent iff
// in the same cluster, gold coreferent iff same gold entity. Mentions
// outside every cluster count as singletons.
Confusion pair_metrics(std::span<const CoreferenceCluster> clusters,
                       const GoldStandard& gold);

struct EvalReport {
  std::string label;  // row name in markdown tables
  Confusion linking;
  Confusion pairs;
  // Echo of the pipeline configuration, key -> value in config-file syntax.
  std::map<std::string, std::string> config;
};

enum class ReportFormat { kJson, kMarkdown };

// Sorted keys, six-decimal floats.
std::string report_to_json(const EvalReport& report);
// Table with one row per report.
std::string reports_to_markdown(std::span<const EvalReport> reports);

void emit_report(const EvalReport& report, const std::filesystem::path& path,
                 ReportFormat format);

}  // namespace kgcoref
