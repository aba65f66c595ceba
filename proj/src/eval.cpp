#include "kgcoref/eval.hpp"

#include <set>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"

namespace kgcoref {

GoldStandard gold_from_corpus(const Corpus& corpus, const KnowledgeGraph& graph) {
  GoldStandard gold;
  for (const auto& m : corpus.mentions) {
    if (!m.gold_entity) continue;
    if (!graph.find(*m.gold_entity)) {
      throw InputError("gold entity '" + *m.gold_entity + "' for mention " +
                       m.doc_id + ":" + std::to_string(m.start) + ":" +
                       std::to_string(m.end) + " is not in the graph");
    }
    gold.assignments.emplace(key_of(m), *m.gold_entity);
  }
  return gold;
}

Confusion Confusion::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Confusion c;
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  c.precision = ratio(tp, tp + fp);
  c.recall = ratio(tp, tp + fn);
  const double sum = c.precision + c.recall;
  c.f1 = sum == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / sum;
  return c;
}

Confusion linking_metrics(std::span<const LinkDecision> decisions,
                          const GoldStandard& gold) {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::set<MentionKey> matched;
  for (const auto& d : decisions) {
    if (!d.accepted) continue;
    const MentionKey key = key_of(d.mention);
    auto it = gold.assignments.find(key);
    if (it != gold.assignments.end() && it->second == d.entity &&
        matched.insert(key).second) {
      ++tp;
    } else {
      ++fp;
    }
  }
  return Confusion::from_counts(tp, fp, gold.assignments.size() - matched.size());
}

namespace {

std::size_t pairs_of(std::size_t n) { return n * (n - 1) / 2; }

}  // namespace

Confusion pair_metrics(std::span<const CoreferenceCluster> clusters,
                       const GoldStandard& gold) {
  // Contingency table between predicted clusters and gold entities. Gold
  // mentions outside every cluster are singletons and add no predicted pair.
  std::map<std::pair<std::size_t, EntityId>, std::size_t> cells;
  std::map<std::size_t, std::size_t> cluster_sizes;
  std::map<EntityId, std::size_t> gold_sizes;
  for (const auto& [key, entity] : gold.assignments) ++gold_sizes[entity];

  std::set<MentionKey> seen;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const auto& m : clusters[c].mentions) {
      const MentionKey key = key_of(m);
      auto it = gold.assignments.find(key);
      if (it == gold.assignments.end() || !seen.insert(key).second) continue;
      ++cells[{c, it->second}];
      ++cluster_sizes[c];
    }
  }

  std::size_t tp = 0;
  for (const auto& [_, n] : cells) tp += pairs_of(n);
  std::size_t predicted = 0;
  for (const auto& [_, n] : cluster_sizes) predicted += pairs_of(n);
  std::size_t actual = 0;
  for (const auto& [_, n] : gold_sizes) actual += pairs_of(n);
  return Confusion::from_counts(tp, predicted - tp, actual - tp);
}

namespace {

std::string confusion_json(const Confusion& c) {
  return "{\"f1\":" + fixed(c.f1) + ",\"fn\":" + std::to_string(c.fn) +
         ",\"fp\":" + std::to_string(c.fp) + ",\"precision\":" + fixed(c.precision) +
         ",\"recall\":" + fixed(c.recall) + ",\"tp\":" + std::to_string(c.tp) + "}";
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  std::string out = "{\n\"config\":{";
  bool first = true;
  for (const auto& [key, value] : report.config) {
    if (!first) out += ",";
    first = false;
    out += "\n  " + quote(key) + ":" + quote(value);
  }
  out += "\n},\n\"linking\":" + confusion_json(report.linking) +
         ",\n\"notes\":\"precision, recall and f1 take 0/0 as 0\"" +
         ",\n\"pairs\":" + confusion_json(report.pairs) + "\n}\n";
  return out;
}

std::string reports_to_markdown(std::span<const EvalReport> reports) {
  std::string out =
      "| Model/Config | Linking Precision | Linking Recall | Linking F1 |\n"
      "|---|---|---|---|\n";
  for (const auto& r : reports) {
    out += "| " + r.label + " | " + fixed(r.linking.precision) + " | " +
           fixed(r.linking.recall) + " | " + fixed(r.linking.f1) + " |\n";
  }
  out += "\nPrecision, recall and F1 take 0/0 as 0.\n";
  return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  if (format == ReportFormat::kJson) {
    write_file(path, report_to_json(report));
  } else {
    write_file(path, reports_to_markdown(std::span(&report, 1)));
  }
}

}  // namespace kgcoref
