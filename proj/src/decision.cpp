#include "kgcoref/decision.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "kgcoref/io.hpp"

namespace kgcoref {

CorefDecision coref_decide(std::span<const double> mention_embedding,
                           std::span<const double> entity_embedding, double theta,
                           double gain) {
  const double likelihood =
      link_likelihood(similarity(mention_embedding, entity_embedding), gain);
  return {likelihood, likelihood > theta};
}

namespace {

bool by_position(const Mention& a, const Mention& b) {
  return std::tie(a.doc_id, a.start, a.end) < std::tie(b.doc_id, b.start, b.end);
}

}  // namespace

ClusterSet build_clusters(std::span<const LinkDecision> decisions) {
  std::map<EntityId, std::vector<Mention>> groups;
  ClusterSet set;
  for (const auto& d : decisions) {
    if (d.accepted) {
      groups[d.entity].push_back(d.mention);
    } else {
      set.unresolved.push_back(d.mention);
    }
  }
  for (auto& [entity, mentions] : groups) {
    std::sort(mentions.begin(), mentions.end(), by_position);
    CoreferenceCluster c;
    c.entity = entity;
    c.cross_document = std::any_of(mentions.begin(), mentions.end(),
                                   [&](const Mention& m) {
                                     return m.doc_id != mentions.front().doc_id;
                                   });
    c.mentions = std::move(mentions);
    set.clusters.push_back(std::move(c));
  }
  std::sort(set.unresolved.begin(), set.unresolved.end(), by_position);
  return set;
}

namespace {

void append_mention(std::string& out, const Mention& m) {
  out += "{\"doc_id\":" + quote(m.doc_id) + ",\"start\":" + std::to_string(m.start) +
         ",\"end\":" + std::to_string(m.end) + ",\"surface\":" + quote(m.surface) +
         "}";
}

}  // namespace

std::string clusters_to_json(const ClusterSet& set) {
  std::string out = "{\"clusters\":[";
  for (std::size_t c = 0; c < set.clusters.size(); ++c) {
    const auto& cluster = set.clusters[c];
    if (c > 0) out += ",";
    out += "\n{\"entity\":" + quote(cluster.entity) + ",\"cross_document\":" +
           (cluster.cross_document ? "true" : "false") + ",\"mentions\":[";
    for (std::size_t i = 0; i < cluster.mentions.size(); ++i) {
      if (i > 0) out += ",";
      append_mention(out, cluster.mentions[i]);
    }
    out += "]}";
  }
  out += "],\n\"unresolved\":[";
  for (std::size_t i = 0; i < set.unresolved.size(); ++i) {
    if (i > 0) out += ",";
    out += "\n";
    append_mention(out, set.unresolved[i]);
  }
  out += "]}\n";
  return out;
}

}  // namespace kgcoref
