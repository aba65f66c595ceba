#include "kgcoref/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"
#include "kgcoref/text.hpp"

namespace kgcoref {

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

Embedding normalized(Embedding v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return v;
  for (double& x : v) x /= norm;
  return v;
}

std::uint64_t feature_hash(std::string_view feature, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : feature) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = h ^ seed;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

EmbeddingProvider::EmbeddingProvider(ProviderKind kind, ProviderSettings settings,
                                     std::shared_ptr<const VectorTable> table)
    : kind_(kind), settings_(settings), table_(std::move(table)) {
  if (settings_.dimension == 0) throw InputError("embedding dimension must be positive");
  if (!std::isfinite(settings_.context_weight) || settings_.context_weight < 0) {
    throw InputError("context weight must be finite and non-negative");
  }
  if (!(settings_.name_mix >= 0.0 && settings_.name_mix <= 1.0)) {
    throw InputError("name mix alpha must lie in [0, 1]");
  }
}

EmbeddingProvider EmbeddingProvider::hashed(ProviderSettings settings) {
  return EmbeddingProvider(ProviderKind::kHashed, settings, nullptr);
}

EmbeddingProvider EmbeddingProvider::from_table(VectorTable table,
                                                ProviderSettings settings) {
  for (const auto& [key, v] : table) {
    if (v.size() != settings.dimension) {
      throw InputError("vector '" + key + "' has dimension " +
                       std::to_string(v.size()) + ", expected " +
                       std::to_string(settings.dimension));
    }
  }
  return EmbeddingProvider(ProviderKind::kFile, settings,
                           std::make_shared<const VectorTable>(std::move(table)));
}

void EmbeddingProvider::add_features(std::string_view text, double weight,
                                     std::span<double> out) const {
  const std::size_t d = settings_.dimension;
  for (const auto& gram : char_trigrams(casefold(text))) {
    const std::uint64_t h = feature_hash(gram, settings_.seed);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    out[h % d] += sign * weight;
  }
}

Embedding EmbeddingProvider::embed_text(std::string_view text) const {
  Embedding v(settings_.dimension, 0.0);
  add_features(text, 1.0, v);
  return normalized(std::move(v));
}

Embedding EmbeddingProvider::hashed_mention(const Mention& mention) const {
  Embedding surface(settings_.dimension, 0.0);
  add_features(mention.surface, 1.0, surface);
  surface = normalized(std::move(surface));
  Embedding context(settings_.dimension, 0.0);
  for (const auto& token : mention.context) add_features(token, 1.0, context);
  context = normalized(std::move(context));
  for (std::size_t k = 0; k < surface.size(); ++k) {
    surface[k] += settings_.context_weight * context[k];
  }
  return normalized(std::move(surface));
}

const Embedding* EmbeddingProvider::lookup(std::string_view key) const {
  if (!table_) return nullptr;
  auto it = table_->find(key);
  return it == table_->end() ? nullptr : &it->second;
}

Embedding EmbeddingProvider::embed_mention(const Mention& mention) const {
  if (kind_ == ProviderKind::kFile) {
    const std::string key = mention_key(mention);
    if (const Embedding* v = lookup(key)) return normalized(*v);
    if (!settings_.fallback) throw InputError("no vector for key '" + key + "'");
  }
  return hashed_mention(mention);
}

Embedding EmbeddingProvider::name_vector(const Entity& entity) const {
  Embedding mean = embed_text(entity.name);
  for (const auto& alias : entity.aliases) {
    const Embedding a = embed_text(alias);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += a[k];
  }
  const double count = 1.0 + static_cast<double>(entity.aliases.size());
  for (double& x : mean) x /= count;
  return mean;
}

Embedding EmbeddingProvider::hashed_entity(std::size_t index,
                                           const KnowledgeGraph& graph,
                                           std::span<const Embedding> names) const {
  const auto nb = graph.neighbor_indices(index);
  const Embedding& own = names[index];
  if (nb.empty()) return normalized(own);

  const std::size_t d = settings_.dimension;
  Embedding neighbor_mean(d, 0.0);
  for (std::size_t j : nb) {
    for (std::size_t k = 0; k < d; ++k) neighbor_mean[k] += names[j][k];
  }
  const double inv = 1.0 / static_cast<double>(nb.size());
  const double a = settings_.name_mix;
  Embedding h(d);
  for (std::size_t k = 0; k < d; ++k) {
    h[k] = a * own[k] + (1.0 - a) * (neighbor_mean[k] * inv);
  }
  return normalized(std::move(h));
}

Embedding EmbeddingProvider::embed_entity(const Entity& entity,
                                          const KnowledgeGraph& graph) const {
  const std::size_t index = graph.index_of(entity.id);
  if (kind_ == ProviderKind::kFile) {
    const std::string key = entity_key(entity.id);
    if (const Embedding* v = lookup(key)) return normalized(*v);
    if (!settings_.fallback) throw InputError("no vector for key '" + key + "'");
  }
  // Only the entity and its neighbors need name vectors here.
  std::vector<Embedding> names(graph.size());
  names[index] = name_vector(graph.entities()[index]);
  for (std::size_t j : graph.neighbor_indices(index)) {
    names[j] = name_vector(graph.entities()[j]);
  }
  return hashed_entity(index, graph, names);
}

std::vector<Embedding> EmbeddingProvider::embed_entities(
    const KnowledgeGraph& graph) const {
  const auto n = static_cast<std::ptrdiff_t>(graph.size());
  std::vector<Embedding> names(graph.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    names[i] = name_vector(graph.entities()[i]);
  }

  std::vector<Embedding> out(graph.size());
  bool missing = false;
  std::string missing_key;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (kind_ == ProviderKind::kFile) {
      const std::string key = entity_key(graph.entities()[i].id);
      if (const Embedding* v = lookup(key)) {
        out[i] = normalized(*v);
        continue;
      }
      if (!settings_.fallback) {
#pragma omp critical(kgcoref_missing_key)
        if (!missing || key < missing_key) {
          missing = true;
          missing_key = key;
        }
        continue;
      }
    }
    out[i] = hashed_entity(static_cast<std::size_t>(i), graph, names);
  }
  if (missing) throw InputError("no vector for key '" + missing_key + "'");
  return out;
}

std::vector<Embedding> EmbeddingProvider::embed_mentions(
    std::span<const Mention> mentions) const {
  std::vector<Embedding> out(mentions.size());
  const auto n = static_cast<std::ptrdiff_t>(mentions.size());
  bool missing = false;
  std::string missing_key;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    try {
      out[j] = embed_mention(mentions[j]);
    } catch (const InputError&) {
      const std::string key = mention_key(mentions[j]);
#pragma omp critical(kgcoref_missing_key)
      if (!missing || key < missing_key) {
        missing = true;
        missing_key = key;
      }
    }
  }
  if (missing) throw InputError("no vector for key '" + missing_key + "'");
  return out;
}

std::string mention_key(const Mention& mention) {
  return "mention:" + mention.doc_id + ":" + std::to_string(mention.start) + ":" +
         std::to_string(mention.end);
}

std::string entity_key(std::string_view id) { return "entity:" + std::string(id); }

VectorTable parse_vectors(std::string_view text, std::size_t dimension,
                          std::string_view origin) {
  VectorTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (!header) {
      unsigned long long d = 0;
      char tail = 0;
      if (std::sscanf(line.c_str(), "dim %llu %c", &d, &tail) != 1) {
        throw InputError(where + ": expected header 'dim <d>'");
      }
      if (d != dimension) {
        throw InputError(where + ": file dimension " + std::to_string(d) +
                         " does not match configured dimension " +
                         std::to_string(dimension));
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw InputError(where + ": expected '<key>\\t<values>'");
    }
    std::string key = line.substr(0, tab);
    Embedding v;
    const char* p = line.c_str() + tab + 1;
    while (true) {
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == '\0') break;
      char* next = nullptr;
      const double x = std::strtod(p, &next);
      if (next == p) throw InputError(where + ": malformed number");
      if (!std::isfinite(x)) {
        throw InputError(where + ": non-finite value in vector '" + key + "'");
      }
      v.push_back(x);
      p = next;
    }
    if (v.size() != dimension) {
      throw InputError(where + ": vector '" + key + "' has " +
                       std::to_string(v.size()) + " values, expected " +
                       std::to_string(dimension));
    }
    if (!table.emplace(std::move(key), std::move(v)).second) {
      throw InputError(where + ": duplicate key '" + line.substr(0, tab) + "'");
    }
  }
  if (!header) throw InputError(std::string(origin) + ": empty vector file");
  return table;
}

VectorTable load_vectors(const std::filesystem::path& path, std::size_t dimension) {
  return parse_vectors(read_file(path), dimension, path.string());
}

std::string vectors_to_text(const VectorTable& table, std::size_t dimension) {
  std::string out = "dim " + std::to_string(dimension) + "\n";
  char buf[40];
  for (const auto& [key, v] : table) {
    out += key;
    out += '\t';
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", v[k]);
      if (k > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace kgcoref
