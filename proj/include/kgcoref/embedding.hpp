#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/graph.hpp"

namespace kgcoref {

// Dense real vector. Emitted embeddings are unit length or all zeros.
using Embedding = std::vector<double>;

// Keyed vectors as read from a vector file, stored as written.
using VectorTable = std::map<std::string, Embedding, std::less<>>;

inline constexpr std::size_t kDefaultDimension = 64;
inline constexpr double kDefaultContextWeight = 0.5;
inline constexpr double kDefaultNameMix = 0.7;

double l2_norm(std::span<const double> v);
// Scales to unit length; the zero vector stays zero.
Embedding normalized(Embedding v);

// Feature hash: FNV-1a 64 over the feature's bytes, xor the seed, then the
// SplitMix64 finalizer:
//   z = fnv1a64(bytes) ^ seed
//   z += 0x9e3779b97f4a7c15
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   z ^= z >> 31
// The feature lands on coordinate z % d with sign -1 if bit 63 is set.
std::uint64_t feature_hash(std::string_view feature, std::uint64_t seed);

enum class ProviderKind { kHashed, kFile };

struct ProviderSettings {
  std::size_t dimension = kDefaultDimension;
  std::uint64_t seed = 0;
  double context_weight = kDefaultContextWeight;
  // Weight of an entity's own names against its neighbors' names.
  double name_mix = kDefaultNameMix;
  // File kind only: hash keys missing from the table instead of failing.
  bool fallback = true;
};

// Computes mention and entity vectors in one shared space.
//
// Hashed kind. Each character trigram of a case-folded string adds a signed
// one-hot feature. A mention's vector is normalize(s + w * c), where s is
// the normalized surface vector, c the normalized sum over its context
// tokens and w = context_weight. Surface and context share one feature
// space, so context words line up with the names of graph neighbors.
//
// An entity's vector starts from the mean of the normalized hashed vectors
// of its name and aliases, mixed with the mean of its neighbors' name
// vectors: normalize(a * own + (1 - a) * mean(neighbors)), a = name_mix.
//
// File kind looks up "mention:<doc_id>:<start>:<end>" and "entity:<id>" in a
// vector table and normalizes on use.
class EmbeddingProvider {
 public:
  static EmbeddingProvider hashed(ProviderSettings settings);
  static EmbeddingProvider from_table(VectorTable table, ProviderSettings settings);

  ProviderKind kind() const { return kind_; }
  const ProviderSettings& settings() const { return settings_; }
  std::size_t dimension() const { return settings_.dimension; }

  // Hashed vector of a bare string (surface features only), normalized.
  Embedding embed_text(std::string_view text) const;
  Embedding embed_mention(const Mention& mention) const;
  Embedding embed_entity(const Entity& entity, const KnowledgeGraph& graph) const;
  // Initial vectors for every entity, in graph index order.
  std::vector<Embedding> embed_entities(const KnowledgeGraph& graph) const;
  std::vector<Embedding> embed_mentions(std::span<const Mention> mentions) const;

 private:
  EmbeddingProvider(ProviderKind kind, ProviderSettings settings,
                    std::shared_ptr<const VectorTable> table);

  void add_features(std::string_view text, double weight,
                    std::span<double> out) const;
  Embedding hashed_mention(const Mention& mention) const;
  Embedding name_vector(const Entity& entity) const;
  Embedding hashed_entity(std::size_t index, const KnowledgeGraph& graph,
                          std::span<const Embedding> names) const;
  const Embedding* lookup(std::string_view key) const;

  ProviderKind kind_;
  ProviderSettings settings_;
  std::shared_ptr<const VectorTable> table_;
};

std::string mention_key(const Mention& mention);
std::string entity_key(std::string_view id);

// Vector file: first line "dim <d>", then "<key>\t<v1> ... <vd>" per line.
VectorTable parse_vectors(std::string_view text, std::size_t dimension,
                          std::string_view origin);
VectorTable load_vectors(const std::filesystem::path& path, std::size_t dimension);
// Round-trippable (%.17g) serialization, keys in table order.
std::string vectors_to_text(const VectorTable& table, std::size_t dimension);

}  // namespace kgcoref
