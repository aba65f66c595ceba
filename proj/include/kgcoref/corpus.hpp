#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgcoref/graph.hpp"
#include "kgcoref/text.hpp"

namespace kgcoref {

inline constexpr std::size_t kDefaultContextWindow = 8;

struct Mention {
  std::string doc_id;
  std::size_t start = 0;  // byte offset
  std::size_t end = 0;    // exclusive
  std::string surface;    // text[start, end)
  std::optional<EntityId> gold_entity;
  std::vector<std::string> context;  // filled by attach_contexts()
};

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<ByteSpan> token_spans;
  // True when the input line carried a "mentions" array; extraction leaves
  // such documents alone.
  bool annotated = false;
};

// Documents are kept in ascending doc_id order and mentions are grouped by
// document in that order, then sorted by (start, end).
struct Corpus {
  std::vector<Document> documents;
  std::vector<Mention> mentions;

  const Document& document(std::string_view doc_id) const;
};

Corpus parse_corpus(std::string_view jsonl, std::string_view origin);
Corpus load_corpus(const std::filesystem::path& path);

// Annotated documents are written with their mentions (and gold ids);
// others without a "mentions" field.
std::string corpus_to_jsonl(const Corpus& corpus);

// Gazetteer matching of entity names and aliases, case-folded, aligned to
// token boundaries. Overlaps go to the longest match, then the leftmost.
// Documents with pre-annotated mentions pass through unchanged.
Corpus extract_mentions(const Corpus& corpus, const KnowledgeGraph& graph);

// Up to k tokens on each side of the mention, in document order, skipping
// any token that overlaps the mention.
std::vector<std::string> context_window(const Document& doc,
                                        const Mention& mention, std::size_t k);

// Fills Mention::context for every mention.
void attach_contexts(Corpus& corpus, std::size_t k);

}  // namespace kgcoref
