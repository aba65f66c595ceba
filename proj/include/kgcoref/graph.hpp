#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgcoref {

// Opaque, byte-compared entity identifier.
using EntityId = std::string;

struct Entity {
  EntityId id;
  std::string name;
  std::vector<std::string> aliases;
  std::map<std::string, std::string> attributes;
};

// Directed, labelled edge. Direction is kept for output; neighbor queries
// see the symmetric closure.
struct Relation {
  EntityId source;
  EntityId target;
  std::string label;

  friend auto operator<=>(const Relation&, const Relation&) = default;
};

struct Violation {
  std::string subject;  // "entity <id>" or "relation <src> -[label]-> <dst>"
  std::string rule;

  std::string to_string() const { return subject + ": " + rule; }
};

// Immutable after build(). Entities are stored in ascending id order, so an
// entity's index doubles as its rank in every deterministic ordering.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Throws InputError for empty or duplicate ids and for relations whose
  // endpoints are not entities. Softer rules are left to validate().
  static KnowledgeGraph build(std::vector<Entity> entities,
                              std::vector<Relation> relations);

  std::size_t size() const { return entities_.size(); }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Relation>& relations() const { return relations_; }

  std::optional<std::size_t> find(std::string_view id) const;
  // Like find() but throws InputError for unknown ids.
  std::size_t index_of(std::string_view id) const;
  const Entity& entity(std::string_view id) const {
    return entities_[index_of(id)];
  }

  // Sorted, duplicate-free neighbor ids. Self-relations are not included.
  std::vector<EntityId> neighbors(std::string_view id) const;
  // Same as neighbors() but as entity indices (ascending).
  std::span<const std::size_t> neighbor_indices(std::size_t index) const {
    return {adjacency_.data() + offsets_[index],
            offsets_[index + 1] - offsets_[index]};
  }

 private:
  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  // CSR adjacency over entity indices.
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> adjacency_;
};

// Returns every broken invariant; empty means the graph is well formed.
std::vector<Violation> validate(const KnowledgeGraph& graph);

// Parses the graph JSON format. `origin` names the source in messages.
KnowledgeGraph parse_graph(std::string_view json_text, std::string_view origin);
// Reads, parses and validates. Any violation is an InputError.
KnowledgeGraph load_graph(const std::filesystem::path& path);

std::string graph_to_json(const KnowledgeGraph& graph);
void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path);

}  // namespace kgcoref
