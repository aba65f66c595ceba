#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "kgcoref/corpus.hpp"
#include "kgcoref/graph.hpp"

namespace testing {

struct EntitySpec {
  std::string id;
  std::string name;
  std::vector<std::string> aliases = {};
};

inline kgcoref::KnowledgeGraph make_graph(
    std::initializer_list<EntitySpec> entities,
    std::initializer_list<std::pair<std::string, std::string>> edges = {}) {
  std::vector<kgcoref::Entity> es;
  for (const auto& e : entities) es.push_back({e.id, e.name, e.aliases, {}});
  std::vector<kgcoref::Relation> rs;
  for (const auto& [a, b] : edges) rs.push_back({a, b, "rel"});
  return kgcoref::KnowledgeGraph::build(std::move(es), std::move(rs));
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("kgcoref_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline kgcoref::Mention mention(std::string doc, std::size_t start, std::size_t end,
                                std::string surface,
                                std::vector<std::string> context = {}) {
  kgcoref::Mention m;
  m.doc_id = std::move(doc);
  m.start = start;
  m.end = end;
  m.surface = std::move(surface);
  m.context = std::move(context);
  return m;
}

}  // namespace testing
