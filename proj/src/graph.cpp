#include "kgcoref/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"
#include "kgcoref/text.hpp"

namespace kgcoref {

using nlohmann::json;

KnowledgeGraph KnowledgeGraph::build(std::vector<Entity> entities,
                                     std::vector<Relation> relations) {
  KnowledgeGraph g;
  std::sort(entities.begin(), entities.end(),
            [](const Entity& a, const Entity& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].id.empty()) throw InputError("entity with empty id");
    if (i > 0 && entities[i].id == entities[i - 1].id) {
      throw InputError("duplicate entity id '" + entities[i].id + "'");
    }
  }
  g.entities_ = std::move(entities);

  const std::size_t n = g.entities_.size();
  std::vector<std::vector<std::size_t>> lists(n);
  for (const auto& r : relations) {
    auto s = g.find(r.source);
    auto t = g.find(r.target);
    if (!s || !t) {
      throw InputError("relation " + r.source + " -[" + r.label + "]-> " +
                       r.target + ": dangling endpoint '" +
                       (!s ? r.source : r.target) + "'");
    }
    if (*s == *t) continue;
    lists[*s].push_back(*t);
    lists[*t].push_back(*s);
  }
  g.relations_ = std::move(relations);

  g.offsets_.assign(n + 1, 0);
  g.adjacency_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = lists[i];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    g.adjacency_.insert(g.adjacency_.end(), l.begin(), l.end());
    g.offsets_[i + 1] = g.adjacency_.size();
  }
  return g;
}

std::optional<std::size_t> KnowledgeGraph::find(std::string_view id) const {
  auto it = std::lower_bound(
      entities_.begin(), entities_.end(), id,
      [](const Entity& e, std::string_view key) { return e.id < key; });
  if (it == entities_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - entities_.begin());
}

std::size_t KnowledgeGraph::index_of(std::string_view id) const {
  auto i = find(id);
  if (!i) throw InputError("unknown entity id '" + std::string(id) + "'");
  return *i;
}

std::vector<EntityId> KnowledgeGraph::neighbors(std::string_view id) const {
  std::vector<EntityId> out;
  for (std::size_t j : neighbor_indices(index_of(id))) {
    out.push_back(entities_[j].id);
  }
  return out;
}

std::vector<Violation> validate(const KnowledgeGraph& graph) {
  std::vector<Violation> out;
  const auto& entities = graph.entities();
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const auto& e = entities[i];
    const std::string subject = "entity " + e.id;
    if (e.id.empty()) out.push_back({subject, "empty id"});
    if (i > 0 && entities[i - 1].id == e.id) {
      out.push_back({subject, "duplicate id"});
    }
    if (e.name.empty()) out.push_back({subject, "empty name"});
    std::set<std::string> folded;
    for (const auto& alias : e.aliases) {
      if (!folded.insert(casefold(alias)).second) {
        out.push_back({subject, "alias '" + alias +
                                    "' duplicated under case folding"});
      }
    }
  }

  std::set<Relation> seen;
  for (const auto& r : graph.relations()) {
    const std::string subject =
        "relation " + r.source + " -[" + r.label + "]-> " + r.target;
    if (!graph.find(r.source) || !graph.find(r.target)) {
      out.push_back({subject, "dangling endpoint"});
    }
    if (!seen.insert(r).second) out.push_back({subject, "duplicate triple"});
  }

  for (std::size_t i = 0; i < graph.size(); ++i) {
    auto nb = graph.neighbor_indices(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (k > 0 && nb[k - 1] >= nb[k]) {
        out.push_back({"entity " + entities[i].id,
                       "adjacency not sorted or has duplicates"});
      }
      auto back = graph.neighbor_indices(nb[k]);
      if (!std::binary_search(back.begin(), back.end(), i)) {
        out.push_back({"entity " + entities[i].id, "adjacency not symmetric"});
      }
    }
  }
  return out;
}

namespace {

std::string field_string(const json& value, const std::string& where) {
  if (!value.is_string()) throw InputError(where + ": expected string");
  return value.get<std::string>();
}

void reject_unknown(const json& object, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InputError(where + ": unknown field '" + key + "'");
  }
}

Entity parse_entity(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected object");
  reject_unknown(j, {"id", "name", "aliases", "attributes"}, where);
  Entity e;
  if (!j.contains("id")) throw InputError(where + ": missing field 'id'");
  if (!j.contains("name")) throw InputError(where + ": missing field 'name'");
  e.id = field_string(j["id"], where + ".id");
  e.name = field_string(j["name"], where + ".name");
  if (e.id.empty()) throw InputError(where + ".id: empty entity id");
  if (e.name.empty()) throw InputError(where + ".name: empty entity name");
  if (j.contains("aliases")) {
    const auto& a = j["aliases"];
    if (!a.is_array()) throw InputError(where + ".aliases: expected array");
    for (std::size_t k = 0; k < a.size(); ++k) {
      e.aliases.push_back(
          field_string(a[k], where + ".aliases[" + std::to_string(k) + "]"));
    }
  }
  if (j.contains("attributes")) {
    const auto& a = j["attributes"];
    if (!a.is_object()) throw InputError(where + ".attributes: expected object");
    for (const auto& [key, value] : a.items()) {
      e.attributes[key] = field_string(value, where + ".attributes." + key);
    }
  }
  return e;
}

Relation parse_relation(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected object");
  reject_unknown(j, {"source", "target", "label"}, where);
  for (const char* key : {"source", "target", "label"}) {
    if (!j.contains(key)) {
      throw InputError(where + ": missing field '" + key + "'");
    }
  }
  return {field_string(j["source"], where + ".source"),
          field_string(j["target"], where + ".target"),
          field_string(j["label"], where + ".label")};
}

}  // namespace

KnowledgeGraph parse_graph(std::string_view json_text, std::string_view origin) {
  const std::string prefix(origin);
  json doc = parse_json(json_text, prefix);
  if (!doc.is_object()) throw InputError(prefix + ": top level must be an object");
  reject_unknown(doc, {"entities", "relations"}, prefix);

  std::vector<Entity> entities;
  std::vector<Relation> relations;
  if (doc.contains("entities")) {
    const auto& arr = doc["entities"];
    if (!arr.is_array()) throw InputError(prefix + ": 'entities' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      entities.push_back(
          parse_entity(arr[i], prefix + ": entities[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("relations")) {
    const auto& arr = doc["relations"];
    if (!arr.is_array()) throw InputError(prefix + ": 'relations' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      relations.push_back(parse_relation(
          arr[i], prefix + ": relations[" + std::to_string(i) + "]"));
    }
  }
  try {
    return KnowledgeGraph::build(std::move(entities), std::move(relations));
  } catch (const InputError& e) {
    throw InputError(prefix + ": " + e.what());
  }
}

KnowledgeGraph load_graph(const std::filesystem::path& path) {
  KnowledgeGraph g = parse_graph(read_file(path), path.string());
  auto violations = validate(g);
  if (!violations.empty()) {
    std::string msg = path.string() + ": invalid graph";
    for (const auto& v : violations) msg += "\n  " + v.to_string();
    throw InputError(msg);
  }
  return g;
}

std::string graph_to_json(const KnowledgeGraph& graph) {
  nlohmann::ordered_json doc;
  auto& entities = doc["entities"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.entities()) {
    nlohmann::ordered_json je;
    je["id"] = e.id;
    je["name"] = e.name;
    je["aliases"] = e.aliases;
    je["attributes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : e.attributes) je["attributes"][k] = v;
    entities.push_back(std::move(je));
  }
  auto& relations = doc["relations"] = nlohmann::ordered_json::array();
  for (const auto& r : graph.relations()) {
    relations.push_back(
        {{"source", r.source}, {"target", r.target}, {"label", r.label}});
  }
  return doc.dump(1) + "\n";
}

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path) {
  write_file(path, graph_to_json(graph));
}

}  // namespace kgcoref
