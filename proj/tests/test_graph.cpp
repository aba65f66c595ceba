#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "kgcoref/error.hpp"
#include "kgcoref/graph.hpp"
#include "kgcoref/io.hpp"
#include "kgcoref/text.hpp"

using namespace kgcoref;
using testing::make_graph;
using Ids = std::vector<EntityId>;

TEST_CASE("tokenize splits whitespace and isolates punctuation") {
  const std::string text = "Paris, the  city.";
  const auto spans = tokenize(text);
  std::vector<std::string> tokens;
  for (auto s : spans) tokens.push_back(text.substr(s.start, s.end - s.start));
  CHECK(tokens == std::vector<std::string>{"Paris", ",", "the", "city", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize(" \t\n").empty());
}

TEST_CASE("tokenize handles multibyte text") {
  const std::string text = "Zürich ist schön。";
  const auto spans = tokenize(text);
  REQUIRE(spans.size() == 4);
  CHECK(text.substr(spans[0].start, spans[0].end - spans[0].start) == "Zürich");
  CHECK(text.substr(spans[3].start) == "。");
}

TEST_CASE("casefold and trigrams") {
  CHECK(casefold("New YORK") == "new york");
  CHECK(casefold("ÄÖÜ") == "äöü");
  CHECK(casefold("Straße") == "straße");  // simple folding keeps ß
  CHECK(char_trigrams("ab") == std::vector<std::string>{"^ab", "ab$"});
  CHECK(char_trigrams("a") == std::vector<std::string>{"^a$"});
  CHECK(char_trigrams("").empty());
  CHECK(char_trigrams("éé") == std::vector<std::string>{"^éé", "éé$"});
  CHECK(char_trigrams("aaaa").size() == 4);
}

TEST_CASE("single edge gives symmetric neighbors") {
  const auto g = make_graph({{"A", "Alpha"}, {"B", "Beta"}}, {{"A", "B"}});
  CHECK(g.neighbors("A") == Ids{"B"});
  CHECK(g.neighbors("B") == Ids{"A"});
}

TEST_CASE("graph without relations has empty adjacency") {
  const auto g = make_graph({{"x", "X"}, {"y", "Y"}, {"z", "Z"}});
  for (const auto& e : g.entities()) CHECK(g.neighbors(e.id).empty());
}

TEST_CASE("triangle, star and isolated node") {
  const auto tri = make_graph({{"A", "a"}, {"B", "b"}, {"C", "c"}},
                              {{"A", "B"}, {"B", "C"}, {"C", "A"}});
  CHECK(tri.neighbors("A") == Ids{"B", "C"});

  const auto star = make_graph({{"h", "hub"}, {"l1", "x"}, {"l2", "y"}, {"l3", "z"}, {"o", "o"}},
                               {{"l3", "h"}, {"h", "l1"}, {"l2", "h"}});
  CHECK(star.neighbors("h") == Ids{"l1", "l2", "l3"});
  CHECK(star.neighbors("l2") == Ids{"h"});
  CHECK(star.neighbors("o").empty());
}

TEST_CASE("self loops and repeated edges collapse") {
  const auto g = make_graph({{"A", "a"}, {"B", "b"}}, {{"A", "A"}, {"A", "B"}, {"B", "A"}});
  CHECK(g.neighbors("A") == Ids{"B"});
  CHECK(g.neighbors("B") == Ids{"A"});
}

TEST_CASE("build rejects bad ids and dangling relations") {
  CHECK_THROWS_AS(make_graph({{"A", "a"}, {"A", "b"}}), InputError);
  CHECK_THROWS_AS(make_graph({{"", "a"}}), InputError);
  CHECK_THROWS_AS(make_graph({{"A", "a"}}, {{"A", "Z"}}), InputError);
  const auto g = make_graph({{"A", "a"}});
  CHECK_THROWS_AS(g.neighbors("nope"), InputError);
}

TEST_CASE("validate reports soft violations") {
  CHECK(validate(make_graph({{"A", "a"}, {"B", "b"}}, {{"A", "B"}})).empty());

  auto dup = KnowledgeGraph::build({{"A", "a", {}, {}}, {"B", "b", {}, {}}},
                                   {{"A", "B", "r"}, {"A", "B", "r"}, {"A", "B", "s"}});
  auto v = validate(dup);
  REQUIRE(v.size() == 1);
  CHECK(v[0].subject.find("A -[r]-> B") != std::string::npos);

  auto alias = make_graph({{"A", "Alpha", {"Big A", "big a"}}});
  v = validate(alias);
  REQUIRE(v.size() == 1);
  CHECK(v[0].subject == "entity A");

  auto empty_name = make_graph({{"A", ""}});
  CHECK(validate(empty_name).size() == 1);
}

TEST_CASE("parse_graph errors carry field paths") {
  CHECK_THROWS_WITH_AS(parse_graph(R"({"entities":[{"id":"A","name":"a"}],
      "relations":[{"source":"A","target":"Z","label":"r"}]})", "g.json"),
                       doctest::Contains("Z"), InputError);
  CHECK_THROWS_WITH_AS(parse_graph(R"({"entities":[{"id":"A","name":"a","colour":1}]})", "g.json"),
                       doctest::Contains("colour"), InputError);
  CHECK_THROWS_WITH_AS(parse_graph("{", "g.json"), doctest::Contains("g.json"), InputError);
  CHECK_THROWS_WITH_AS(load_graph("/nonexistent/graph.json"),
                       doctest::Contains("/nonexistent/graph.json"), InputError);
}

TEST_CASE("load_graph refuses graphs with violations") {
  testing::TempDir dir("graph");
  write_file(dir / "g.json",
             R"({"entities":[{"id":"A","name":"Alpha","aliases":["x","X"]}],"relations":[]})");
  CHECK_THROWS_AS(load_graph(dir / "g.json"), InputError);
}

TEST_CASE("graph json round trip") {
  testing::TempDir dir("graph");
  auto g = KnowledgeGraph::build(
      {{"b", "Beta", {"B"}, {{"kind", "city"}}}, {"a", "Alpha", {}, {}}},
      {{"a", "b", "near"}});
  save_graph(g, dir / "g.json");
  const auto back = load_graph(dir / "g.json");
  CHECK(graph_to_json(back) == graph_to_json(g));
  CHECK(back.entities()[0].id == "a");
  CHECK(back.entity("b").attributes.at("kind") == "city");
}

TEST_CASE("property: random graphs keep adjacency sorted and symmetric") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    std::vector<Entity> es;
    for (int i = 0; i < n; ++i) {
      es.push_back({"n" + std::to_string(rng() % 1000) + "_" + std::to_string(i), "x", {}, {}});
    }
    std::vector<Relation> rs;
    const int m = static_cast<int>(rng() % 40);
    for (int k = 0; k < m; ++k) {
      rs.push_back({es[rng() % n].id, es[rng() % n].id, "r" + std::to_string(k)});
    }
    const auto g = KnowledgeGraph::build(es, rs);
    CHECK(validate(g).empty());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto nb = g.neighbor_indices(i);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (std::size_t j : nb) {
        CHECK(j != i);
        const auto back = g.neighbor_indices(j);
        CHECK(std::binary_search(back.begin(), back.end(), i));
      }
    }
    for (const auto& r : rs) {
      if (r.source == r.target) continue;
      const auto nb = g.neighbors(r.source);
      CHECK(std::find(nb.begin(), nb.end(), r.target) != nb.end());
    }
  }
}
