#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "kgcoref/embedding.hpp"
#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"
#include "oracles.hpp"

using namespace kgcoref;
using testing::make_graph;
using testing::mention;

namespace {

std::string random_word(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string w;
  const std::size_t len = 1 + rng() % max_len;
  for (std::size_t i = 0; i < len; ++i) w += letters[rng() % letters.size()];
  return w;
}

}  // namespace

TEST_CASE("feature hash matches the reference on fixed inputs") {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xffffffffffffffffull}) {
    for (const char* s : {"", "^ab", "ab$", "xyz", "^é$"}) {
      CHECK(feature_hash(s, seed) == oracle::hash(s, seed));
    }
  }
  // FNV-1a of the empty string is the offset basis.
  CHECK(oracle::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(oracle::fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("surface 'ab' embeds to the two boundary trigrams") {
  const std::size_t d = 16;
  const auto p = EmbeddingProvider::hashed({.dimension = d, .seed = 3});
  const auto v = p.embed_text("ab");
  std::vector<double> expect(d, 0.0);
  for (const char* g : {"^ab", "ab$"}) {
    const auto h = oracle::hash(g, 3);
    expect[h % d] += (h >> 63) ? -1.0 : 1.0;
  }
  CHECK(v == oracle::unit(expect));
}

TEST_CASE("mention embedding matches the reference bit for bit") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng() % 128;
    const std::uint64_t seed = rng();
    const std::string surface = random_word(rng, 12);
    std::vector<std::string> context;
    const std::size_t n = rng() % 6;
    for (std::size_t i = 0; i < n; ++i) context.push_back(random_word(rng, 8));
    const auto p = EmbeddingProvider::hashed({.dimension = d, .seed = seed});
    const auto got = p.embed_mention(mention("d", 0, surface.size(), surface, context));
    CHECK(got == oracle::mention_vector(surface, context, d, seed, kDefaultContextWeight));
  }
}

TEST_CASE("mention embedding is deterministic and context sensitive") {
  const auto p = EmbeddingProvider::hashed({});
  const auto a = p.embed_mention(mention("d", 0, 1, "X", {"river", "bank"}));
  const auto b = p.embed_mention(mention("d", 0, 1, "X", {"river", "bank"}));
  const auto bare = p.embed_mention(mention("d", 0, 1, "X"));
  CHECK(a == b);
  CHECK(a != bare);
  CHECK(bare == p.embed_text("X"));
  CHECK(std::abs(l2_norm(a) - 1.0) <= 1e-9);
}

TEST_CASE("normalize keeps zero vectors at zero") {
  CHECK(normalized({0.0, 0.0}) == Embedding{0.0, 0.0});
  const auto v = normalized({3.0, 4.0});
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(std::abs(l2_norm(v) - 1.0) <= 1e-9);
}

TEST_CASE("isolated entity embeds to its normalized name vector") {
  const auto g = make_graph({{"a", "Alpha", {"Al"}}});
  const auto p = EmbeddingProvider::hashed({});
  const auto name = p.embed_text("Alpha");
  const auto alias = p.embed_text("Al");
  Embedding mean(name.size());
  for (std::size_t k = 0; k < mean.size(); ++k) mean[k] = (name[k] + alias[k]) / 2.0;
  const auto got = p.embed_entity(g.entity("a"), g);
  CHECK(got == normalized(mean));
}

TEST_CASE("entity whose neighbors share its name keeps its name vector") {
  const auto g = make_graph({{"a", "Same"}, {"b", "Same"}, {"c", "Same"}},
                            {{"a", "b"}, {"a", "c"}});
  const auto p = EmbeddingProvider::hashed({});
  const auto got = p.embed_entity(g.entity("a"), g);
  const auto want = p.embed_text("Same");
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("two-neighbor entity assembles from three name vectors") {
  const auto g = make_graph({{"a", "Alpha"}, {"b", "Bravo"}, {"c", "Charlie"}},
                            {{"a", "b"}, {"c", "a"}});
  const auto p = EmbeddingProvider::hashed({.name_mix = 0.5});
  const auto va = p.embed_text("Alpha");
  const auto vb = p.embed_text("Bravo");
  const auto vc = p.embed_text("Charlie");
  Embedding want(va.size());
  for (std::size_t k = 0; k < want.size(); ++k) {
    want[k] = 0.5 * va[k] + 0.5 * ((vb[k] + vc[k]) / 2.0);
  }
  want = normalized(want);
  const auto got = p.embed_entity(g.entity("a"), g);
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
  const auto batch = p.embed_entities(g);
  CHECK(batch[g.index_of("a")] == got);
}

TEST_CASE("vector files") {
  const auto t = parse_vectors("dim 2\ne1\t1 0\n", 2, "v");
  REQUIRE(t.size() == 1);
  CHECK(t.at("e1") == Embedding{1.0, 0.0});
  CHECK_THROWS_AS(parse_vectors("dim 2\ne1\t1 0 3\n", 2, "v"), InputError);
  CHECK_THROWS_AS(parse_vectors("dim 2\ne1\t1 0\ne1\t0 1\n", 2, "v"), InputError);
  CHECK_THROWS_AS(parse_vectors("dim 3\ne1\t1 0 0\n", 2, "v"), InputError);
  CHECK_THROWS_AS(parse_vectors("dim 2\ne1\t1 nan\n", 2, "v"), InputError);
  CHECK_THROWS_AS(parse_vectors("e1\t1 0\n", 2, "v"), InputError);

  testing::TempDir dir("vec");
  VectorTable table{{"entity:a", {0.1, -2.5}}, {"mention:d:0:3", {1e-300, 3.0}}};
  write_file(dir / "v.txt", vectors_to_text(table, 2));
  CHECK(load_vectors(dir / "v.txt", 2) == table);
}

TEST_CASE("file provider looks up keys and falls back to hashing") {
  const auto g = make_graph({{"a", "Alpha"}, {"b", "Bravo"}});
  VectorTable table{{"entity:a", {3.0, 4.0}}, {"mention:d:0:5", {0.0, 2.0}}};
  const auto p = EmbeddingProvider::from_table(table, {.dimension = 2});
  CHECK(p.embed_entity(g.entity("a"), g) == Embedding{0.6, 0.8});
  CHECK(p.embed_mention(mention("d", 0, 5, "Alpha")) == Embedding{0.0, 1.0});
  const auto fallback = p.embed_mention(mention("d", 6, 11, "Bravo"));
  CHECK(fallback == EmbeddingProvider::hashed({.dimension = 2}).embed_mention(
                        mention("d", 6, 11, "Bravo")));

  const auto strict = EmbeddingProvider::from_table(table, {.dimension = 2, .fallback = false});
  CHECK_THROWS_WITH_AS(strict.embed_entities(g), doctest::Contains("entity:b"), InputError);
  CHECK_THROWS_AS(EmbeddingProvider::from_table(table, {.dimension = 3}), InputError);
}

TEST_CASE("provider settings are validated") {
  CHECK_THROWS_AS(EmbeddingProvider::hashed({.dimension = 0}), InputError);
  CHECK_THROWS_AS(EmbeddingProvider::hashed({.name_mix = 1.5}), InputError);
  CHECK_THROWS_AS(EmbeddingProvider::hashed({.context_weight = -1.0}), InputError);
}
