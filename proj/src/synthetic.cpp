#include "kgcoref/synthetic.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "kgcoref/error.hpp"
#include "kgcoref/text.hpp"

namespace kgcoref {

void SyntheticParams::validate() const {
  if (n_entities < 2) throw InputError("synthetic graph needs at least 2 entities");
  if (n_docs < 1) throw InputError("synthetic corpus needs at least 1 document");
  if (mentions_per_doc < 1) throw InputError("mentions per document must be positive");
  if (context_per_side < 1) throw InputError("context tokens per side must be positive");
  if (!(ambiguity_rate >= 0.0 && ambiguity_rate <= 1.0)) {
    throw InputError("ambiguity rate must lie in [0, 1]");
  }
  if (!(relation_density >= 0.0 && relation_density <= 1.0)) {
    throw InputError("relation density must lie in [0, 1]");
  }
}

namespace {

// SplitMix64; portable where std:: distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::uint64_t state_;
};

constexpr const char* kOnsets[] = {
    "b",  "c",  "d",  "f",  "g",  "h",  "j",  "k",  "l",  "m",  "n",
    "p",  "qu", "r",  "s",  "t",  "v",  "w",  "x",  "y",  "z",  "bl",
    "br", "ch", "cl", "cr", "dr", "fl", "fr", "gl", "gr", "kl", "kr",
    "pl", "pr", "sc", "sh", "sk", "sl", "sm", "sn", "sp", "st", "sw",
    "th", "tr", "tw", "vr", "wh", "zh"};
constexpr const char* kVowels[] = {"a",  "e",  "i",  "o",  "u",  "y",  "ai",
                                   "au", "ea", "ee", "ei", "eu", "ie", "io",
                                   "oa", "oi", "oo", "ou", "ua", "ue"};
constexpr const char* kCodas[] = {"b",  "d",  "f",  "g",  "k",  "l",  "m",
                                  "n",  "p",  "r",  "s",  "t",  "x",  "z",
                                  "ck", "ft", "lt", "nd", "ng", "nk", "rn",
                                  "rt", "sk", "st"};
constexpr const char* kLabels[] = {"related_to", "part_of", "located_in",
                                   "works_with"};

// Made-up words that share at most one character trigram with any earlier
// word, so hashed name vectors stay far apart.
class WordSource {
 public:
  explicit WordSource(Rng& rng) : rng_(rng) {}

  std::string next() {
    for (std::size_t attempt = 0;; ++attempt) {
      std::string w = candidate();
      std::string folded = w;
      folded[0] = static_cast<char>(folded[0] - 'A' + 'a');
      const auto grams = char_trigrams(folded);
      const std::set<std::string> mine(grams.begin(), grams.end());
      // Past a few thousand attempts accept any unused word.
      const std::size_t allowed = attempt < 4000 ? 1 : mine.size();
      bool ok = !words_.count(w);
      for (const auto& other : grams_) {
        if (!ok) break;
        std::size_t shared = 0;
        for (const auto& g : mine) shared += other.count(g);
        ok = shared <= allowed;
      }
      if (!ok) continue;
      words_.insert(w);
      grams_.push_back(mine);
      return w;
    }
  }

 private:
  std::string candidate() {
    const std::size_t syllables = 2 + rng_.below(2);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kOnsets[rng_.below(std::size(kOnsets))];
      w += kVowels[rng_.below(std::size(kVowels))];
    }
    if (rng_.chance(0.5)) w += kCodas[rng_.below(std::size(kCodas))];
    w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
  }

  Rng& rng_;
  std::set<std::string> words_;
  std::vector<std::set<std::string>> grams_;
};

std::string padded(const char* prefix, std::size_t value, std::size_t count) {
  std::size_t width = 4;
  for (std::size_t c = count; c >= 10000; c /= 10) ++width;
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticParams& params) {
  params.validate();
  Rng rng(params.seed);
  const std::size_t n = params.n_entities;

  WordSource words(rng);
  std::vector<Entity> entities(n);
  for (std::size_t i = 0; i < n; ++i) {
    entities[i].id = padded("e", i, n);
    entities[i].name = words.next();
  }

  SyntheticData data;
  std::vector<std::size_t> partner(n, n);
  for (std::size_t p = 0; p + 1 < n; p += 2) {
    if (!rng.chance(params.ambiguity_rate)) continue;
    const std::string shared = words.next();
    entities[p].aliases = {shared};
    entities[p + 1].aliases = {shared};
    partner[p] = p + 1;
    partner[p + 1] = p;
    data.decoy_pairs.emplace_back(entities[p].id, entities[p + 1].id);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (entities[i].aliases.empty()) entities[i].aliases = {words.next()};
  }

  std::vector<Relation> relations;
  std::vector<std::set<std::size_t>> adjacent(n);
  auto relate = [&](std::size_t a, std::size_t b) {
    const bool flip = rng.chance(0.5);
    relations.push_back({entities[flip ? b : a].id, entities[flip ? a : b].id,
                         kLabels[rng.below(std::size(kLabels))]});
    adjacent[a].insert(b);
    adjacent[b].insert(a);
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (partner[a] != b && rng.chance(params.relation_density)) relate(a, b);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!adjacent[a].empty()) continue;
    std::size_t b = rng.below(n);
    while (b == a || b == partner[a]) b = rng.below(n);
    relate(a, b);
  }

  Corpus corpus;
  for (std::size_t d = 0; d < params.n_docs; ++d) {
    Document doc;
    doc.doc_id = padded("doc", d, params.n_docs);
    doc.annotated = true;
    std::vector<Mention> mentions;
    auto append = [&doc](const std::string& token) {
      if (!doc.text.empty()) doc.text += ' ';
      doc.text += token;
    };
    for (std::size_t k = 0; k < params.mentions_per_doc; ++k) {
      const std::size_t g = rng.below(n);
      const Entity& gold = entities[g];
      const std::vector<std::size_t> nb(adjacent[g].begin(), adjacent[g].end());
      // Cycle through a shuffled copy of the neighbor list so each
      // neighbor shows up about equally often.
      std::vector<std::size_t> order = nb;
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
      }
      std::size_t cursor = 0;
      auto neighbor_names = [&] {
        for (std::size_t c = 0; c < params.context_per_side; ++c) {
          append(entities[order[cursor++ % order.size()]].name);
        }
      };

      neighbor_names();
      const std::size_t pick = rng.below(1 + gold.aliases.size());
      const std::string& surface = pick == 0 ? gold.name : gold.aliases[pick - 1];
      append(surface);
      Mention m;
      m.doc_id = doc.doc_id;
      m.end = doc.text.size();
      m.start = m.end - surface.size();
      m.surface = surface;
      m.gold_entity = gold.id;
      mentions.push_back(std::move(m));
      neighbor_names();
      append(".");
    }
    doc.token_spans = tokenize(doc.text);
    corpus.documents.push_back(std::move(doc));
    for (auto& m : mentions) corpus.mentions.push_back(std::move(m));
  }

  data.graph = KnowledgeGraph::build(std::move(entities), std::move(relations));
  data.corpus = std::move(corpus);
  data.gold = gold_from_corpus(data.corpus, data.graph);
  return data;
}

}  // namespace kgcoref
