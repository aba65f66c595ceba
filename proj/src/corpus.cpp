#include "kgcoref/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"

namespace kgcoref {

using nlohmann::json;

const Document& Corpus::document(std::string_view doc_id) const {
  auto it = std::lower_bound(
      documents.begin(), documents.end(), doc_id,
      [](const Document& d, std::string_view key) { return d.doc_id < key; });
  if (it == documents.end() || it->doc_id != doc_id) {
    throw InputError("unknown document '" + std::string(doc_id) + "'");
  }
  return *it;
}

namespace {

std::size_t parse_offset(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InputError(where + ": expected integer");
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  const auto signed_value = v.get<long long>();
  if (signed_value < 0) throw InputError(where + ": negative offset");
  return static_cast<std::size_t>(signed_value);
}

bool mention_order(const Mention& a, const Mention& b) {
  return std::tie(a.start, a.end) < std::tie(b.start, b.end);
}

// Parses one JSONL line into a document and its annotated mentions.
void parse_line(const json& j, const std::string& where, Document& doc,
                std::vector<Mention>& mentions) {
  if (!j.is_object()) throw InputError(where + ": expected object");
  for (const auto& [key, _] : j.items()) {
    if (key != "doc_id" && key != "text" && key != "mentions") {
      throw InputError(where + ": unknown field '" + key + "'");
    }
  }
  if (!j.contains("doc_id") || !j["doc_id"].is_string()) {
    throw InputError(where + ": 'doc_id' must be a string");
  }
  if (!j.contains("text") || !j["text"].is_string()) {
    throw InputError(where + ": 'text' must be a string");
  }
  doc.doc_id = j["doc_id"].get<std::string>();
  doc.text = j["text"].get<std::string>();
  if (doc.doc_id.empty()) throw InputError(where + ": empty doc_id");
  doc.token_spans = tokenize(doc.text);
  if (!j.contains("mentions")) return;

  doc.annotated = true;
  const auto& arr = j["mentions"];
  if (!arr.is_array()) throw InputError(where + ": 'mentions' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + ": mentions[" + std::to_string(i) + "]";
    const auto& m = arr[i];
    if (!m.is_object()) throw InputError(at + ": expected object");
    for (const auto& [key, _] : m.items()) {
      if (key != "start" && key != "end" && key != "gold_entity") {
        throw InputError(at + ": unknown field '" + key + "'");
      }
    }
    if (!m.contains("start") || !m.contains("end")) {
      throw InputError(at + ": 'start' and 'end' are required");
    }
    Mention mention;
    mention.doc_id = doc.doc_id;
    mention.start = parse_offset(m["start"], at + ".start");
    mention.end = parse_offset(m["end"], at + ".end");
    if (mention.start >= mention.end || mention.end > doc.text.size()) {
      throw InputError(at + ": span [" + std::to_string(mention.start) + ", " +
                       std::to_string(mention.end) +
                       ") out of bounds for text of " +
                       std::to_string(doc.text.size()) + " bytes");
    }
    mention.surface = doc.text.substr(mention.start, mention.end - mention.start);
    if (m.contains("gold_entity") && !m["gold_entity"].is_null()) {
      if (!m["gold_entity"].is_string()) {
        throw InputError(at + ".gold_entity: expected string");
      }
      mention.gold_entity = m["gold_entity"].get<std::string>();
    }
    mentions.push_back(std::move(mention));
  }
  std::sort(mentions.begin(), mentions.end(), mention_order);
  for (std::size_t i = 1; i < mentions.size(); ++i) {
    if (mentions[i].start == mentions[i - 1].start &&
        mentions[i].end == mentions[i - 1].end) {
      throw InputError(where + ": duplicate mention span [" +
                       std::to_string(mentions[i].start) + ", " +
                       std::to_string(mentions[i].end) + ")");
    }
  }
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl, std::string_view origin) {
  struct Parsed {
    Document doc;
    std::vector<Mention> mentions;
  };
  std::vector<Parsed> parsed;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    Parsed p;
    parse_line(parse_json(line, where), where, p.doc, p.mentions);
    parsed.push_back(std::move(p));
  }

  std::sort(parsed.begin(), parsed.end(), [](const Parsed& a, const Parsed& b) {
    return a.doc.doc_id < b.doc.doc_id;
  });
  for (std::size_t i = 1; i < parsed.size(); ++i) {
    if (parsed[i].doc.doc_id == parsed[i - 1].doc.doc_id) {
      throw InputError(std::string(origin) + ": duplicate doc_id '" +
                       parsed[i].doc.doc_id + "'");
    }
  }
  Corpus corpus;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    corpus.documents.push_back(std::move(parsed[i].doc));
    for (auto& m : parsed[i].mentions) corpus.mentions.push_back(std::move(m));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.string());
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  std::size_t next = 0;
  for (const auto& doc : corpus.documents) {
    out += "{\"doc_id\":" + quote(doc.doc_id) + ",\"text\":" + quote(doc.text);
    if (doc.annotated) {
      out += ",\"mentions\":[";
      bool first = true;
      for (; next < corpus.mentions.size() &&
             corpus.mentions[next].doc_id == doc.doc_id;
           ++next) {
        const auto& m = corpus.mentions[next];
        if (!first) out += ",";
        first = false;
        out += "{\"start\":" + std::to_string(m.start) +
               ",\"end\":" + std::to_string(m.end);
        if (m.gold_entity) out += ",\"gold_entity\":" + quote(*m.gold_entity);
        out += "}";
      }
      out += "]";
    } else {
      while (next < corpus.mentions.size() &&
             corpus.mentions[next].doc_id == doc.doc_id) {
        ++next;
      }
    }
    out += "}\n";
  }
  return out;
}

namespace {

struct Lexicon {
  std::unordered_set<std::string> folded;
  std::size_t max_tokens = 0;
};

Lexicon build_lexicon(const KnowledgeGraph& graph) {
  Lexicon lex;
  auto add = [&lex](const std::string& s) {
    const std::size_t tokens = tokenize(s).size();
    if (tokens == 0) return;
    lex.folded.insert(casefold(s));
    lex.max_tokens = std::max(lex.max_tokens, tokens);
  };
  for (const auto& e : graph.entities()) {
    add(e.name);
    for (const auto& a : e.aliases) add(a);
  }
  return lex;
}

std::vector<Mention> match_document(const Document& doc, const Lexicon& lex) {
  struct Match {
    std::size_t start;
    std::size_t end;
  };
  std::vector<Match> matches;
  const auto& tokens = doc.token_spans;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i; j < tokens.size() && j - i < lex.max_tokens; ++j) {
      const std::size_t start = tokens[i].start;
      const std::size_t end = tokens[j].end;
      if (lex.folded.count(casefold(
              std::string_view(doc.text).substr(start, end - start)))) {
        matches.push_back({start, end});
      }
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    const std::size_t la = a.end - a.start;
    const std::size_t lb = b.end - b.start;
    if (la != lb) return la > lb;
    return a.start < b.start;
  });

  std::vector<Match> chosen;
  for (const auto& m : matches) {
    bool overlaps = false;
    for (const auto& c : chosen) {
      overlaps = overlaps || (m.start < c.end && c.start < m.end);
    }
    if (!overlaps) chosen.push_back(m);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Match& a, const Match& b) { return a.start < b.start; });

  std::vector<Mention> out;
  for (const auto& c : chosen) {
    Mention m;
    m.doc_id = doc.doc_id;
    m.start = c.start;
    m.end = c.end;
    m.surface = doc.text.substr(c.start, c.end - c.start);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Corpus extract_mentions(const Corpus& corpus, const KnowledgeGraph& graph) {
  const Lexicon lex = build_lexicon(graph);
  const auto n = static_cast<std::ptrdiff_t>(corpus.documents.size());
  std::vector<std::vector<Mention>> per_doc(corpus.documents.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t d = 0; d < n; ++d) {
    const auto& doc = corpus.documents[d];
    if (!doc.annotated) per_doc[d] = match_document(doc, lex);
  }

  // Annotated documents keep their mentions as they are.
  std::size_t next = 0;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    for (; next < corpus.mentions.size() &&
           corpus.mentions[next].doc_id == doc.doc_id;
         ++next) {
      if (doc.annotated) per_doc[d].push_back(corpus.mentions[next]);
    }
  }

  Corpus out;
  out.documents = corpus.documents;
  for (auto& mentions : per_doc) {
    for (auto& m : mentions) out.mentions.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> context_window(const Document& doc,
                                        const Mention& mention, std::size_t k) {
  if (mention.doc_id != doc.doc_id) {
    throw InputError("mention from '" + mention.doc_id +
                     "' does not belong to document '" + doc.doc_id + "'");
  }
  if (mention.start >= mention.end || mention.end > doc.text.size()) {
    throw InputError("mention span out of bounds for document '" + doc.doc_id +
                     "'");
  }
  if (k == 0) throw InputError("context window must be at least 1");

  const auto& tokens = doc.token_spans;
  // First token not entirely left of the mention.
  auto left_end = std::partition_point(
      tokens.begin(), tokens.end(),
      [&](const ByteSpan& t) { return t.end <= mention.start; });
  auto right_begin = std::partition_point(
      left_end, tokens.end(),
      [&](const ByteSpan& t) { return t.start < mention.end; });

  const auto left_count =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(k), left_end - tokens.begin());
  const auto right_count =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(k), tokens.end() - right_begin);

  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(left_count + right_count));
  auto slice = [&doc](const ByteSpan& t) {
    return doc.text.substr(t.start, t.end - t.start);
  };
  for (auto it = left_end - left_count; it != left_end; ++it) out.push_back(slice(*it));
  for (auto it = right_begin; it != right_begin + right_count; ++it) {
    out.push_back(slice(*it));
  }
  return out;
}

void attach_contexts(Corpus& corpus, std::size_t k) {
  for (auto& m : corpus.mentions) {
    m.context = context_window(corpus.document(m.doc_id), m, k);
  }
}

}  // namespace kgcoref
