#include "kgcoref/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"

namespace kgcoref {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || !std::isfinite(v)) {
    throw InputError(key + ": expected a finite number, got '" + value + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0' || value[0] == '-') {
    throw InputError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InputError(key + ": expected true or false, got '" + value + "'");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const char* rule_name(kernels::UpdateRule rule) {
  switch (rule) {
    case kernels::UpdateRule::kAnchored: return "anchored";
    case kernels::UpdateRule::kDamped: return "damped";
    case kernels::UpdateRule::kLiteral: return "literal";
  }
  return "anchored";
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "graph") graph = value;
  else if (key == "corpus") corpus = value;
  else if (key == "vectors") vectors = value;
  else if (key == "weights") weights = value;
  else if (key == "out") out = value;
  else if (key == "dim") dimension = parse_unsigned(key, value);
  else if (key == "seed") seed = parse_unsigned(key, value);
  else if (key == "window") window = parse_unsigned(key, value);
  else if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "context-weight") context_weight = parse_double(key, value);
  else if (key == "gain") gain = parse_double(key, value);
  else if (key == "theta") theta = parse_double(key, value);
  else if (key == "lambda") lambda = parse_double(key, value);
  else if (key == "epsilon") epsilon = parse_double(key, value);
  else if (key == "max-iter") max_iter = parse_unsigned(key, value);
  else if (key == "propagation-rounds") rounds = parse_unsigned(key, value);
  else if (key == "threads") threads = parse_unsigned(key, value);
  else if (key == "dump-states") dump_states = parse_bool(key, value);
  else if (key == "fallback") fallback = parse_bool(key, value);
  else if (key == "provider") {
    if (value == "hashed") provider = ProviderKind::kHashed;
    else if (value == "file") provider = ProviderKind::kFile;
    else throw InputError("provider: expected hashed or file, got '" + value + "'");
  } else if (key == "threshold-on") {
    if (value == "likelihood") threshold_on = ThresholdOn::kLikelihood;
    else if (value == "raw") threshold_on = ThresholdOn::kRaw;
    else throw InputError("threshold-on: expected likelihood or raw, got '" + value + "'");
  } else if (key == "update-rule") {
    if (value == "anchored") rule = kernels::UpdateRule::kAnchored;
    else if (value == "damped") rule = kernels::UpdateRule::kDamped;
    else if (value == "literal") rule = kernels::UpdateRule::kLiteral;
    else throw InputError("update-rule: expected anchored, damped or literal, got '" +
                          value + "'");
  } else {
    throw InputError("unknown configuration key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  if (dimension == 0) throw InputError("dim must be positive");
  if (window == 0) throw InputError("window must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  if (!(context_weight >= 0.0)) throw InputError("context-weight must be non-negative");
  if (!(gain > 0.0)) throw InputError("gain must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("theta must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (max_iter < 1) throw InputError("max-iter must be at least 1");
  if (resolved_provider() == ProviderKind::kFile && vectors.empty()) {
    throw InputError("provider 'file' needs --vectors");
  }
}

ProviderKind PipelineConfig::resolved_provider() const {
  if (provider) return *provider;
  return vectors.empty() ? ProviderKind::kHashed : ProviderKind::kFile;
}

std::map<std::string, std::string> PipelineConfig::echo() const {
  return {
      {"alpha", format_double(alpha)},
      {"context-weight", format_double(context_weight)},
      {"corpus", corpus},
      {"dim", std::to_string(dimension)},
      {"dump-states", dump_states ? "true" : "false"},
      {"epsilon", format_double(epsilon)},
      {"fallback", fallback ? "true" : "false"},
      {"gain", format_double(gain)},
      {"graph", graph},
      {"lambda", format_double(lambda)},
      {"max-iter", std::to_string(max_iter)},
      {"propagation-rounds", std::to_string(rounds)},
      {"provider", resolved_provider() == ProviderKind::kFile ? "file" : "hashed"},
      {"seed", std::to_string(seed)},
      {"theta", format_double(theta)},
      {"threshold-on", threshold_on == ThresholdOn::kRaw ? "raw" : "likelihood"},
      {"update-rule", rule_name(rule)},
      {"vectors", vectors},
      {"weights", weights},
      {"window", std::to_string(window)},
  };
}

ProviderSettings PipelineConfig::provider_settings() const {
  ProviderSettings s;
  s.dimension = dimension;
  s.seed = seed;
  s.context_weight = context_weight;
  s.name_mix = alpha;
  s.fallback = fallback;
  return s;
}

PropagationConfig PipelineConfig::propagation() const {
  PropagationConfig p;
  p.damping = lambda;
  p.epsilon = epsilon;
  p.max_iterations = max_iter;
  p.outer_rounds = rounds;
  p.rule = rule;
  return p;
}

LinkSettings PipelineConfig::link_settings() const {
  return {theta, gain, threshold_on};
}

void apply_config_file(const fs::path& path, PipelineConfig& config) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    auto doc = parse_json(text, path.string());
    const auto& object = doc.contains("config") ? doc["config"] : doc;
    if (!object.is_object()) throw InputError(path.string() + ": expected an object");
    for (const auto& [key, value] : object.items()) {
      config.set(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return;
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected key = value");
    }
    try {
      config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

LinkRun run_link(const PipelineConfig& config,
                 const std::function<void(std::size_t, const EntityState&)>& observer) {
  config.validate();
  LinkRun run;
  run.graph = load_graph(config.graph);
  run.corpus = extract_mentions(load_corpus(config.corpus), run.graph);
  attach_contexts(run.corpus, config.window);

  PropagationConfig propagation = config.propagation();
  VectorTable table;
  if (!config.vectors.empty()) table = load_vectors(config.vectors, config.dimension);
  if (!config.weights.empty()) {
    load_weights(load_vectors(config.weights, config.dimension), config.dimension,
                 propagation);
  }
  run.provider = config.resolved_provider() == ProviderKind::kFile
                     ? EmbeddingProvider::from_table(std::move(table),
                                                     config.provider_settings())
                     : EmbeddingProvider::hashed(config.provider_settings());

  run.result = refine_and_relink(run.graph, run.corpus.mentions, run.provider,
                                 propagation, config.link_settings(), observer);
  run.clusters = build_clusters(run.result.decisions);
  check_run(run);
  return run;
}

void check_run(const LinkRun& run) {
  const auto& decisions = run.result.decisions;
  if (decisions.size() != run.corpus.mentions.size()) {
    throw InvariantError("decision count differs from mention count");
  }
  for (double s : run.result.scores.scores) {
    if (!std::isfinite(s) || std::abs(s) > 1.0 + 1e-9) {
      throw InvariantError("score outside [-1, 1]");
    }
  }
  std::size_t accepted = 0;
  for (const auto& d : decisions) accepted += d.accepted;
  std::size_t clustered = 0;
  std::set<MentionKey> seen;
  for (const auto& c : run.clusters.clusters) {
    for (const auto& m : c.mentions) {
      ++clustered;
      if (!seen.insert(key_of(m)).second) {
        throw InvariantError("mention appears in two clusters");
      }
    }
  }
  if (clustered != accepted) {
    throw InvariantError("clusters do not partition the accepted mentions");
  }
}

EvalReport evaluate(const LinkRun& run, const PipelineConfig& config,
                    std::span<const LinkDecision> decisions, std::string label) {
  const GoldStandard gold = gold_from_corpus(run.corpus, run.graph);
  const ClusterSet clusters = build_clusters(decisions);
  EvalReport report;
  report.label = std::move(label);
  report.linking = linking_metrics(decisions, gold);
  report.pairs = pair_metrics(clusters.clusters, gold);
  report.config = config.echo();
  return report;
}

namespace {

// Files written by one command; removed again unless commit() ran.
class OutputGuard {
 public:
  explicit OutputGuard(const fs::path& dir) : dir_(dir) {
    std::error_code ec;
    if (!fs::exists(dir_, ec)) {
      created_.push_back(dir_);
    }
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw InputError("cannot create output directory '" + dir_.string() + "'");
    }
  }
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;

  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = files_.rbegin(); it != files_.rend(); ++it) fs::remove(*it, ec);
    for (auto it = created_.rbegin(); it != created_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

  fs::path dir(const fs::path& relative) {
    const fs::path p = dir_ / relative;
    std::error_code ec;
    if (!fs::exists(p, ec)) created_.push_back(p);
    fs::create_directories(p, ec);
    if (ec) throw InputError("cannot create directory '" + p.string() + "'");
    return p;
  }

  void write(const fs::path& relative, std::string_view contents) {
    const fs::path p = dir_ / relative;
    files_.push_back(p);
    write_file(p, contents);
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  std::vector<fs::path> created_;
  bool committed_ = false;
};

std::string state_dump(const KnowledgeGraph& graph, const EntityState& state,
                       std::size_t dimension) {
  VectorTable table;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    table.emplace(entity_key(graph.entities()[i].id), state.embeddings[i]);
  }
  return vectors_to_text(table, dimension);
}

LinkRun run_with_outputs(const PipelineConfig& config, OutputGuard& out) {
  std::function<void(std::size_t, const EntityState&)> observer;
  if (config.dump_states) out.dir("states");
  std::vector<std::pair<std::string, EntityState>> dumps;
  if (config.dump_states) {
    observer = [&dumps](std::size_t round, const EntityState& s) {
      dumps.emplace_back("round" + std::to_string(round) + "_iter" +
                             std::to_string(s.iteration) + ".vec",
                         s);
    };
  }
  LinkRun run = run_link(config, observer);
  out.write("links.jsonl", links_to_jsonl(run.result.decisions));
  out.write("clusters.json", clusters_to_json(run.clusters));
  for (const auto& [name, state] : dumps) {
    out.write(fs::path("states") / name,
              state_dump(run.graph, state, config.dimension));
  }
  return run;
}

}  // namespace

void cmd_link(const PipelineConfig& config) {
  config.validate();
  OutputGuard out(config.out);
  run_with_outputs(config, out);
  out.commit();
}

EvalReport cmd_eval(const PipelineConfig& config) {
  config.validate();
  OutputGuard out(config.out);
  LinkRun run = run_with_outputs(config, out);
  if (gold_from_corpus(run.corpus, run.graph).assignments.empty()) {
    throw InputError("corpus '" + config.corpus + "' has no gold_entity annotations");
  }
  EvalReport report = evaluate(run, config, run.result.decisions,
                               "theta=" + format_double(config.theta));
  out.write("report.json", report_to_json(report));
  out.write("report.md", reports_to_markdown(std::span(&report, 1)));
  out.commit();
  return report;
}

std::string gold_to_jsonl(const GoldStandard& gold) {
  std::string out;
  for (const auto& [key, entity] : gold.assignments) {
    const auto& [doc, start, end] = key;
    out += "{\"doc_id\":" + quote(doc) + ",\"start\":" + std::to_string(start) +
           ",\"end\":" + std::to_string(end) + ",\"entity\":" + quote(entity) + "}\n";
  }
  return out;
}

void cmd_synth(const SyntheticParams& params, const fs::path& dir) {
  params.validate();
  const SyntheticData data = generate_synthetic(params);
  OutputGuard out(dir);
  out.write("graph.json", graph_to_json(data.graph));
  out.write("corpus.jsonl", corpus_to_jsonl(data.corpus));
  out.write("gold.jsonl", gold_to_jsonl(data.gold));
  out.commit();
}

std::vector<EvalReport> cmd_sweep(const PipelineConfig& config,
                                  std::span<const double> thetas) {
  config.validate();
  if (thetas.empty()) throw InputError("sweep needs at least one theta");
  for (double t : thetas) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw InputError("theta " + format_double(t) + " outside [0, 1]");
    }
  }
  OutputGuard out(config.out);
  LinkRun run = run_link(config);
  if (gold_from_corpus(run.corpus, run.graph).assignments.empty()) {
    throw InputError("corpus '" + config.corpus + "' has no gold_entity annotations");
  }

  std::vector<EvalReport> reports;
  std::string summary = "{\"rows\":[";
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    PipelineConfig at = config;
    at.theta = thetas[k];
    const auto decisions =
        filter_links(run.result.decisions, at.theta, at.threshold_on);
    EvalReport report =
        evaluate(run, at, decisions, "theta=" + format_double(at.theta));
    const std::string dir = "theta_" + fixed(at.theta, 3);
    out.dir(dir);
    out.write(fs::path(dir) / "report.json", report_to_json(report));
    out.write(fs::path(dir) / "report.md",
              reports_to_markdown(std::span(&report, 1)));
    if (k > 0) summary += ",";
    summary += "\n{\"f1\":" + fixed(report.linking.f1) +
               ",\"precision\":" + fixed(report.linking.precision) +
               ",\"recall\":" + fixed(report.linking.recall) +
               ",\"theta\":" + fixed(at.theta) + "}";
    reports.push_back(std::move(report));
  }
  summary += "]}\n";
  out.write("sweep_summary.json", summary);
  out.write("sweep_summary.md", reports_to_markdown(reports));
  out.commit();
  return reports;
}

std::string cmd_inspect(const std::string& graph_path, const std::string& corpus_path) {
  if (graph_path.empty() && corpus_path.empty()) {
    throw InputError("inspect needs --graph and/or --corpus");
  }
  std::ostringstream os;
  std::optional<KnowledgeGraph> graph;
  if (!graph_path.empty()) {
    graph = parse_graph(read_file(graph_path), graph_path);
    std::size_t isolated = 0;
    std::size_t max_degree = 0;
    std::size_t aliases = 0;
    for (std::size_t i = 0; i < graph->size(); ++i) {
      const std::size_t deg = graph->neighbor_indices(i).size();
      isolated += deg == 0;
      max_degree = std::max(max_degree, deg);
      aliases += graph->entities()[i].aliases.size();
    }
    const auto violations = validate(*graph);
    os << "graph " << graph_path << "\n"
       << "  entities:   " << graph->size() << "\n"
       << "  aliases:    " << aliases << "\n"
       << "  relations:  " << graph->relations().size() << "\n"
       << "  isolated:   " << isolated << "\n"
       << "  max degree: " << max_degree << "\n"
       << "  violations: " << violations.size() << "\n";
    for (const auto& v : violations) os << "    " << v.to_string() << "\n";
  }
  if (!corpus_path.empty()) {
    const Corpus corpus = load_corpus(corpus_path);
    std::size_t annotated = 0;
    std::size_t tokens = 0;
    for (const auto& d : corpus.documents) {
      annotated += d.annotated;
      tokens += d.token_spans.size();
    }
    std::size_t gold = 0;
    for (const auto& m : corpus.mentions) gold += m.gold_entity.has_value();
    os << "corpus " << corpus_path << "\n"
       << "  documents:  " << corpus.documents.size() << " (" << annotated
       << " annotated)\n"
       << "  tokens:     " << tokens << "\n"
       << "  mentions:   " << corpus.mentions.size() << " (" << gold << " with gold)\n";
    if (graph) {
      const Corpus extracted = extract_mentions(corpus, *graph);
      os << "  after extraction: " << extracted.mentions.size() << " mentions\n";
    }
  }
  return os.str();
}

}  // namespace kgcoref
