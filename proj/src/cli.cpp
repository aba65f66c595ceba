#include "kgcoref/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"
#include "kgcoref/pipeline.hpp"

namespace kgcoref::cli {

namespace {

// Config keys that can also be given as --<key> flags.
const char* const kValueKeys[] = {
    "graph",   "corpus",         "vectors",   "weights",      "out",
    "theta",   "gain",           "dim",       "seed",         "window",
    "alpha",   "context-weight", "provider",  "fallback",     "threshold-on",
    "lambda",  "epsilon",        "max-iter",  "propagation-rounds",
    "update-rule", "threads",
};

struct PipelineFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool dump_states = false;
  CLI::Option* dump_option = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key = value config file (or a report.json)");
    for (const char* key : kValueKeys) {
      options[key] = app.add_option(std::string("--") + key, values[key]);
    }
    dump_option = app.add_flag("--dump-states", dump_states,
                               "write entity vectors after every propagation step");
  }

  // Config file first, then flags on top.
  PipelineConfig resolve() const {
    PipelineConfig config;
    if (!config_file.empty()) apply_config_file(config_file, config);
    for (const auto& [key, option] : options) {
      if (option->count() > 0) config.set(key, values.at(key));
    }
    if (dump_option->count() > 0) config.dump_states = dump_states;
    return config;
  }
};

std::size_t parse_count(const std::string& what, const std::string& text) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || text[0] == '-') {
    throw InputError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

void apply_threads(std::size_t from_config) {
  std::size_t threads = from_config;
  if (threads == 0) {
    if (const char* env = std::getenv("KG_COREF_THREADS"); env && *env) {
      threads = parse_count("KG_COREF_THREADS", env);
    }
  }
  if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
}

std::vector<double> parse_thetas(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') {
      throw InputError("thetas: cannot parse '" + item + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

void print_linking(std::ostream& out, const EvalReport& r) {
  out << r.label << "  P=" << fixed(r.linking.precision)
      << " R=" << fixed(r.linking.recall) << " F1=" << fixed(r.linking.f1)
      << "  pairs F1=" << fixed(r.pairs.f1) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-document coreference over a knowledge graph"};
  app.require_subcommand(1);

  auto* link = app.add_subcommand("link", "link mentions and write links.jsonl, clusters.json");
  PipelineFlags link_flags;
  link_flags.attach(*link);

  auto* eval = app.add_subcommand("eval", "link, then score against gold annotations");
  PipelineFlags eval_flags;
  eval_flags.attach(*eval);

  auto* sweep = app.add_subcommand("sweep", "score once, report P/R/F1 for several thresholds");
  PipelineFlags sweep_flags;
  sweep_flags.attach(*sweep);
  std::string thetas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  sweep->add_option("--thetas", thetas, "comma-separated thresholds");

  auto* synth = app.add_subcommand("synth", "generate a synthetic graph and gold corpus");
  SyntheticParams params;
  std::string synth_out = "synth";
  synth->add_option("--seed", params.seed);
  synth->add_option("--entities", params.n_entities);
  synth->add_option("--docs", params.n_docs);
  synth->add_option("--mentions-per-doc", params.mentions_per_doc);
  synth->add_option("--ambiguity", params.ambiguity_rate);
  synth->add_option("--density", params.relation_density);
  synth->add_option("--context", params.context_per_side, "neighbor names per side");
  synth->add_option("--out", synth_out);

  auto* inspect = app.add_subcommand("inspect", "summarize a graph and/or corpus");
  std::string inspect_graph;
  std::string inspect_corpus;
  inspect->add_option("--graph", inspect_graph);
  inspect->add_option("--corpus", inspect_corpus);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (link->parsed()) {
      const PipelineConfig config = link_flags.resolve();
      apply_threads(config.threads);
      cmd_link(config);
      out << "wrote " << (std::filesystem::path(config.out) / "links.jsonl").string()
          << "\n";
    } else if (eval->parsed()) {
      const PipelineConfig config = eval_flags.resolve();
      apply_threads(config.threads);
      print_linking(out, cmd_eval(config));
    } else if (sweep->parsed()) {
      const PipelineConfig config = sweep_flags.resolve();
      apply_threads(config.threads);
      const auto values = parse_thetas(thetas);
      for (const auto& r : cmd_sweep(config, values)) print_linking(out, r);
    } else if (synth->parsed()) {
      cmd_synth(params, synth_out);
      out << "wrote " << synth_out << "/{graph.json,corpus.jsonl,gold.jsonl}\n";
    } else if (inspect->parsed()) {
      out << cmd_inspect(inspect_graph, inspect_corpus);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariantError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariantError;
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace kgcoref::cli
