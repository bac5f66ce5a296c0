#include "storyeval/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "storyeval/error.hpp"
#include "storyeval/hash.hpp"
#include "storyeval/ngram.hpp"
#include "storyeval/parallel.hpp"
#include "storyeval/pipeline.hpp"
#include "storyeval/probes.hpp"
#include "storyeval/report.hpp"
#include "storyeval/sampler.hpp"
#include "storyeval/textops.hpp"

namespace storyeval {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string resources;
  std::string out;
  std::vector<std::string> k_list;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool skip_invalid = false;
  std::string pc_scope = "group";
  double sif_a = 1e-3;
  bool no_pc_removal = false;
  bool include_propn = false;
  bool include_aux = false;
  std::string tie_policy = "strict";

  // command-specific
  std::string model_path;
  std::string scores_path;
  bool random_scorer = false;
  bool teacher_force = false;
  std::string prompts_path;
  std::string model_name = "ngram";
  std::size_t order = 3;
  double discount = NgramModel::kDefaultDiscount;
  std::size_t target_len = kHumanStoryWords;
  double temperature = 1.0;
  std::size_t horizon = kHumanStoryWords;
  std::string unigrams_out;
  std::vector<std::string> chart_metrics;
};

std::string num(double v) { return format_double(v); }

std::map<std::string, std::string> base_config(const RunConfig& c) {
  return {{"command", c.command},
          {"seed", std::to_string(c.seed)},
          {"skip_invalid", c.skip_invalid ? "1" : "0"}};
}

std::map<std::string, std::string> input_hashes(const std::vector<std::string>& paths) {
  std::map<std::string, std::string> out;
  for (const auto& p : paths) out[fs::path(p).filename().string()] = file_hash(p);
  return out;
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& config,
                    const std::string& fingerprint,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::pair<std::string, std::string>>& resources,
                    const std::vector<std::string>& outputs) {
  Json j;
  j["fingerprint"] = fingerprint;
  Json cfg = Json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = std::move(cfg);
  Json in = Json::object();
  for (const auto& [k, v] : inputs) in[k] = v;
  j["inputs"] = std::move(in);
  Json res = Json::object();
  for (const auto& [k, v] : resources) res[k] = v;
  j["resources"] = std::move(res);
  Json outs = Json::object();
  for (const auto& o : outputs) outs[fs::path(o).filename().string()] = file_hash(o);
  j["outputs"] = std::move(outs);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << '\n';
}

std::vector<EvalRecord> read_inputs(const RunConfig& c, std::ostream& err) {
  std::vector<EvalRecord> all;
  for (const auto& p : c.inputs) {
    ReadOptions opts;
    opts.skip_invalid = c.skip_invalid;
    opts.warn = [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };
    auto recs = load_records(p, opts);
    all.insert(all.end(), std::make_move_iterator(recs.begin()),
               std::make_move_iterator(recs.end()));
  }
  return all;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("--out is required");
  fs::create_directories(dir);
}

std::string chart_name(const std::string& metric) { return metric + ".svg"; }

std::vector<std::string> emit_report_files(const MetricReport& report, const std::string& dir,
                                           const std::vector<std::string>& only,
                                           std::ostream& err) {
  std::vector<std::string> written;
  const std::string csv = (fs::path(dir) / "report.csv").string();
  emit_csv(report, csv);
  written.push_back(csv);
  std::set<std::string> metrics;
  for (const auto& r : report.rows) metrics.insert(r.metric);
  const fs::path charts = fs::path(dir) / "charts";
  fs::create_directories(charts);
  std::vector<std::string> chosen = only;
  if (chosen.empty()) chosen.assign(metrics.begin(), metrics.end());
  for (const auto& m : chosen) {
    const std::string path = (charts / chart_name(m)).string();
    emit_svg(report, m, path);  // throws std::invalid_argument on unknown metric
    written.push_back(path);
  }
  constexpr std::size_t kShown = 3;
  for (std::size_t i = 0; i < report.warnings.size() && i < kShown; ++i) {
    err << "warning: " << report.warnings[i] << '\n';
  }
  if (report.warnings.size() > kShown) {
    err << "warning: ... and " << report.warnings.size() - kShown
        << " more groups without values\n";
  }
  return written;
}

// ---- commands --------------------------------------------------------------

int cmd_train(const RunConfig& c, std::ostream& out) {
  if (c.inputs.size() != 1) throw UsageError("train-ngram takes exactly one --input corpus");
  if (c.out.empty()) throw UsageError("--out is required");
  std::ifstream in(c.inputs.front());
  if (!in) throw std::runtime_error("cannot open corpus " + c.inputs.front());
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> flat;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize_words(line);
    if (toks.empty()) continue;
    flat.insert(flat.end(), toks.begin(), toks.end());
    docs.push_back(std::move(toks));
  }
  const auto model = NgramModel::train(docs, c.order, c.discount);
  model.save(c.out);
  if (!c.unigrams_out.empty()) save_unigrams(build_unigram_table(flat), c.unigrams_out);
  out << "trained order-" << c.order << " model: " << docs.size() << " documents, "
      << flat.size() << " tokens, vocabulary " << model.vocab_size() << '\n';
  return kExitOk;
}

std::uint64_t parse_k(const std::string& s, std::size_t vocab) {
  if (s == "full" || s == "V") return vocab;
  std::uint64_t k = 0;
  try {
    std::size_t used = 0;
    k = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw UsageError("bad k value '" + s + "'");
  }
  if (k < 1 || k > vocab) {
    throw UsageError("k=" + s + " outside [1, " + std::to_string(vocab) + "]");
  }
  return k;
}

int cmd_gen(const RunConfig& c, std::ostream& out) {
  if (c.model_path.empty() || c.prompts_path.empty() || c.out.empty()) {
    throw UsageError("gen needs --model, --prompts and --out");
  }
  if (c.k_list.empty()) throw UsageError("gen needs --k");
  if (!(c.temperature > 0.0)) throw UsageError("--temperature must be positive");
  const auto model = NgramModel::load(c.model_path);
  std::vector<std::string> prompts;
  {
    std::ifstream in(c.prompts_path);
    if (!in) throw std::runtime_error("cannot open prompts " + c.prompts_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) prompts.push_back(line);
    }
  }
  std::vector<std::uint64_t> ks;
  for (const auto& s : c.k_list) ks.push_back(parse_k(s, model.vocab_size()));

  std::vector<EvalRecord> records;
  for (auto k : ks) {
    std::vector<EvalRecord> batch(prompts.size());
    parallel_for(prompts.size(), c.workers, [&](std::size_t i) {
      SamplerConfig cfg;
      cfg.k = k;
      cfg.temperature = c.temperature;
      cfg.target_len = c.target_len;
      cfg.seed = derive_seed(c.seed, i);
      const auto prompt_toks = tokenize_words(prompts[i]);
      auto g = generate(model, prompt_toks, cfg);
      char id[64];
      std::snprintf(id, sizeof id, "-k%llu-%05zu", static_cast<unsigned long long>(k), i);
      EvalRecord r;
      r.id = c.model_name + id;
      r.model = c.model_name;
      r.k = k;
      r.prompt_text = prompts[i];
      r.story_text = join(g.tokens);
      r.sent_bounds = split_sentences(g.tokens);
      r.tokens = std::move(g.tokens);
      r.trace = std::move(g.trace);
      validate(r);
      batch[i] = std::move(r);
    });
    records.insert(records.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
  }
  if (auto parent = fs::path(c.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_records(c.out, records);

  auto config = base_config(c);
  config["model_name"] = c.model_name;
  config["k"] = [&] {
    std::string s;
    for (auto k : ks) s += (s.empty() ? "" : ",") + std::to_string(k);
    return s;
  }();
  config["temperature"] = num(c.temperature);
  config["target_len"] = std::to_string(c.target_len);
  const auto inputs = input_hashes({c.model_path, c.prompts_path});
  for (const auto& [k, v] : inputs) config["input:" + k] = v;
  const auto fp = config_fingerprint(config);
  write_manifest(c.out + ".manifest.json", config, fp, inputs, {}, {c.out});
  out << "generated " << records.size() << " stories (" << prompts.size() << " prompts x "
      << ks.size() << " k values) -> " << c.out << '\n';
  return kExitOk;
}

int cmd_baseline(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) throw UsageError("--out is required");
  const auto records = read_inputs(c, err);
  BaselineStats stats;
  const auto kept = build_human_baseline(records, &stats);
  if (auto parent = fs::path(c.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_records(c.out, kept);
  out << "kept " << stats.kept << ", dropped " << stats.dropped_short << " short";
  if (stats.dropped_not_human) out << " and " << stats.dropped_not_human << " non-human";
  out << " -> " << c.out << '\n';
  return kExitOk;
}

Resources resolve_resources(const RunConfig& c, std::ostream& err) {
  std::string dir = c.resources;
  if (dir.empty()) {
    if (const char* env = std::getenv("STORYEVAL_RESOURCES")) dir = env;
  }
  if (dir.empty()) {
    err << "warning: no resource directory; lexicon-based metrics are skipped\n";
    return {};
  }
  if (!fs::is_directory(dir)) throw UsageError("resource directory not found: " + dir);
  return load_resource_dir(dir);
}

int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ensure_dir(c.out);
  auto scope = parse_pc_scope(c.pc_scope);
  if (!scope) throw UsageError("--pc-scope must be group, corpus or record");
  if (!(c.sif_a > 0.0)) throw UsageError("--sif-a must be positive");
  const auto records = read_inputs(c, err);
  const auto res = resolve_resources(c, err);

  EvalConfig cfg;
  cfg.sif.a = c.sif_a;
  cfg.sif.pc_removal = !c.no_pc_removal;
  cfg.sif.pc_scope = *scope;
  cfg.concreteness.include_propn = c.include_propn;
  cfg.concreteness.include_aux = c.include_aux;
  cfg.workers = c.workers;

  auto config = base_config(c);
  config["sif_a"] = num(c.sif_a);
  config["pc_removal"] = c.no_pc_removal ? "0" : "1";
  config["pc_scope"] = std::string(to_string(*scope));
  config["include_propn"] = c.include_propn ? "1" : "0";
  config["include_aux"] = c.include_aux ? "1" : "0";
  for (const auto& [name, h] : res.hashes) config["resource:" + name] = h;
  const auto inputs = input_hashes(c.inputs);
  for (const auto& [k, v] : inputs) config["input:" + k] = v;
  const auto fp = config_fingerprint(config);

  const auto metrics = evaluate_records(records, res, cfg);
  const std::string metrics_path = (fs::path(c.out) / "metrics.jsonl").string();
  write_metrics(metrics_path, metrics, fp);
  const auto values = to_metric_values(metrics);
  const auto report = aggregate(values, fp);
  auto written = emit_report_files(report, c.out, {}, err);
  written.insert(written.begin(), metrics_path);
  write_manifest((fs::path(c.out) / "manifest.json").string(), config, fp, inputs, res.hashes,
                 written);
  out << "evaluated " << records.size() << " records, " << report.rows.size()
      << " report rows -> " << c.out << '\n';
  return kExitOk;
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ensure_dir(c.out);
  if (c.inputs.empty()) throw UsageError("report needs at least one --input metrics file");
  std::vector<RecordMetrics> all;
  std::set<std::string> upstream;
  for (const auto& p : c.inputs) {
    auto m = load_metrics(p);
    all.insert(all.end(), m.begin(), m.end());
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      upstream.insert(Json::parse(line).value("fingerprint", ""));
    }
  }
  auto config = base_config(c);
  std::string joined;
  for (const auto& f : upstream) joined += f + ";";
  config["upstream"] = joined;
  const auto inputs = input_hashes(c.inputs);
  for (const auto& [k, v] : inputs) config["input:" + k] = v;
  const auto fp = config_fingerprint(config);

  const auto values = to_metric_values(all);
  const auto report = aggregate(values, fp);
  if (report.rows.empty()) throw std::runtime_error("no metric values to report");
  std::vector<std::string> written;
  try {
    written = emit_report_files(report, c.out, c.chart_metrics, err);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_manifest((fs::path(c.out) / "manifest.json").string(), config, fp, inputs, {}, written);
  out << "report: " << report.rows.size() << " rows from " << all.size() << " records -> "
      << c.out << '\n';
  return kExitOk;
}

int cmd_probe(const std::string& kind, const RunConfig& c, std::ostream& out, std::ostream& err) {
  ensure_dir(c.out);
  auto policy = parse_tie_policy(c.tie_policy);
  if (!policy) throw UsageError("--tie-policy must be strict or lenient");
  const int sources = (!c.model_path.empty()) + (!c.scores_path.empty()) + (c.random_scorer ? 1 : 0);
  if (kind != "confidence" && sources != 1) {
    throw UsageError("probe " + kind + " needs exactly one of --model, --scores, --random");
  }
  const auto records = read_inputs(c, err);

  std::unique_ptr<LmScorer> scorer;
  std::optional<NgramModel> ngram;
  if (!c.model_path.empty()) {
    ngram = NgramModel::load(c.model_path);
  } else if (c.random_scorer) {
    scorer = std::make_unique<UniformRandomScorer>(c.seed);
  }
  const LmScorer* live = ngram ? static_cast<const LmScorer*>(&*ngram) : scorer.get();
  std::optional<ScoreTable> table;
  if (!c.scores_path.empty()) table = ScoreTable::load(c.scores_path);

  auto config = base_config(c);
  config["probe"] = kind;
  config["tie_policy"] = std::string(to_string(*policy));
  config["scorer"] = c.random_scorer ? "random" : !c.model_path.empty() ? "ngram" : !c.scores_path.empty() ? "table" : "trace";
  std::vector<std::string> input_paths = c.inputs;
  if (!c.model_path.empty()) input_paths.push_back(c.model_path);
  if (!c.scores_path.empty()) input_paths.push_back(c.scores_path);
  const auto inputs = input_hashes(input_paths);
  for (const auto& [k, v] : inputs) config["input:" + k] = v;

  Json result;
  result["probe"] = kind;
  if (kind == "rank") {
    RankingResult r;
    if (table) {
      r = prompt_ranking_from_table(*table, records, *policy);
    } else {
      const auto pool = collect_prompts(records);
      try {
        r = prompt_ranking_accuracy(*live, records, pool, c.seed, *policy, c.workers);
      } catch (const std::invalid_argument& e) {
        throw ValidationError(0, e.what());
      }
    }
    result["prompt_ranking_acc"] = r.accuracy;
    result["stories"] = r.stories;
    result["successes"] = r.successes;
  } else if (kind == "swap") {
    SwapResult r = table ? swap_probe_from_table(*table, records, *policy)
                         : swap_probe(*live, records, *policy, c.workers);
    result["swap_error_rate"] = r.error_rate;
    Json ranks = Json::object();
    for (std::size_t p = 0; p < kSwapPositions; ++p) ranks[std::to_string(p + 1)] = r.mean_rank[p];
    result["swap_mean_rank"] = std::move(ranks);
    result["evaluated"] = r.evaluated;
    result["skipped"] = r.skipped;
  } else {
    config["horizon"] = std::to_string(c.horizon);
    config["teacher_force"] = c.teacher_force ? "1" : "0";
    std::vector<TokenTrace> traces;
    std::vector<std::size_t> counts;
    for (const auto& r : records) {
      if (c.teacher_force) {
        if (!ngram) throw UsageError("--teacher-force needs --model");
        traces.push_back(ngram->teacher_force(prompt_tokens_of(r), r.tokens));
      } else if (r.trace) {
        traces.push_back(*r.trace);
      } else {
        continue;
      }
      counts.push_back(r.tokens.size());
    }
    if (traces.empty()) throw ValidationError(0, "no record carries a trace");
    ConfidenceCurve curve;
    try {
      curve = confidence_curve(traces, c.horizon);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(0, e.what());
    }
    double lp = 0.0;
    for (const auto& t : traces) lp += story_logprob(t);
    result["confidence_curve"] = curve.mean_prob;
    result["used"] = curve.used;
    result["excluded"] = curve.excluded;
    result["story_logprob_mean"] = lp / static_cast<double>(traces.size());
    result["word_perplexity"] = word_perplexity(traces, counts);
  }
  const auto fp = config_fingerprint(config);
  result["fingerprint"] = fp;
  const std::string path = (fs::path(c.out) / ("probe_" + kind + ".json")).string();
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << result.dump(2) << '\n';
  }
  write_manifest((fs::path(c.out) / ("probe_" + kind + ".manifest.json")).string(), config, fp,
                 inputs, {}, {path});
  out << result.dump() << '\n';
  return kExitOk;
}

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--seed", c.seed, "Global seed; every random stream derives from it");
  app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--skip-invalid", c.skip_invalid, "Warn about and skip invalid records");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"storyeval: evaluation engine for open-ended story generation"};
  app.name("storyeval");
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train-ngram", "Train the reference n-gram model");
  train->add_option("--input", c.inputs, "Corpus, one document per line")->required();
  train->add_option("--out", c.out, "Model file")->required();
  train->add_option("--order", c.order, "N-gram order")->check(CLI::PositiveNumber);
  train->add_option("--discount", c.discount, "Absolute discount in (0, 1]");
  train->add_option("--unigrams-out", c.unigrams_out, "Also write a unigram table");

  auto* gen = app.add_subcommand("gen", "Generate stories with top-k sampling");
  gen->add_option("--model", c.model_path, "n-gram model file")->required();
  gen->add_option("--prompts", c.prompts_path, "Prompts, one per line")->required();
  gen->add_option("--k", c.k_list, "k values (integers, or 'full')")->delimiter(',')->required();
  gen->add_option("--out", c.out, "Output records file")->required();
  gen->add_option("--target-len", c.target_len, "Words per story")->check(CLI::PositiveNumber);
  gen->add_option("--temperature", c.temperature, "Softmax temperature");
  gen->add_option("--model-name", c.model_name, "Model name written into records");
  add_common(gen, c);

  auto* baseline = app.add_subcommand("baseline", "Cut human stories to 150 words");
  baseline->add_option("--input", c.inputs, "Records file(s)")->required();
  baseline->add_option("--out", c.out, "Output records file")->required();
  add_common(baseline, c);

  auto* eval = app.add_subcommand("eval", "Per-record metrics and report");
  eval->add_option("--input", c.inputs, "Records file(s)")->required();
  eval->add_option("--resources", c.resources, "Resource directory (or $STORYEVAL_RESOURCES)");
  eval->add_option("--out", c.out, "Output directory")->required();
  eval->add_option("--pc-scope", c.pc_scope, "SIF principal component scope: group|corpus|record");
  eval->add_option("--sif-a", c.sif_a, "SIF weight parameter a");
  eval->add_flag("--no-pc-removal", c.no_pc_removal, "Keep the first principal component");
  eval->add_flag("--include-propn", c.include_propn, "Count PROPN as nouns for concreteness");
  eval->add_flag("--include-aux", c.include_aux, "Count AUX as verbs for concreteness");
  add_common(eval, c);

  auto* report = app.add_subcommand("report", "Aggregate per-record metrics; emit CSV and SVG");
  report->add_option("--input", c.inputs, "metrics.jsonl file(s)")->required();
  report->add_option("--out", c.out, "Output directory")->required();
  report->add_option("--metric", c.chart_metrics, "Chart only these metrics");
  add_common(report, c);

  auto* probe = app.add_subcommand("probe", "Model probes");
  probe->require_subcommand(1);
  std::string probe_kind;
  for (const char* kind : {"rank", "swap", "confidence"}) {
    auto* sub = probe->add_subcommand(kind, std::string("Run the ") + kind + " probe");
    sub->add_option("--input", c.inputs, "Records file(s)")->required();
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_option("--model", c.model_path, "Score with an n-gram model file");
    sub->add_option("--scores", c.scores_path, "Score table keyed <id>#orig/#swap<i>/#prompt<j>");
    sub->add_flag("--random", c.random_scorer, "Uniform-random scorer (chance baseline)");
    sub->add_option("--tie-policy", c.tie_policy, "strict (ties are failures) or lenient");
    if (std::string(kind) == "confidence") {
      sub->add_option("--horizon", c.horizon, "Word positions")->check(CLI::PositiveNumber);
      sub->add_flag("--teacher-force", c.teacher_force, "Score record text with --model");
    }
    add_common(sub, c);
    sub->callback([&probe_kind, kind] { probe_kind = kind; });
  }

  std::vector<std::string> argv_store = {"storyeval"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (train->parsed()) {
      c.command = "train-ngram";
      return cmd_train(c, out);
    }
    if (gen->parsed()) {
      c.command = "gen";
      return cmd_gen(c, out);
    }
    if (baseline->parsed()) {
      c.command = "baseline";
      return cmd_baseline(c, out, err);
    }
    if (eval->parsed()) {
      c.command = "eval";
      return cmd_eval(c, out, err);
    }
    if (report->parsed()) {
      c.command = "report";
      return cmd_report(c, out, err);
    }
    c.command = "probe " + probe_kind;
    return cmd_probe(probe_kind, c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "invalid record: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "invalid record: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace storyeval
