#include "storyeval/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <stdexcept>

#include "storyeval/parallel.hpp"
#include "storyeval/probes.hpp"

namespace storyeval {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> build_names() {
  std::vector<std::string> names = {"distinct_1", "distinct_2", "distinct_3",
                                    "mean_log_unigram", "stopword_frac", "mean_sent_len",
                                    "pos_distinct_1", "pos_distinct_2", "pos_distinct_3"};
  for (std::size_t t = 0; t < kUposCount; ++t) {
    names.push_back("pos_" + std::string(to_string(static_cast<Upos>(t))));
  }
  for (const char* n : {"noun_concreteness", "verb_concreteness", "overlap_1", "overlap_2",
                        "overlap_3", "sent_similarity", "entity_usage_rate",
                        "unique_entities", "story_logprob", "story_words"}) {
    names.emplace_back(n);
  }
  return names;
}

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = build_names();
  return names;
}

std::optional<double> RecordMetrics::get(std::string_view metric) const {
  for (const auto& [name, v] : values) {
    if (name == metric) return v;
  }
  return std::nullopt;
}

std::vector<RecordMetrics> evaluate_records(std::span<const EvalRecord> records,
                                            const Resources& res, const EvalConfig& cfg) {
  // Sentence similarity is a batch computation: partition by PC scope first.
  std::vector<std::optional<double>> similarity(records.size());
  if (res.embeddings && res.unigrams) {
    std::vector<std::vector<std::size_t>> batches;
    if (cfg.sif.pc_scope == PcScope::kCorpus) {
      batches.emplace_back(records.size());
      std::iota(batches.back().begin(), batches.back().end(), std::size_t{0});
    } else if (cfg.sif.pc_scope == PcScope::kGroup) {
      std::map<std::pair<std::string, std::optional<std::uint64_t>>, std::size_t> slot;
      for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, fresh] = slot.try_emplace({records[i].model, records[i].k}, batches.size());
        if (fresh) batches.emplace_back();
        batches[it->second].push_back(i);
      }
    } else {
      for (std::size_t i = 0; i < records.size(); ++i) batches.push_back({i});
    }
    parallel_for(batches.size(), cfg.workers, [&](std::size_t b) {
      std::vector<EvalRecord> batch;
      batch.reserve(batches[b].size());
      for (auto i : batches[b]) batch.push_back(records[i]);
      auto sims = story_prompt_similarity(batch, *res.embeddings, *res.unigrams, cfg.sif);
      for (std::size_t j = 0; j < sims.size(); ++j) similarity[batches[b][j]] = sims[j];
    });
  }

  std::vector<RecordMetrics> out(records.size());
  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    const auto& rec = records[i];
    const auto intr = compute_intrinsic(rec, res, cfg.concreteness);
    const auto rel = compute_relatedness(rec);

    RecordMetrics m;
    m.id = rec.id;
    m.model = rec.model;
    m.k = rec.k;
    auto put = [&](const std::string& name, std::optional<double> v) {
      m.values.emplace_back(name, v);
    };
    for (std::size_t n = 0; n < 3; ++n) put("distinct_" + std::to_string(n + 1), intr.distinct[n]);
    put("mean_log_unigram", intr.mean_log_unigram);
    put("stopword_frac", intr.stopword_frac);
    put("mean_sent_len", intr.mean_sent_len);
    for (std::size_t n = 0; n < 3; ++n) {
      put("pos_distinct_" + std::to_string(n + 1), intr.pos_distinct[n]);
    }
    for (std::size_t t = 0; t < kUposCount; ++t) {
      std::optional<double> v;
      if (intr.pos_dist) {
        auto it = intr.pos_dist->find(static_cast<Upos>(t));
        v = it == intr.pos_dist->end() ? 0.0 : it->second;
      }
      put("pos_" + std::string(to_string(static_cast<Upos>(t))), v);
    }
    put("noun_concreteness", intr.noun_concreteness);
    put("verb_concreteness", intr.verb_concreteness);
    for (std::size_t n = 0; n < 3; ++n) put("overlap_" + std::to_string(n + 1), rel.overlap[n]);
    put("sent_similarity", similarity[i]);
    put("entity_usage_rate", rel.entity_usage_rate);
    put("unique_entities", rel.unique_entities
                               ? std::optional<double>(static_cast<double>(*rel.unique_entities))
                               : std::nullopt);
    put("story_logprob", rec.trace && !rec.trace->sub_logp.empty()
                             ? std::optional<double>(story_logprob(*rec.trace))
                             : std::nullopt);
    put("story_words", static_cast<double>(rec.tokens.size()));
    out[i] = std::move(m);
  });

  std::stable_sort(out.begin(), out.end(),
                   [](const RecordMetrics& a, const RecordMetrics& b) { return a.id < b.id; });
  return out;
}

std::vector<MetricValue> to_metric_values(std::span<const RecordMetrics> metrics) {
  std::vector<MetricValue> out;
  for (const auto& m : metrics) {
    for (const auto& [name, v] : m.values) out.push_back({name, m.model, m.k, v});
  }
  return out;
}

std::string emit_metrics_line(const RecordMetrics& m, const std::string& fingerprint) {
  Json j;
  j["id"] = m.id;
  j["model"] = m.model;
  if (m.k) j["k"] = *m.k;
  j["fingerprint"] = fingerprint;
  Json vals = Json::object();
  for (const auto& [name, v] : m.values) {
    if (v) vals[name] = *v;
  }
  j["metrics"] = std::move(vals);
  return j.dump();
}

RecordMetrics parse_metrics_line(std::string_view line) {
  const Json j = Json::parse(line);
  RecordMetrics m;
  m.id = j.at("id").get<std::string>();
  m.model = j.at("model").get<std::string>();
  if (j.contains("k")) m.k = j.at("k").get<std::uint64_t>();
  const Json& vals = j.at("metrics");
  for (const auto& name : metric_names()) {
    std::optional<double> v;
    if (auto it = vals.find(name); it != vals.end()) v = it->get<double>();
    m.values.emplace_back(name, v);
  }
  return m;
}

void write_metrics(const std::string& path, std::span<const RecordMetrics> metrics,
                   const std::string& fingerprint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& m : metrics) out << emit_metrics_line(m, fingerprint) << '\n';
}

std::vector<RecordMetrics> load_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<RecordMetrics> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_metrics_line(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace storyeval
