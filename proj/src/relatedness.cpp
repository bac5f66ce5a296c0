#include "storyeval/relatedness.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>

#include "storyeval/textops.hpp"

namespace storyeval {

std::optional<double> ngram_overlap(std::span<const std::string> story,
                                    std::span<const std::string> prompt,
                                    std::size_t n) {
  const auto story_set = extract_ngrams(story, n);
  if (story_set.total == 0) return std::nullopt;
  const auto prompt_set = extract_ngrams(prompt, n);
  std::size_t hits = 0;
  for (const auto& [g, c] : story_set.counts) {
    if (prompt_set.contains(g)) hits += c;
  }
  return static_cast<double>(hits) / static_cast<double>(story_set.total);
}

std::string_view to_string(PcScope scope) {
  switch (scope) {
    case PcScope::kGroup: return "group";
    case PcScope::kCorpus: return "corpus";
    case PcScope::kRecord: return "record";
  }
  return "group";
}

std::optional<PcScope> parse_pc_scope(std::string_view name) {
  if (name == "group") return PcScope::kGroup;
  if (name == "corpus") return PcScope::kCorpus;
  if (name == "record") return PcScope::kRecord;
  return std::nullopt;
}

std::optional<Vec> sif_embed(std::span<const std::string> sentence,
                             const EmbeddingTable& emb,
                             const UnigramTable& unigrams, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("SIF weight parameter must be positive");
  Vec acc(emb.dimension(), 0.0);
  std::size_t m = 0;
  for (const auto& w : sentence) {
    const Vec* v = emb.find(w);
    if (!v) continue;
    const double weight = a / (a + unigrams.prob(w));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * (*v)[i];
    ++m;
  }
  if (m == 0) return std::nullopt;
  for (double& x : acc) x /= static_cast<double>(m);
  return acc;
}

PcRemoval remove_first_pc(const std::vector<Vec>& batch) {
  if (batch.size() < 2) {
    throw std::invalid_argument("principal component removal needs at least two vectors");
  }
  const auto d = static_cast<Eigen::Index>(batch.front().size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(batch.size()), d);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    if (static_cast<Eigen::Index>(batch[r].size()) != d) {
      throw std::invalid_argument("batch vectors differ in dimension");
    }
    x.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(batch[r].data(), d);
  }

  // Uncentered, as a truncated SVD of the stacked batch.
  const Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  Eigen::VectorXd u = solver.eigenvectors().col(d - 1);
  u.normalize();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(u(i)) > 1e-12) {
      if (u(i) < 0) u = -u;
      break;
    }
  }

  PcRemoval out;
  out.component.assign(u.data(), u.data() + d);
  out.residuals.reserve(batch.size());
  out.degenerate.reserve(batch.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd v = x.row(r).transpose();
    Eigen::VectorXd res = v - u * u.dot(v);
    res -= u * u.dot(res);  // second pass tightens orthogonality
    const double scale = v.norm();
    out.degenerate.push_back(scale == 0.0 || res.norm() <= 1e-9 * scale);
    out.residuals.emplace_back(res.data(), res.data() + d);
  }
  return out;
}

double cosine(const Vec& x, const Vec& y) {
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

std::vector<std::optional<double>> story_prompt_similarity(
    std::span<const EvalRecord> batch, const EmbeddingTable& emb,
    const UnigramTable& unigrams, const SifConfig& cfg) {
  struct Slot {
    std::size_t record;
    bool is_prompt;
  };
  std::vector<Vec> vectors;
  std::vector<Slot> slots;

  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto& rec = batch[r];
    const auto ptoks = prompt_tokens_of(rec);
    for (const auto& s : split_sentences(ptoks)) {
      std::span<const std::string> sent(ptoks.data() + s.begin, s.size());
      if (auto v = sif_embed(sent, emb, unigrams, cfg.a)) {
        vectors.push_back(std::move(*v));
        slots.push_back({r, true});
      }
    }
    for (const auto& s : rec.sent_bounds) {
      std::span<const std::string> sent(rec.tokens.data() + s.begin, s.size());
      if (auto v = sif_embed(sent, emb, unigrams, cfg.a)) {
        vectors.push_back(std::move(*v));
        slots.push_back({r, false});
      }
    }
  }

  std::vector<bool> usable(vectors.size(), true);
  if (cfg.pc_removal) {
    if (vectors.size() >= 2) {
      auto pc = remove_first_pc(vectors);
      vectors = std::move(pc.residuals);
      for (std::size_t i = 0; i < usable.size(); ++i) usable[i] = !pc.degenerate[i];
    } else {
      std::fill(usable.begin(), usable.end(), false);
    }
  } else {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      double sq = 0;
      for (double x : vectors[i]) sq += x * x;
      usable[i] = sq > 0.0;
    }
  }

  std::vector<std::vector<std::size_t>> prompt_ix(batch.size()), story_ix(batch.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!usable[i]) continue;
    (slots[i].is_prompt ? prompt_ix : story_ix)[slots[i].record].push_back(i);
  }

  std::vector<std::optional<double>> out(batch.size());
  for (std::size_t r = 0; r < batch.size(); ++r) {
    if (prompt_ix[r].empty() || story_ix[r].empty()) continue;
    double sum = 0.0;
    for (auto p : prompt_ix[r]) {
      for (auto s : story_ix[r]) sum += cosine(vectors[p], vectors[s]);
    }
    out[r] = sum / static_cast<double>(prompt_ix[r].size() * story_ix[r].size());
  }
  return out;
}

std::optional<double> story_prompt_similarity(const EvalRecord& rec,
                                              const EmbeddingTable& emb,
                                              const UnigramTable& unigrams,
                                              const SifConfig& cfg) {
  return story_prompt_similarity(std::span<const EvalRecord>(&rec, 1), emb,
                                 unigrams, cfg)
      .front();
}

std::string normalize_text(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

std::vector<std::string> entity_mentions(const std::vector<AnnotatedToken>& annos) {
  std::vector<std::string> out;
  std::string current;
  std::string type;
  auto flush = [&] {
    if (!current.empty()) out.push_back(normalize_text(current));
    current.clear();
    type.clear();
  };
  for (const auto& a : annos) {
    if (a.ent == "O") {
      flush();
      continue;
    }
    const std::string t = a.ent.substr(2);
    // An I- tag that does not continue a same-type span opens a new one.
    if (a.ent[0] == 'B' || t != type) {
      flush();
      type = t;
      current = a.surface;
    } else {
      current += ' ';
      current += a.surface;
    }
  }
  flush();
  return out;
}

EntityUsage entity_usage(const EvalRecord& rec) {
  EntityUsage usage;
  if (rec.annotations) {
    const auto mentions = entity_mentions(*rec.annotations);
    usage.unique_entities = std::set<std::string>(mentions.begin(), mentions.end()).size();
  }
  if (rec.prompt_annotations) {
    const auto prompt_mentions = entity_mentions(*rec.prompt_annotations);
    const std::set<std::string> distinct(prompt_mentions.begin(), prompt_mentions.end());
    if (!distinct.empty()) {
      const std::string story = normalize_text(join(rec.tokens));
      std::size_t found = 0;
      for (const auto& e : distinct) found += story.find(e) != std::string::npos ? 1 : 0;
      usage.rate = static_cast<double>(found) / static_cast<double>(distinct.size());
    }
  }
  return usage;
}

RelatednessMetrics compute_relatedness(const EvalRecord& rec) {
  RelatednessMetrics m;
  const auto prompt = prompt_tokens_of(rec);
  for (std::size_t n = 1; n <= 3; ++n) m.overlap[n - 1] = ngram_overlap(rec.tokens, prompt, n);
  const auto usage = entity_usage(rec);
  m.entity_usage_rate = usage.rate;
  m.unique_entities = usage.unique_entities;
  return m;
}

}  // namespace storyeval
