#include "storyeval/resources.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "storyeval/error.hpp"
#include "storyeval/hash.hpp"
#include "storyeval/textops.hpp"

namespace storyeval {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError(ResourceErrorKind::kIo, "cannot open " + path);
  return in;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

}  // namespace

EmbeddingTable::EmbeddingTable(
    std::size_t dimension,
    std::unordered_map<std::string, std::vector<double>> entries)
    : dimension_(dimension), entries_(std::move(entries)) {
  for (const auto& [w, v] : entries_) {
    if (v.size() != dimension_) {
      throw ResourceError(ResourceErrorKind::kDimensionMismatch,
                          "embedding for '" + w + "' has wrong dimension");
    }
  }
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
  if (auto it = entries_.find(std::string(word)); it != entries_.end()) {
    return &it->second;
  }
  if (auto it = entries_.find(to_lower(word)); it != entries_.end()) {
    return &it->second;
  }
  return nullptr;
}

EmbeddingTable load_embeddings(const std::string& path) {
  auto in = open_or_throw(path);
  std::unordered_map<std::string, std::vector<double>> entries;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw ResourceError(ResourceErrorKind::kMalformedLine,
                          where(path, line_no) + ": embedding row has no values");
    }
    const std::size_t d = fields.size() - 1;
    if (dim == 0) {
      dim = d;
    } else if (d != dim) {
      throw ResourceError(ResourceErrorKind::kDimensionMismatch,
                          where(path, line_no) + ": expected " +
                              std::to_string(dim) + " values, found " +
                              std::to_string(d));
    }
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) {
      auto x = parse_double(fields[i + 1]);
      if (!x) {
        throw ResourceError(ResourceErrorKind::kMalformedLine,
                            where(path, line_no) + ": bad number");
      }
      v[i] = *x;
    }
    entries.insert_or_assign(std::string(fields[0]), std::move(v));
  }
  if (entries.empty()) {
    throw ResourceError(ResourceErrorKind::kEmptyFile, path + ": no embeddings");
  }
  return EmbeddingTable(dim, std::move(entries));
}

UnigramTable::UnigramTable(std::unordered_map<std::string, double> probs,
                           std::uint64_t total_tokens)
    : probs_(std::move(probs)),
      total_(total_tokens),
      floor_(1.0 / (static_cast<double>(total_tokens) + 1.0)) {}

double UnigramTable::prob(std::string_view word) const {
  auto it = probs_.find(std::string(word));
  return it == probs_.end() ? floor_ : it->second;
}

bool UnigramTable::contains(std::string_view word) const {
  return probs_.count(std::string(word)) != 0;
}

UnigramTable build_unigram_table(std::span<const std::string> corpus) {
  if (corpus.empty()) throw std::invalid_argument("unigram corpus is empty");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& w : corpus) ++counts[w];
  const auto n = static_cast<double>(corpus.size());
  std::unordered_map<std::string, double> probs;
  probs.reserve(counts.size());
  for (const auto& [w, c] : counts) probs.emplace(w, static_cast<double>(c) / n);
  return UnigramTable(std::move(probs), corpus.size());
}

void save_unigrams(const UnigramTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError(ResourceErrorKind::kIo, "cannot write " + path);
  std::map<std::string, double> sorted(table.probs().begin(), table.probs().end());
  out << "#total " << table.total_tokens() << '\n';
  char buf[64];
  for (const auto& [w, p] : sorted) {
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << w << ' ' << buf << '\n';
  }
}

UnigramTable load_unigrams(const std::string& path) {
  auto in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::uint64_t> total;
  std::unordered_map<std::string, double> probs;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (!total) {
      std::uint64_t n = 0;
      if (fields.size() != 2 || fields[0] != "#total" ||
          std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), n).ec !=
              std::errc() ||
          n == 0) {
        throw ResourceError(ResourceErrorKind::kMalformedLine,
                            where(path, line_no) + ": expected '#total N' header");
      }
      total = n;
      continue;
    }
    auto p = fields.size() == 2 ? parse_double(fields[1]) : std::nullopt;
    if (!p || *p <= 0.0 || *p > 1.0) {
      throw ResourceError(ResourceErrorKind::kMalformedLine,
                          where(path, line_no) + ": expected 'word probability'");
    }
    probs.insert_or_assign(std::string(fields[0]), *p);
  }
  if (!total) throw ResourceError(ResourceErrorKind::kEmptyFile, path + ": empty unigram table");
  return UnigramTable(std::move(probs), *total);
}

ConcretenessLexicon::ConcretenessLexicon(
    std::unordered_map<std::string, double> ratings) {
  for (auto& [lemma, r] : ratings) {
    if (!(r >= 1.0 && r <= 5.0)) {
      throw ResourceError(ResourceErrorKind::kRatingOutOfRange,
                          "rating for '" + lemma + "' outside [1,5]");
    }
    ratings_.insert_or_assign(to_lower(lemma), r);
  }
}

std::optional<double> ConcretenessLexicon::rating(std::string_view lemma) const {
  auto it = ratings_.find(to_lower(lemma));
  if (it == ratings_.end()) return std::nullopt;
  return it->second;
}

ConcretenessLexicon load_concreteness(const std::string& path) {
  auto in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::unordered_map<std::string, double> ratings;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) {
      throw ResourceError(ResourceErrorKind::kMalformedLine,
                          where(path, line_no) + ": expected 'lemma,rating'");
    }
    auto r = parse_double(std::string_view(line).substr(comma + 1));
    if (!r) {
      throw ResourceError(ResourceErrorKind::kMalformedLine,
                          where(path, line_no) + ": bad rating");
    }
    if (!(*r >= 1.0 && *r <= 5.0)) {
      throw ResourceError(ResourceErrorKind::kRatingOutOfRange,
                          where(path, line_no) + ": rating outside [1,5]");
    }
    ratings.insert_or_assign(to_lower(line.substr(0, comma)), *r);
  }
  if (ratings.empty()) {
    throw ResourceError(ResourceErrorKind::kEmptyFile, path + ": no ratings");
  }
  return ConcretenessLexicon(std::move(ratings));
}

StopwordList::StopwordList(std::unordered_set<std::string> words) {
  for (const auto& w : words) words_.insert(to_lower(w));
}

bool StopwordList::contains_lower(std::string_view lowered) const {
  return words_.count(std::string(lowered)) != 0;
}

StopwordList load_stopwords(const std::string& path) {
  auto in = open_or_throw(path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    words.insert(to_lower(fields[0]));
  }
  if (words.empty()) {
    throw ResourceError(ResourceErrorKind::kEmptyFile, path + ": no stopwords");
  }
  return StopwordList(std::move(words));
}

Resources load_resource_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  Resources res;
  auto path_of = [&](const char* name) { return (fs::path(dir) / name).string(); };
  auto note = [&](const char* name) {
    res.hashes.emplace_back(name, file_hash(path_of(name)));
  };
  if (fs::exists(path_of(kEmbeddingsFile))) {
    res.embeddings = load_embeddings(path_of(kEmbeddingsFile));
    note(kEmbeddingsFile);
  }
  if (fs::exists(path_of(kUnigramsFile))) {
    res.unigrams = load_unigrams(path_of(kUnigramsFile));
    note(kUnigramsFile);
  }
  if (fs::exists(path_of(kConcretenessFile))) {
    res.concreteness = load_concreteness(path_of(kConcretenessFile));
    note(kConcretenessFile);
  }
  if (fs::exists(path_of(kStopwordsFile))) {
    res.stopwords = load_stopwords(path_of(kStopwordsFile));
    note(kStopwordsFile);
  }
  return res;
}

}  // namespace storyeval
