#pragma once

// Read-only lexicons shared by the metrics: word vectors, unigram
// probabilities, concreteness ratings and a stopword list.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace storyeval {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dimension,
                 std::unordered_map<std::string, std::vector<double>> entries);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }

  /// Exact match first, then the lowercased word. nullptr when absent.
  const std::vector<double>* find(std::string_view word) const;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

/// "word v1 ... vd" per line. Throws ResourceError on an empty file or a
/// row whose width differs from the first row.
EmbeddingTable load_embeddings(const std::string& path);

class UnigramTable {
 public:
  UnigramTable() = default;
  UnigramTable(std::unordered_map<std::string, double> probs,
               std::uint64_t total_tokens);

  /// p(w) for seen words, floor_prob() otherwise.
  double prob(std::string_view word) const;
  bool contains(std::string_view word) const;
  double floor_prob() const { return floor_; }
  std::uint64_t total_tokens() const { return total_; }
  const std::unordered_map<std::string, double>& probs() const { return probs_; }

 private:
  std::unordered_map<std::string, double> probs_;
  std::uint64_t total_ = 0;
  double floor_ = 1.0;
};

/// p(w) = count(w) / N; unseen words get 1 / (N + 1).
/// Throws std::invalid_argument on an empty corpus.
UnigramTable build_unigram_table(std::span<const std::string> corpus);

/// Header "#total N", then "word probability" lines sorted by word.
void save_unigrams(const UnigramTable& table, const std::string& path);
UnigramTable load_unigrams(const std::string& path);

class ConcretenessLexicon {
 public:
  ConcretenessLexicon() = default;
  explicit ConcretenessLexicon(std::unordered_map<std::string, double> ratings);

  /// Lookup by lowercased lemma.
  std::optional<double> rating(std::string_view lemma) const;
  std::size_t size() const { return ratings_.size(); }

 private:
  std::unordered_map<std::string, double> ratings_;
};

/// Two-column CSV "lemma,rating" with a header row; ratings must lie in [1,5].
ConcretenessLexicon load_concreteness(const std::string& path);

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::unordered_set<std::string> words);

  bool contains_lower(std::string_view lowered) const;
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

 private:
  std::unordered_set<std::string> words_;
};

/// One word per line; entries are lowercased.
StopwordList load_stopwords(const std::string& path);

/// Everything the metrics may consult. Absent members disable the metrics
/// that need them.
struct Resources {
  std::optional<EmbeddingTable> embeddings;
  std::optional<UnigramTable> unigrams;
  std::optional<ConcretenessLexicon> concreteness;
  std::optional<StopwordList> stopwords;
  // content hashes of the files actually loaded, keyed by file name
  std::vector<std::pair<std::string, std::string>> hashes;
};

inline constexpr const char* kEmbeddingsFile = "embeddings.txt";
inline constexpr const char* kUnigramsFile = "unigrams.txt";
inline constexpr const char* kConcretenessFile = "concreteness.csv";
inline constexpr const char* kStopwordsFile = "stopwords.txt";

/// Loads whichever of the four standard files exist in `dir`.
Resources load_resource_dir(const std::string& dir);

}  // namespace storyeval
