#pragma once

// Canonical evaluation records: one (prompt, story) pair per line of a
// line-delimited JSON file, with word tokens, sentence ranges, optional
// per-token annotations and an optional subword probability trace.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace storyeval {

/// The 17 universal part-of-speech categories.
enum class Upos : std::uint8_t {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT,
  SCONJ, SYM, VERB, X,
};

inline constexpr std::size_t kUposCount = 17;

std::string_view to_string(Upos tag);
std::optional<Upos> parse_upos(std::string_view name);

/// Half-open token range [begin, end).
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const SentenceRange&, const SentenceRange&) = default;
};

struct AnnotatedToken {
  std::string surface;
  std::string lemma;
  Upos pos = Upos::X;
  std::string ent = "O";  // "O" or B-TYPE / I-TYPE

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

/// Subword log probabilities grouped onto word-level tokens by word_ix.
struct TokenTrace {
  std::vector<double> sub_logp;
  std::vector<std::size_t> word_ix;
  std::uint64_t vocab_size = 1;

  friend bool operator==(const TokenTrace&, const TokenTrace&) = default;
};

struct EvalRecord {
  std::string id;
  std::string model;
  std::optional<std::uint64_t> k;  // absent for human text
  std::string prompt_text;
  std::string story_text;
  std::vector<std::string> tokens;
  std::vector<SentenceRange> sent_bounds;
  std::optional<std::vector<AnnotatedToken>> annotations;
  std::optional<TokenTrace> trace;
  // Prompt-side tokenization and annotation; needed for entity usage.
  std::optional<std::vector<std::string>> prompt_tokens;
  std::optional<std::vector<AnnotatedToken>> prompt_annotations;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

bool valid_entity_tag(std::string_view ent);

/// Throws ValidationError naming the first violated invariant.
void validate(const EvalRecord& rec, std::size_t line = 0);

/// Prompt tokens, falling back to the whitespace/punctuation tokenizer.
std::vector<std::string> prompt_tokens_of(const EvalRecord& rec);

/// Decodes one JSON line. Missing tokens / sent_bounds are filled in by
/// the fallback tokenizer and sentence splitter, then the record is
/// validated. Throws ParseError or ValidationError.
EvalRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Encodes one record as a single JSON line (no trailing newline).
/// Absent optional fields are omitted.
std::string emit_record(const EvalRecord& rec);

struct ReadOptions {
  bool skip_invalid = false;
  std::function<void(const std::string&)> warn;
};

/// Streaming single-consumer reader over a records file.
class RecordReader {
 public:
  explicit RecordReader(const std::string& path, ReadOptions opts = {});

  /// Next valid record in file order, or nullopt at end of file.
  std::optional<EvalRecord> next();

  std::size_t line() const { return line_no_; }
  std::size_t skipped() const { return skipped_; }

 private:
  std::ifstream in_;
  ReadOptions opts_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
};

std::vector<EvalRecord> load_records(const std::string& path,
                                     ReadOptions opts = {});
void write_records(const std::string& path,
                   const std::vector<EvalRecord>& records);

inline constexpr std::size_t kHumanStoryWords = 150;

struct BaselineStats {
  std::size_t kept = 0;
  std::size_t dropped_short = 0;
  std::size_t dropped_not_human = 0;
};

/// Truncates a record to its first `words` tokens, cutting sentence ranges,
/// annotations and trace consistently. The story text becomes the
/// space-joined surviving tokens.
EvalRecord truncate_record(const EvalRecord& rec, std::size_t words);

/// Human-baseline subset: human records cut to exactly 150 words; shorter
/// records are dropped and counted.
std::vector<EvalRecord> build_human_baseline(
    const std::vector<EvalRecord>& records, BaselineStats* stats = nullptr,
    std::size_t words = kHumanStoryWords);

}  // namespace storyeval
