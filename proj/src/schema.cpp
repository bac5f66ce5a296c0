#include "storyeval/schema.hpp"

#include <array>
#include <cmath>
#include <json.hpp>

#include "storyeval/error.hpp"
#include "storyeval/textops.hpp"

namespace storyeval {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, kUposCount> kUposNames = {
    "ADJ",  "ADP",   "ADV",  "AUX",   "CCONJ", "DET",   "INTJ", "NOUN", "NUM",
    "PART", "PRON",  "PROPN", "PUNCT", "SCONJ", "SYM",  "VERB", "X"};

const Json& require(const Json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(line, field, "missing required field");
  return *it;
}

std::string as_string(const Json& v, const char* field, std::size_t line) {
  if (!v.is_string()) throw ParseError(line, field, "expected a string");
  return v.get<std::string>();
}

std::uint64_t as_uint(const Json& v, const char* field, std::size_t line) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    auto x = v.get<std::int64_t>();
    if (x < 0) throw ParseError(line, field, "expected a non-negative integer");
    return static_cast<std::uint64_t>(x);
  }
  throw ParseError(line, field, "expected an integer");
}

std::vector<std::string> as_string_list(const Json& v, const char* field,
                                        std::size_t line) {
  if (!v.is_array()) throw ParseError(line, field, "expected an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_string(e, field, line));
  return out;
}

std::vector<AnnotatedToken> parse_annos(const Json& v, const char* field,
                                        std::size_t line) {
  if (!v.is_array()) throw ParseError(line, field, "expected an array");
  std::vector<AnnotatedToken> out;
  out.reserve(v.size());
  for (const auto& a : v) {
    if (!a.is_object()) throw ParseError(line, field, "expected objects");
    AnnotatedToken tok;
    tok.surface = as_string(require(a, "t", line), "t", line);
    tok.lemma = as_string(require(a, "lemma", line), "lemma", line);
    auto pos_name = as_string(require(a, "pos", line), "pos", line);
    auto pos = parse_upos(pos_name);
    if (!pos) {
      throw ValidationError(line, "annotation pos '" + pos_name +
                                      "' is not a UPOS tag");
    }
    tok.pos = *pos;
    tok.ent = as_string(require(a, "ent", line), "ent", line);
    out.push_back(std::move(tok));
  }
  return out;
}

Json annos_to_json(const std::vector<AnnotatedToken>& annos) {
  Json arr = Json::array();
  for (const auto& a : annos) {
    Json o;
    o["t"] = a.surface;
    o["lemma"] = a.lemma;
    o["pos"] = std::string(to_string(a.pos));
    o["ent"] = a.ent;
    arr.push_back(std::move(o));
  }
  return arr;
}

void check_annotations(const std::vector<AnnotatedToken>& annos,
                       std::size_t n_tokens, const char* what,
                       std::size_t line) {
  if (annos.size() != n_tokens) {
    throw ValidationError(line, std::string(what) +
                                    " length differs from token count");
  }
  for (const auto& a : annos) {
    if (!valid_entity_tag(a.ent)) {
      throw ValidationError(line, "entity label '" + a.ent + "' is malformed");
    }
  }
}

}  // namespace

std::string_view to_string(Upos tag) {
  return kUposNames[static_cast<std::size_t>(tag)];
}

std::optional<Upos> parse_upos(std::string_view name) {
  for (std::size_t i = 0; i < kUposNames.size(); ++i) {
    if (kUposNames[i] == name) return static_cast<Upos>(i);
  }
  return std::nullopt;
}

bool valid_entity_tag(std::string_view ent) {
  if (ent == "O") return true;
  if (ent.size() < 3) return false;
  if ((ent[0] != 'B' && ent[0] != 'I') || ent[1] != '-') return false;
  for (char c : ent.substr(2)) {
    if (!((c >= 'A' && c <= 'Z') || c == '_')) return false;
  }
  return true;
}

void validate(const EvalRecord& rec, std::size_t line) {
  const std::size_t n = rec.tokens.size();

  std::size_t cursor = 0;
  for (const auto& r : rec.sent_bounds) {
    if (r.begin != cursor || r.end <= r.begin) {
      throw ValidationError(line, "sentence bounds do not cover tokens");
    }
    cursor = r.end;
  }
  if (cursor != n) {
    throw ValidationError(line, "sentence bounds do not cover tokens");
  }

  if (rec.annotations) check_annotations(*rec.annotations, n, "annotations", line);

  if (rec.prompt_annotations) {
    check_annotations(*rec.prompt_annotations, prompt_tokens_of(rec).size(),
                      "prompt annotations", line);
  }

  if (rec.k && *rec.k < 1) throw ValidationError(line, "k must be at least 1");

  if (rec.trace) {
    const auto& t = *rec.trace;
    if (t.vocab_size < 1) {
      throw ValidationError(line, "trace vocab_size must be positive");
    }
    if (t.word_ix.size() != t.sub_logp.size()) {
      throw ValidationError(line, "trace word_ix length differs from sub_logp");
    }
    for (double lp : t.sub_logp) {
      if (std::isnan(lp) || lp > 0.0) {
        throw ValidationError(line, "trace log probability above zero");
      }
    }
    for (std::size_t i = 0; i < t.word_ix.size(); ++i) {
      if (t.word_ix[i] >= n) {
        throw ValidationError(line, "trace word_ix out of token range");
      }
      if (i > 0 && t.word_ix[i] < t.word_ix[i - 1]) {
        throw ValidationError(line, "trace word_ix decreasing");
      }
    }
    if (rec.k && *rec.k > t.vocab_size) {
      throw ValidationError(line, "k exceeds trace vocab_size");
    }
  }
}

std::vector<std::string> prompt_tokens_of(const EvalRecord& rec) {
  if (rec.prompt_tokens) return *rec.prompt_tokens;
  return tokenize_words(rec.prompt_text);
}

EvalRecord parse_record(std::string_view line, std::size_t line_no) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, "<record>", e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "<record>", "expected an object");

  EvalRecord rec;
  rec.id = as_string(require(j, "id", line_no), "id", line_no);
  rec.model = as_string(require(j, "model", line_no), "model", line_no);
  if (auto it = j.find("k"); it != j.end()) rec.k = as_uint(*it, "k", line_no);
  if (auto it = j.find("prompt"); it != j.end()) {
    rec.prompt_text = as_string(*it, "prompt", line_no);
  }
  rec.story_text = as_string(require(j, "story", line_no), "story", line_no);

  if (auto it = j.find("tokens"); it != j.end()) {
    rec.tokens = as_string_list(*it, "tokens", line_no);
  } else {
    rec.tokens = tokenize_words(rec.story_text);
  }

  if (auto it = j.find("sent_bounds"); it != j.end()) {
    if (!it->is_array()) throw ParseError(line_no, "sent_bounds", "expected an array");
    for (const auto& b : *it) {
      if (!b.is_array() || b.size() != 2) {
        throw ParseError(line_no, "sent_bounds", "expected [begin, end] pairs");
      }
      rec.sent_bounds.push_back({static_cast<std::size_t>(as_uint(b[0], "sent_bounds", line_no)),
                                 static_cast<std::size_t>(as_uint(b[1], "sent_bounds", line_no))});
    }
  } else {
    rec.sent_bounds = split_sentences(rec.tokens);
  }

  if (auto it = j.find("annos"); it != j.end()) {
    rec.annotations = parse_annos(*it, "annos", line_no);
  }
  if (auto it = j.find("prompt_tokens"); it != j.end()) {
    rec.prompt_tokens = as_string_list(*it, "prompt_tokens", line_no);
  }
  if (auto it = j.find("prompt_annos"); it != j.end()) {
    rec.prompt_annotations = parse_annos(*it, "prompt_annos", line_no);
  }

  if (auto it = j.find("trace"); it != j.end()) {
    const Json& t = *it;
    if (!t.is_object()) throw ParseError(line_no, "trace", "expected an object");
    TokenTrace trace;
    const Json& lp = require(t, "sub_logp", line_no);
    if (!lp.is_array()) throw ParseError(line_no, "sub_logp", "expected an array");
    for (const auto& v : lp) {
      if (!v.is_number()) throw ParseError(line_no, "sub_logp", "expected numbers");
      trace.sub_logp.push_back(v.get<double>());
    }
    const Json& wi = require(t, "word_ix", line_no);
    if (!wi.is_array()) throw ParseError(line_no, "word_ix", "expected an array");
    for (const auto& v : wi) {
      trace.word_ix.push_back(static_cast<std::size_t>(as_uint(v, "word_ix", line_no)));
    }
    trace.vocab_size = as_uint(require(t, "vocab_size", line_no), "vocab_size", line_no);
    rec.trace = std::move(trace);
  }

  validate(rec, line_no);
  return rec;
}

std::string emit_record(const EvalRecord& rec) {
  Json j;
  j["id"] = rec.id;
  j["model"] = rec.model;
  if (rec.k) j["k"] = *rec.k;
  j["prompt"] = rec.prompt_text;
  j["story"] = rec.story_text;
  j["tokens"] = rec.tokens;
  Json bounds = Json::array();
  for (const auto& r : rec.sent_bounds) bounds.push_back({r.begin, r.end});
  j["sent_bounds"] = std::move(bounds);
  if (rec.annotations) j["annos"] = annos_to_json(*rec.annotations);
  if (rec.prompt_tokens) j["prompt_tokens"] = *rec.prompt_tokens;
  if (rec.prompt_annotations) j["prompt_annos"] = annos_to_json(*rec.prompt_annotations);
  if (rec.trace) {
    Json t;
    t["sub_logp"] = rec.trace->sub_logp;
    t["word_ix"] = rec.trace->word_ix;
    t["vocab_size"] = rec.trace->vocab_size;
    j["trace"] = std::move(t);
  }
  return j.dump();
}

RecordReader::RecordReader(const std::string& path, ReadOptions opts)
    : in_(path), opts_(std::move(opts)) {
  if (!in_) throw std::runtime_error("cannot open records file: " + path);
}

std::optional<EvalRecord> RecordReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      return parse_record(line, line_no_);
    } catch (const std::runtime_error& e) {
      const bool recoverable = dynamic_cast<const ParseError*>(&e) ||
                               dynamic_cast<const ValidationError*>(&e);
      if (!opts_.skip_invalid || !recoverable) throw;
      ++skipped_;
      if (opts_.warn) opts_.warn(std::string("skipping invalid record: ") + e.what());
    }
  }
  return std::nullopt;
}

std::vector<EvalRecord> load_records(const std::string& path, ReadOptions opts) {
  RecordReader reader(path, std::move(opts));
  std::vector<EvalRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

void write_records(const std::string& path,
                   const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write records file: " + path);
  for (const auto& r : records) out << emit_record(r) << '\n';
}

EvalRecord truncate_record(const EvalRecord& rec, std::size_t words) {
  EvalRecord out = rec;
  if (rec.tokens.size() <= words) return out;

  out.tokens.resize(words);
  out.sent_bounds.clear();
  for (const auto& r : rec.sent_bounds) {
    if (r.begin >= words) break;
    out.sent_bounds.push_back({r.begin, std::min(r.end, words)});
  }
  if (out.annotations) out.annotations->resize(words);
  if (out.trace) {
    TokenTrace t;
    t.vocab_size = rec.trace->vocab_size;
    for (std::size_t i = 0; i < rec.trace->word_ix.size(); ++i) {
      if (rec.trace->word_ix[i] >= words) break;
      t.sub_logp.push_back(rec.trace->sub_logp[i]);
      t.word_ix.push_back(rec.trace->word_ix[i]);
    }
    out.trace = std::move(t);
  }
  out.story_text = join(out.tokens);
  return out;
}

std::vector<EvalRecord> build_human_baseline(
    const std::vector<EvalRecord>& records, BaselineStats* stats,
    std::size_t words) {
  BaselineStats local;
  std::vector<EvalRecord> out;
  for (const auto& rec : records) {
    if (rec.model != "human") {
      ++local.dropped_not_human;
      continue;
    }
    if (rec.tokens.size() < words) {
      ++local.dropped_short;
      continue;
    }
    out.push_back(truncate_record(rec, words));
    ++local.kept;
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace storyeval
