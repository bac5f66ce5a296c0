#pragma once

// Shared test helpers: scratch directories, random record generation and
// the bundled data location.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "storyeval/schema.hpp"
#include "storyeval/textops.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(STORYEVAL_DATA_DIR); }

/// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("storyeval-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline const std::vector<std::string>& small_vocab() {
  static const std::vector<std::string> v = {"the", "The", "cat", "dog", "sat", "ran",
                                             "Ada", "on",  "mat", "idea", "hope", "zzq"};
  return v;
}

/// A valid record with `sentences` sentences of 1..max_len words each,
/// drawn from small_vocab(), with annotations, prompt annotations and a
/// trace whose words are split into 1..3 subwords.
inline storyeval::EvalRecord random_record(std::mt19937_64& gen, const std::string& id,
                                           std::size_t sentences = 3, std::size_t max_len = 6) {
  using namespace storyeval;
  const auto& vocab = small_vocab();
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> tag(0, static_cast<int>(kUposCount) - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_real_distribution<double> logp(-6.0, -0.01);

  EvalRecord r;
  r.id = id;
  r.model = coin(gen) == 0 ? "human" : "toy";
  if (r.model != "human") r.k = 1 + gen() % 40;

  auto annotate = [&](const std::vector<std::string>& toks) {
    std::vector<AnnotatedToken> out;
    bool in_ent = false;
    for (const auto& t : toks) {
      AnnotatedToken a;
      a.surface = t;
      a.lemma = to_lower(t);
      a.pos = static_cast<Upos>(tag(gen));
      const int e = coin(gen);
      if (e == 0) {
        a.ent = "B-PER";
        in_ent = true;
      } else if (e == 1 && in_ent) {
        a.ent = "I-PER";
      } else {
        a.ent = "O";
        in_ent = false;
      }
      out.push_back(std::move(a));
    }
    return out;
  };

  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t begin = r.tokens.size();
    const std::size_t n = len(gen);
    for (std::size_t i = 0; i < n; ++i) r.tokens.push_back(vocab[word(gen)]);
    r.sent_bounds.push_back({begin, r.tokens.size()});
  }
  r.story_text = join(r.tokens);
  std::vector<std::string> prompt;
  const std::size_t plen = 2 + gen() % 6;
  for (std::size_t i = 0; i < plen; ++i) prompt.push_back(vocab[word(gen)]);
  r.prompt_text = join(prompt);
  r.prompt_tokens = prompt;
  r.annotations = annotate(r.tokens);
  r.prompt_annotations = annotate(prompt);

  TokenTrace tr;
  tr.vocab_size = 50;
  for (std::size_t w = 0; w < r.tokens.size(); ++w) {
    const std::size_t pieces = 1 + gen() % 3;
    for (std::size_t p = 0; p < pieces; ++p) {
      tr.sub_logp.push_back(logp(gen));
      tr.word_ix.push_back(w);
    }
  }
  r.trace = std::move(tr);
  return r;
}

/// A record whose story has exactly `sentences` distinct sentences of
/// three words each; enough for the swap probe.
inline storyeval::EvalRecord swap_record(const std::string& id, std::size_t sentences = 15) {
  storyeval::EvalRecord r;
  r.id = id;
  r.model = "human";
  r.prompt_text = "a prompt for " + id;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t begin = r.tokens.size();
    r.tokens.push_back("w" + std::to_string(s));
    r.tokens.push_back("x" + std::to_string(s));
    r.tokens.push_back(".");
    r.sent_bounds.push_back({begin, r.tokens.size()});
  }
  r.story_text = storyeval::join(r.tokens);
  return r;
}

}  // namespace fixtures
