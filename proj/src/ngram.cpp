#include "storyeval/ngram.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace storyeval {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'E', 'V', 'N', 'G', 'R', 'M', '\0'};
const std::array<std::string, 3> kSpecials = {"<s>", "</s>", "<unk>"};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

 private:
  void put(std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, n);
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }

 private:
  std::uint64_t get(int n) {
    unsigned char buf[8] = {};
    in_.read(reinterpret_cast<char*>(buf), n);
    check();
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  void check() {
    if (!in_) throw std::runtime_error("truncated n-gram model file");
  }
  std::istream& in_;
};

}  // namespace

std::string NgramModel::key_of(std::span<const TokenId> ctx) {
  std::string key(ctx.size() * sizeof(TokenId), '\0');
  if (!ctx.empty()) std::memcpy(key.data(), ctx.data(), key.size());
  return key;
}

NgramModel NgramModel::train(std::span<const std::vector<std::string>> documents,
                             std::size_t order, double discount) {
  if (order < 1) throw std::invalid_argument("n-gram order must be at least 1");
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("discount must lie in (0, 1]");
  }
  std::set<std::string> words;
  std::size_t n_tokens = 0;
  for (const auto& doc : documents) {
    for (const auto& w : doc) {
      if (std::find(kSpecials.begin(), kSpecials.end(), w) == kSpecials.end()) {
        words.insert(w);
      }
    }
    n_tokens += doc.size();
  }
  if (n_tokens == 0) throw std::invalid_argument("n-gram training corpus is empty");

  NgramModel m;
  m.order_ = order;
  m.discount_ = discount;
  m.vocab_.assign(kSpecials.begin(), kSpecials.end());
  m.vocab_.insert(m.vocab_.end(), words.begin(), words.end());
  for (TokenId i = 0; i < m.vocab_.size(); ++i) m.index_.emplace(m.vocab_[i], i);

  // counts[m][context key][word]
  std::vector<std::unordered_map<std::string, std::map<TokenId, std::uint64_t>>> counts(order);
  std::vector<TokenId> seq;
  for (const auto& doc : documents) {
    if (doc.empty()) continue;
    seq.assign(order - 1, kBos);
    for (const auto& w : doc) seq.push_back(m.id_of(w));
    seq.push_back(kEos);
    for (std::size_t i = order - 1; i < seq.size(); ++i) {
      for (std::size_t len = 0; len < order; ++len) {
        std::span<const TokenId> ctx(seq.data() + i - len, len);
        ++counts[len][key_of(ctx)][seq[i]];
      }
    }
  }

  m.levels_.resize(order);
  for (std::size_t len = 0; len < order; ++len) {
    for (auto& [key, followers] : counts[len]) {
      ContextStats stats;
      for (const auto& [w, c] : followers) {
        stats.followers.emplace_back(w, c);
        stats.total += c;
      }
      m.levels_[len].emplace(key, std::move(stats));
    }
  }
  m.finalize();
  return m;
}

void NgramModel::finalize() {
  unigram_.assign(vocab_.size(), 0.0);
  const ContextStats* uni = find_context({});
  const double n = static_cast<double>(uni->total);
  const double types = static_cast<double>(uni->followers.size());
  const double uniform = discount_ * types / n / static_cast<double>(vocab_.size() - 1);
  for (TokenId w = 0; w < vocab_.size(); ++w) {
    if (w != kBos) unigram_[w] = uniform;
  }
  for (const auto& [w, c] : uni->followers) {
    unigram_[w] += std::max(static_cast<double>(c) - discount_, 0.0) / n;
  }
}

TokenId NgramModel::id_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

const NgramModel::ContextStats* NgramModel::find_context(
    std::span<const TokenId> ctx) const {
  const auto& level = levels_[ctx.size()];
  auto it = level.find(key_of(ctx));
  return it == level.end() ? nullptr : &it->second;
}

double NgramModel::prob(std::span<const TokenId> context, TokenId w) const {
  std::vector<TokenId> ctx(order_ - 1, kBos);
  const std::size_t take = std::min(context.size(), order_ - 1);
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));

  double p = unigram_.at(w);
  for (std::size_t len = 1; len < order_; ++len) {
    std::span<const TokenId> h(ctx.data() + ctx.size() - len, len);
    const ContextStats* stats = find_context(h);
    if (!stats) continue;
    const double total = static_cast<double>(stats->total);
    const double lambda = discount_ * static_cast<double>(stats->followers.size()) / total;
    auto it = std::lower_bound(stats->followers.begin(), stats->followers.end(), w,
                               [](const auto& f, TokenId id) { return f.first < id; });
    double direct = 0.0;
    if (it != stats->followers.end() && it->first == w) {
      direct = std::max(static_cast<double>(it->second) - discount_, 0.0) / total;
    }
    p = lambda * p + direct;
  }
  return p;
}

std::vector<double> NgramModel::distribution(std::span<const TokenId> context) const {
  std::vector<TokenId> ctx(order_ - 1, kBos);
  const std::size_t take = std::min(context.size(), order_ - 1);
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));

  std::vector<double> p = unigram_;
  for (std::size_t len = 1; len < order_; ++len) {
    std::span<const TokenId> h(ctx.data() + ctx.size() - len, len);
    const ContextStats* stats = find_context(h);
    if (!stats) continue;
    const double total = static_cast<double>(stats->total);
    const double lambda = discount_ * static_cast<double>(stats->followers.size()) / total;
    for (double& x : p) x *= lambda;
    for (const auto& [w, c] : stats->followers) {
      p[w] += std::max(static_cast<double>(c) - discount_, 0.0) / total;
    }
  }
  return p;
}

std::vector<TokenId> NgramModel::padded_ids(std::span<const std::string> context) const {
  std::vector<TokenId> ids(order_ - 1, kBos);
  for (const auto& w : context) ids.push_back(id_of(w));
  return ids;
}

TokenTrace NgramModel::teacher_force(std::span<const std::string> context,
                                     std::span<const std::string> target) const {
  TokenTrace trace;
  trace.vocab_size = vocab_.size();
  auto history = padded_ids(context);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const TokenId w = id_of(target[i]);
    trace.sub_logp.push_back(std::log(prob(history, w)));
    trace.word_ix.push_back(i);
    history.push_back(w);
  }
  return trace;
}

double NgramModel::score_sequence(std::span<const std::string> context,
                                  std::span<const std::string> target) const {
  double total = 0.0;
  auto history = padded_ids(context);
  for (const auto& word : target) {
    const TokenId w = id_of(word);
    total += std::log(prob(history, w));
    history.push_back(w);
  }
  return total;
}

std::vector<double> NgramModel::next_dist(std::span<const std::string> context) const {
  const std::size_t take = std::min(context.size(), order_ - 1);
  std::vector<TokenId> ids;
  ids.reserve(take);
  for (std::size_t i = context.size() - take; i < context.size(); ++i) {
    ids.push_back(id_of(context[i]));
  }
  return distribution(ids);
}

std::vector<std::vector<TokenId>> NgramModel::contexts() const {
  std::vector<std::vector<TokenId>> out;
  for (std::size_t len = 0; len < levels_.size(); ++len) {
    for (const auto& [key, stats] : levels_[len]) {
      std::vector<TokenId> ctx(len);
      if (len) std::memcpy(ctx.data(), key.data(), key.size());
      out.push_back(std::move(ctx));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void NgramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write n-gram model: " + path);
  Writer w(out);
  w.bytes(std::string_view(kMagic.data(), kMagic.size()));
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(order_));
  w.f64(discount_);
  w.u32(static_cast<std::uint32_t>(vocab_.size()));
  for (const auto& s : vocab_) {
    w.u32(static_cast<std::uint32_t>(s.size()));
    w.bytes(s);
  }
  for (std::size_t len = 0; len < order_; ++len) {
    std::vector<std::pair<std::vector<TokenId>, const ContextStats*>> entries;
    for (const auto& [key, stats] : levels_[len]) {
      std::vector<TokenId> ctx(len);
      if (len) std::memcpy(ctx.data(), key.data(), key.size());
      entries.emplace_back(std::move(ctx), &stats);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::uint64_t n = 0;
    for (const auto& e : entries) n += e.second->followers.size();
    w.u64(n);
    for (const auto& [ctx, stats] : entries) {
      for (const auto& [word, count] : stats->followers) {
        for (TokenId id : ctx) w.u32(id);
        w.u32(word);
        w.u64(count);
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing n-gram model: " + path);
}

NgramModel NgramModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open n-gram model: " + path);
  Reader r(in);
  const std::string magic = r.bytes(kMagic.size());
  if (magic != std::string_view(kMagic.data(), kMagic.size())) {
    throw std::runtime_error("not an n-gram model file: " + path);
  }
  const auto version = r.u32();
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported n-gram model version " + std::to_string(version));
  }
  NgramModel m;
  m.order_ = r.u32();
  m.discount_ = r.f64();
  if (m.order_ < 1 || !(m.discount_ > 0.0 && m.discount_ <= 1.0)) {
    throw std::runtime_error("corrupt n-gram model header");
  }
  const auto v = r.u32();
  if (v < kSpecials.size()) throw std::runtime_error("corrupt n-gram vocabulary");
  for (std::uint32_t i = 0; i < v; ++i) {
    const auto len = r.u32();
    m.vocab_.push_back(r.bytes(len));
    m.index_.emplace(m.vocab_.back(), i);
  }
  m.levels_.resize(m.order_);
  for (std::size_t len = 0; len < m.order_; ++len) {
    const auto n = r.u64();
    std::vector<TokenId> ctx(len);
    for (std::uint64_t e = 0; e < n; ++e) {
      for (auto& id : ctx) id = r.u32();
      const TokenId word = r.u32();
      const auto count = r.u64();
      if (word >= v || count == 0) throw std::runtime_error("corrupt n-gram entry");
      auto& stats = m.levels_[len][key_of(ctx)];
      stats.followers.emplace_back(word, count);
      stats.total += count;
    }
  }
  if (!m.find_context({})) throw std::runtime_error("n-gram model has no unigram counts");
  m.finalize();
  return m;
}

bool operator==(const NgramModel& a, const NgramModel& b) {
  if (a.order_ != b.order_ || a.discount_ != b.discount_ || a.vocab_ != b.vocab_) return false;
  for (std::size_t len = 0; len < a.order_; ++len) {
    if (a.levels_[len].size() != b.levels_[len].size()) return false;
    for (const auto& [key, stats] : a.levels_[len]) {
      auto it = b.levels_[len].find(key);
      if (it == b.levels_[len].end() || it->second.total != stats.total ||
          it->second.followers != stats.followers) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace storyeval
