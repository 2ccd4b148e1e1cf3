#include "repoctx/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "repoctx/errors.hpp"
#include "repoctx/parallel.hpp"

namespace repoctx::bench {

namespace {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  std::int64_t parse() {
    const auto v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw BenchError("bad expression '" + std::string(s_) + "' at " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  std::int64_t sum() {
    auto v = product();
    for (;;) {
      skip();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        const char op = s_[pos_++];
        const auto rhs = product();
        std::int64_t r;
        if (op == '+' ? __builtin_add_overflow(v, rhs, &r) : __builtin_sub_overflow(v, rhs, &r)) fail("overflow");
        v = r;
      } else {
        return v;
      }
    }
  }

  std::int64_t product() {
    auto v = unary();
    for (;;) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        const auto rhs = unary();
        std::int64_t r;
        if (__builtin_mul_overflow(v, rhs, &r)) fail("overflow");
        v = r;
      } else {
        return v;
      }
    }
  }

  std::int64_t unary() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '-') {
      ++pos_;
      const auto v = unary();
      if (v == INT64_MIN) fail("overflow");
      return -v;
    }
    return atom();
  }

  std::int64_t atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (s_[pos_] == '(') {
      ++pos_;
      const auto v = sum();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
      ++pos_;
      return v;
    }
    if (!std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected a number");
    std::int64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, s_[pos_] - '0', &v)) fail("overflow");
      ++pos_;
    }
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

int precedence(char op) { return op == '*' ? 2 : 1; }

struct Rendered {
  std::string text;
  char op = 0;  // 0 for a constant
};

Rendered render_random(Rng& rng, int depth) {
  if (depth == 0 || rng.below(3) == 0) return {std::to_string(1 + rng.below(99)), 0};
  static constexpr char kOps[] = {'+', '-', '*'};
  const char op = kOps[rng.below(3)];
  auto lhs = render_random(rng, depth - 1);
  auto rhs = render_random(rng, depth - 1);
  if (lhs.op && precedence(lhs.op) < precedence(op)) lhs.text = "(" + lhs.text + ")";
  if (rhs.op && (precedence(rhs.op) < precedence(op) || (op == '-' && precedence(rhs.op) == precedence(op))))
    rhs.text = "(" + rhs.text + ")";
  return {lhs.text + " " + op + " " + rhs.text, op};
}

constexpr std::string_view kSeparator = "\n\n";

struct Builder {
  std::string text;
  std::uint64_t tokens = 0;

  void append(std::string_view piece, std::uint64_t piece_count) {
    if (!text.empty()) text += kSeparator;
    text.append(piece);
    tokens = piece_count;
  }
};

// Appends snippets (each at most once, in `order`) and then comment padding
// until the text holds `target` tokens. Returns false when the pool ran dry
// with more than the padding allowance still missing.
bool fill_to(Builder& b, std::uint64_t target, std::span<const std::string> pool,
             const std::vector<std::size_t>& order, std::vector<bool>& used, const TokenCounter& counter) {
  constexpr std::uint64_t kPadAllowance = 32;
  for (auto idx : order) {
    if (b.tokens >= target) break;
    if (used[idx]) continue;
    const auto next = counter.count_joined(b.tokens, b.text.size(), kSeparator, pool[idx]);
    if (next <= target) {
      b.append(pool[idx], next);
      used[idx] = true;
    }
  }
  if (b.tokens >= target) return true;
  const bool pool_exhausted = std::all_of(used.begin(), used.end(), [](bool u) { return u; });
  if (pool_exhausted && target - b.tokens > kPadAllowance) return false;

  // Comment padding: "#" then words, one token each under WordPunct.
  std::string pad;
  std::uint64_t pad_count = b.tokens;
  std::size_t words_on_line = 0;
  auto try_piece = [&](const std::string& candidate) {
    return counter.count_joined(b.tokens, b.text.size(), kSeparator, candidate);
  };
  while (pad_count < target) {
    std::string candidate = pad;
    if (candidate.empty() || words_on_line == 12) {
      candidate += candidate.empty() ? "#" : "\n#";
      words_on_line = 0;
    } else {
      candidate += " pad";
      ++words_on_line;
    }
    const auto c = try_piece(candidate);
    if (c > target) break;
    pad = std::move(candidate);
    pad_count = c;
  }
  if (!pad.empty()) {
    if (!b.text.empty()) b.text += kSeparator;
    b.text += pad;
    b.tokens = pad_count;
  }
  return true;
}

}  // namespace

std::int64_t evaluate_expression(std::string_view expr) { return ExprParser(expr).parse(); }

std::string random_expression(Rng& rng, int max_depth) { return render_random(rng, max_depth).text; }

std::string_view key_query() {
  return "# Emulate a Python interpreter shell: reply with exactly what the call below prints.\n"
         ">>> print(key())";
}

KeyFunction gen_key_function(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "key-function"));
  KeyFunction key;
  key.expression = random_expression(rng, 3);
  key.source = "def key():\n    return " + key.expression + "\n";
  key.expected_output = std::to_string(evaluate_expression(key.expression));
  return key;
}

std::uint64_t key_footprint(const KeyFunction& key, const TokenCounter& counter) {
  const auto source_tokens = counter.count_joined(0, 0, kSeparator, key.source);
  return counter.count_joined(source_tokens, key.source.size(), kSeparator, key_query());
}

std::vector<std::string> synthetic_filler_pool(std::size_t count, std::uint64_t seed) {
  static constexpr std::string_view kVerbs[] = {"compute", "merge", "scan", "collect", "update",
                                                "build",   "count", "filter", "resolve", "score"};
  static constexpr std::string_view kNouns[] = {"edges",  "totals", "pairs", "window", "tokens",
                                                "groups", "ranges", "items", "scores", "nodes"};
  Rng rng(derive_seed(seed, "filler"));
  std::vector<std::string> pool;
  pool.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = std::string(kVerbs[rng.below(std::size(kVerbs))]) + "_" +
                             std::string(kNouns[rng.below(std::size(kNouns))]) + "_" + std::to_string(i);
    const auto a = 2 + rng.below(40), b = 1 + rng.below(90), c = 1 + rng.below(9);
    std::ostringstream s;
    switch (rng.below(4)) {
      case 0:
        s << "def " << name << "(values):\n"
          << "    total = " << b << "\n"
          << "    for item in values:\n"
          << "        if item % " << a << " == 0:\n"
          << "            total += item * " << c << "\n"
          << "        else:\n"
          << "            total -= 1\n"
          << "    return total\n";
        break;
      case 1:
        s << "def " << name << "(n):\n"
          << "    memo = [0] * (n + 1)\n"
          << "    for i in range(1, n + 1):\n"
          << "        memo[i] = memo[i - 1] + i * " << c << "\n"
          << "    return memo[n] % " << (b + 7) << "\n";
        break;
      case 2:
        s << "def " << name << "(grid):\n"
          << "    best = -1\n"
          << "    for row in grid:\n"
          << "        for cell in row:\n"
          << "            if cell > best and cell != " << a << ":\n"
          << "                best = cell\n"
          << "    return best\n";
        break;
      default:
        s << "def " << name << "(text):\n"
          << "    counts = {}\n"
          << "    for ch in text:\n"
          << "        counts[ch] = counts.get(ch, 0) + " << c << "\n"
          << "    ordered = sorted(counts.items(), key=lambda kv: -kv[1])\n"
          << "    return ordered[:" << (1 + rng.below(5)) << "]\n";
        break;
    }
    pool.push_back(s.str());
  }
  return pool;
}

std::vector<std::string> load_filler_pool(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw BenchError("filler directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".py") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  static const std::regex defines_key(R"((^|\n)\s*def\s+key\s*\()");
  std::vector<std::string> pool;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    content = sanitize_utf8(trim(content));
    if (content.empty() || std::regex_search(content, defines_key)) continue;
    pool.push_back(content + "\n");
  }
  return pool;
}

nlohmann::ordered_json KeyRetrievalTask::to_json() const {
  nlohmann::ordered_json j;
  j["prompt"] = prompt;
  j["sequence_tokens"] = sequence_tokens;
  j["key_offset_tokens"] = key_offset_tokens;
  j["expected_output"] = expected_output;
  j["measured_sequence_tokens"] = measured_sequence_tokens;
  j["measured_offset_tokens"] = measured_offset_tokens;
  j["key_source"] = key_source;
  return j;
}

KeyRetrievalTask KeyRetrievalTask::from_json(const nlohmann::json& j) {
  KeyRetrievalTask t;
  t.prompt = j.at("prompt").get<std::string>();
  t.sequence_tokens = j.at("sequence_tokens").get<std::uint64_t>();
  t.key_offset_tokens = j.at("key_offset_tokens").get<std::uint64_t>();
  t.expected_output = j.at("expected_output").get<std::string>();
  t.measured_sequence_tokens = j.value("measured_sequence_tokens", t.sequence_tokens);
  t.measured_offset_tokens = j.value("measured_offset_tokens", t.key_offset_tokens);
  t.key_source = j.value("key_source", std::string{});
  return t;
}

KeyRetrievalTask build_key_retrieval_task(std::span<const std::string> filler_pool, const KeyFunction& key,
                                          std::uint64_t seq_tokens, std::uint64_t offset_tokens,
                                          std::uint64_t seed, const TokenCounter& counter) {
  const auto footprint = key_footprint(key, counter);
  if (seq_tokens < footprint)
    throw BenchError("sequence length " + std::to_string(seq_tokens) + " cannot hold the key (" +
                     std::to_string(footprint) + " tokens)");
  if (offset_tokens > seq_tokens - footprint)
    throw BenchError("key offset " + std::to_string(offset_tokens) + " leaves no room for the key in " +
                     std::to_string(seq_tokens) + " tokens");

  std::vector<std::size_t> order(filler_pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "task-order"));
  rng.shuffle(order);
  std::vector<bool> used(filler_pool.size(), false);

  Builder prefix;
  if (!fill_to(prefix, offset_tokens, filler_pool, order, used, counter))
    throw BenchError("filler pool too small to reach offset " + std::to_string(offset_tokens));
  Builder suffix;
  const std::uint64_t suffix_target = seq_tokens - offset_tokens - footprint;
  if (!fill_to(suffix, suffix_target, filler_pool, order, used, counter))
    throw BenchError("filler pool too small to reach sequence length " + std::to_string(seq_tokens));

  KeyRetrievalTask task;
  task.sequence_tokens = seq_tokens;
  task.key_offset_tokens = offset_tokens;
  task.key_source = key.source;
  task.expected_output = key.expected_output;
  task.prompt = prefix.text;
  if (!task.prompt.empty()) task.prompt += kSeparator;
  task.measured_offset_tokens = counter.count(task.prompt);
  task.prompt += key.source;
  if (!suffix.text.empty()) task.prompt.append(kSeparator).append(suffix.text);
  task.prompt.append(kSeparator).append(key_query());
  task.measured_sequence_tokens = counter.count(task.prompt);
  return task;
}

KeyRetrievalTask build_key_retrieval_task(std::span<const std::string> filler_pool, std::uint64_t seq_tokens,
                                          std::uint64_t offset_tokens, std::uint64_t seed,
                                          const TokenCounter& counter) {
  return build_key_retrieval_task(filler_pool, gen_key_function(seed), seq_tokens, offset_tokens, seed, counter);
}

std::vector<KeyRetrievalTask> grid_tasks(std::span<const std::string> filler_pool, std::uint64_t max_tokens,
                                         std::uint64_t step, std::uint64_t seed, const TokenCounter& counter,
                                         std::size_t workers) {
  if (step == 0 || max_tokens < step) throw BenchError("grid needs step > 0 and max_tokens >= step");
  const KeyFunction key = gen_key_function(seed);
  const auto footprint = key_footprint(key, counter);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
  for (std::uint64_t len = step; len <= max_tokens; len += step) {
    if (len < footprint) continue;
    for (std::uint64_t off = 0; off <= len - footprint; off += step) cells.emplace_back(len, off);
  }
  std::vector<KeyRetrievalTask> tasks(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    const auto [len, off] = cells[i];
    const auto task_seed = derive_seed(seed, "task:" + std::to_string(len) + ":" + std::to_string(off));
    tasks[i] = build_key_retrieval_task(filler_pool, key, len, off, task_seed, counter);
  });
  return tasks;
}

bool score_key_retrieval(std::string_view model_output, std::string_view expected) {
  for (std::size_t i = 0; i < model_output.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(model_output[i]))) continue;
    std::size_t begin = i;
    if (i > 0 && model_output[i - 1] == '-') begin = i - 1;
    std::size_t end = i;
    while (end < model_output.size() && std::isdigit(static_cast<unsigned char>(model_output[end]))) ++end;
    return model_output.substr(begin, end - begin) == expected;
  }
  return false;
}

std::string grid_csv(std::span<const KeyRetrievalTask> tasks, const std::vector<bool>& passed) {
  if (passed.size() != tasks.size()) throw BenchError("one result per task is required");
  std::set<std::uint64_t> lengths;
  std::set<long long> percents;
  std::map<std::pair<long long, std::uint64_t>, bool> cells;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const auto pct = std::llround(100.0 * static_cast<double>(t.key_offset_tokens) /
                                  static_cast<double>(t.sequence_tokens));
    lengths.insert(t.sequence_tokens);
    percents.insert(pct);
    cells[{pct, t.sequence_tokens}] = passed[i];
  }
  std::string csv = "offset_percent";
  for (auto len : lengths) csv += "," + std::to_string(len);
  csv += '\n';
  for (auto pct : percents) {
    csv += std::to_string(pct);
    for (auto len : lengths) {
      csv += ',';
      if (auto it = cells.find({pct, len}); it != cells.end()) csv += it->second ? '1' : '0';
    }
    csv += '\n';
  }
  return csv;
}

double similarity(std::string_view candidate, std::string_view reference, const TokenCounter& counter) {
  const auto a = counter.tokenize(candidate);
  const auto b = counter.tokenize(reference);
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[b.size()]);
  return 2.0 * lcs / static_cast<double>(a.size() + b.size());
}

nlohmann::ordered_json ThresholdCurve::to_json() const {
  nlohmann::ordered_json j;
  j["thresholds"] = thresholds;
  auto& acc = j["accuracy"] = nlohmann::ordered_json::array();
  for (const auto& a : accuracy) acc.push_back(a ? nlohmann::ordered_json(*a) : nullptr);
  return j;
}

ThresholdCurve accuracy_at_thresholds(std::span<const double> similarities) {
  ThresholdCurve curve;
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) curve.thresholds[k] = static_cast<double>(k) / 10.0;
  if (similarities.empty()) return curve;
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    const auto hits = std::count_if(similarities.begin(), similarities.end(),
                                    [&](double s) { return s >= curve.thresholds[k]; });
    curve.accuracy[k] = static_cast<double>(hits) / static_cast<double>(similarities.size());
  }
  return curve;
}

void BucketSpec::validate() const {
  if (cap == 0) throw ConfigError("bucket cap must be positive");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) throw ConfigError("bucket boundaries must be strictly increasing");
  }
}

std::size_t BucketSpec::bucket_of(std::uint64_t tokens) const {
  return static_cast<std::size_t>(std::upper_bound(boundaries.begin(), boundaries.end(), tokens) - boundaries.begin());
}

std::vector<std::string> rebalance_buckets(std::span<const BucketSample> samples, const BucketSpec& spec) {
  spec.validate();
  std::vector<std::vector<std::string>> buckets(spec.boundaries.size() + 1);
  for (const auto& s : samples) buckets[spec.bucket_of(s.tokens)].push_back(s.id);
  std::vector<std::string> out;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    auto& ids = buckets[b];
    std::sort(ids.begin(), ids.end());
    const std::size_t take = std::min(spec.cap, ids.size());
    Rng rng(derive_seed(spec.seed, "bucket:" + std::to_string(b)));
    for (std::size_t k = 0; k < take; ++k) {
      const auto j = k + static_cast<std::size_t>(rng.below(ids.size() - k));
      std::swap(ids[k], ids[j]);
    }
    ids.resize(take);
    std::sort(ids.begin(), ids.end());
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

}  // namespace repoctx::bench
