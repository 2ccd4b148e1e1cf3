#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "repoctx/text.hpp"
#include "repoctx/tokens.hpp"

namespace repoctx::bench {

// Integer expression over + - * and parentheses, usual precedence.
// Throws BenchError on malformed input or int64 overflow.
std::int64_t evaluate_expression(std::string_view expr);

// Random expression of depth <= max_depth over constants 1..99, rendered
// with the minimum parentheses needed.
std::string random_expression(Rng& rng, int max_depth = 3);

struct KeyFunction {
  std::string expression;
  std::string source;  // "def key():\n    return <expression>\n"
  std::string expected_output;
};

KeyFunction gen_key_function(std::uint64_t seed);

// Closing query asking for the printed value of key() as an interactive shell would show it.
std::string_view key_query();

// Tokens the key occupies in a prompt: its source plus the closing query.
std::uint64_t key_footprint(const KeyFunction& key, const TokenCounter& counter);

// Seeded pool of syntactically valid Python functions (none named `key`).
std::vector<std::string> synthetic_filler_pool(std::size_t count, std::uint64_t seed);
// Every *.py file below dir, sorted by path; files defining key() are skipped.
std::vector<std::string> load_filler_pool(const std::filesystem::path& dir);

struct KeyRetrievalTask {
  std::string prompt;
  std::uint64_t sequence_tokens = 0;    // requested
  std::uint64_t key_offset_tokens = 0;  // requested
  std::uint64_t measured_sequence_tokens = 0;
  std::uint64_t measured_offset_tokens = 0;
  std::string key_source;
  std::string expected_output;

  nlohmann::ordered_json to_json() const;
  static KeyRetrievalTask from_json(const nlohmann::json& j);
};

inline constexpr std::uint64_t kLengthTolerance = 8;

// Filler before the key up to offset_tokens, filler after it up to
// seq_tokens, then the query. Snippets are used at most once per task.
// Throws BenchError if the preconditions fail or the pool runs dry.
KeyRetrievalTask build_key_retrieval_task(std::span<const std::string> filler_pool, const KeyFunction& key,
                                          std::uint64_t seq_tokens, std::uint64_t offset_tokens,
                                          std::uint64_t seed, const TokenCounter& counter);
KeyRetrievalTask build_key_retrieval_task(std::span<const std::string> filler_pool, std::uint64_t seq_tokens,
                                          std::uint64_t offset_tokens, std::uint64_t seed,
                                          const TokenCounter& counter);

// Row-major over L in {step, 2*step, .. <= max_tokens} and
// O in {0, step, .. <= L - footprint}; one key function per grid.
std::vector<KeyRetrievalTask> grid_tasks(std::span<const std::string> filler_pool, std::uint64_t max_tokens,
                                         std::uint64_t step, std::uint64_t seed, const TokenCounter& counter,
                                         std::size_t workers = 1);

// True iff the first integer literal in the output equals expected.
bool score_key_retrieval(std::string_view model_output, std::string_view expected);

// CSV: rows = offset percent, columns = sequence length, cells = 0/1.
std::string grid_csv(std::span<const KeyRetrievalTask> tasks, const std::vector<bool>& passed);

// 2*LCS / (|a| + |b|) over counter tokens; 1.0 when both are empty.
double similarity(std::string_view candidate, std::string_view reference, const TokenCounter& counter);

struct ThresholdCurve {
  std::array<double, 11> thresholds{};
  std::array<std::optional<double>, 11> accuracy{};  // nullopt for empty input
  nlohmann::ordered_json to_json() const;
};

ThresholdCurve accuracy_at_thresholds(std::span<const double> similarities);

struct BucketSpec {
  std::vector<std::uint64_t> boundaries{2048, 4096, 8192};
  std::size_t cap = 100;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  std::size_t bucket_of(std::uint64_t tokens) const;
};

struct BucketSample {
  std::string id;
  std::uint64_t tokens = 0;
};

// Retained ids ordered by (bucket, id).
std::vector<std::string> rebalance_buckets(std::span<const BucketSample> samples, const BucketSpec& spec);

}  // namespace repoctx::bench
