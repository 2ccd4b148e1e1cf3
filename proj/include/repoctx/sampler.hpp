#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "repoctx/packer.hpp"

namespace repoctx {

struct LengthRule {
  std::uint64_t short_threshold_tokens = 4096;
  double retention_rate = 0.10;
};

struct SamplerConfig {
  std::uint64_t short_threshold_tokens = 4096;
  double retention_rate = 0.10;
  std::uint64_t seed = 0;
  // Optional per-language overrides; languages not listed use the defaults.
  std::map<Language, LengthRule> per_language;

  LengthRule rule_for(Language lang) const;
  void validate() const;  // throws ConfigError
};

// Uniform [0,1) draw that depends only on (seed, repo_id).
double retention_draw(std::uint64_t seed, std::string_view repo_id);

bool should_retain(const PackedDocument& doc, const SamplerConfig& config);

std::vector<PackedDocument> sample_corpus(std::span<const PackedDocument> docs,
                                          const SamplerConfig& config);

struct LanguageStats {
  std::uint64_t count = 0;
  std::uint64_t total_tokens = 0;
  std::optional<double> mean_tokens() const;
};

// Length buckets [0,4K) [4K,8K) [8K,16K) [16K,32K) [32K,64K) [64K,128K) [128K,inf).
inline constexpr std::array<std::uint64_t, 6> kHistogramEdges{4096, 8192, 16384, 32768, 65536, 131072};
inline constexpr std::array<const char*, 7> kHistogramLabels{
    "[0,4K)", "[4K,8K)", "[8K,16K)", "[16K,32K)", "[32K,64K)", "[64K,128K)", "[128K,inf)"};

struct CorpusStats {
  std::uint64_t document_count = 0;
  std::uint64_t total_tokens = 0;
  std::map<Language, LanguageStats> per_language;
  std::array<std::uint64_t, 7> length_histogram{};

  void add(const PackedDocument& doc);
  // Associative and commutative.
  void merge(const CorpusStats& other);
  std::optional<double> mean_tokens() const;

  // e.g. "documents: 173336, mean length: 73451.0"
  std::string headline() const;
  nlohmann::ordered_json to_json() const;
};

std::size_t histogram_bucket(std::uint64_t tokens);

CorpusStats corpus_stats(std::span<const PackedDocument> docs);

}  // namespace repoctx
