#include "repoctx/sampler.hpp"

#include <cmath>
#include <cstdio>

#include "repoctx/errors.hpp"
#include "repoctx/text.hpp"

namespace repoctx {

LengthRule SamplerConfig::rule_for(Language lang) const {
  auto it = per_language.find(lang);
  if (it != per_language.end()) return it->second;
  return {short_threshold_tokens, retention_rate};
}

void SamplerConfig::validate() const {
  auto check = [](const LengthRule& r, const std::string& where) {
    if (!(r.retention_rate >= 0.0 && r.retention_rate <= 1.0))
      throw ConfigError(where + ": retention_rate must lie in [0, 1]");
    if (r.short_threshold_tokens == 0)
      throw ConfigError(where + ": short_threshold_tokens must be positive");
  };
  check({short_threshold_tokens, retention_rate}, "sampler");
  for (const auto& [lang, rule] : per_language) check(rule, "sampler." + std::string(to_string(lang)));
}

double retention_draw(std::uint64_t seed, std::string_view repo_id) {
  return static_cast<double>(mix64(seed ^ fnv1a64(repo_id)) >> 11) * 0x1.0p-53;
}

bool should_retain(const PackedDocument& doc, const SamplerConfig& config) {
  const auto rule = config.rule_for(doc.language);
  if (doc.total_tokens >= rule.short_threshold_tokens) return true;
  return retention_draw(config.seed, doc.repo_id) < rule.retention_rate;
}

std::vector<PackedDocument> sample_corpus(std::span<const PackedDocument> docs,
                                          const SamplerConfig& config) {
  std::vector<PackedDocument> out;
  for (const auto& d : docs) {
    if (should_retain(d, config)) out.push_back(d);
  }
  return out;
}

std::optional<double> LanguageStats::mean_tokens() const {
  if (count == 0) return std::nullopt;
  return static_cast<double>(total_tokens) / static_cast<double>(count);
}

std::size_t histogram_bucket(std::uint64_t tokens) {
  std::size_t b = 0;
  while (b < kHistogramEdges.size() && tokens >= kHistogramEdges[b]) ++b;
  return b;
}

void CorpusStats::add(const PackedDocument& doc) {
  ++document_count;
  total_tokens += doc.total_tokens;
  auto& lang = per_language[doc.language];
  ++lang.count;
  lang.total_tokens += doc.total_tokens;
  ++length_histogram[histogram_bucket(doc.total_tokens)];
}

void CorpusStats::merge(const CorpusStats& other) {
  document_count += other.document_count;
  total_tokens += other.total_tokens;
  for (const auto& [lang, s] : other.per_language) {
    auto& mine = per_language[lang];
    mine.count += s.count;
    mine.total_tokens += s.total_tokens;
  }
  for (std::size_t i = 0; i < length_histogram.size(); ++i) length_histogram[i] += other.length_histogram[i];
}

std::optional<double> CorpusStats::mean_tokens() const {
  if (document_count == 0) return std::nullopt;
  return static_cast<double>(total_tokens) / static_cast<double>(document_count);
}

namespace {

nlohmann::ordered_json rounded_mean(std::optional<double> mean) {
  if (!mean) return nullptr;
  return std::round(*mean * 10.0) / 10.0;
}

}  // namespace

std::string CorpusStats::headline() const {
  char buf[96];
  if (auto mean = mean_tokens()) {
    std::snprintf(buf, sizeof buf, "documents: %llu, mean length: %.1f",
                  static_cast<unsigned long long>(document_count), *mean);
  } else {
    std::snprintf(buf, sizeof buf, "documents: %llu, mean length: null",
                  static_cast<unsigned long long>(document_count));
  }
  return buf;
}

nlohmann::ordered_json CorpusStats::to_json() const {
  nlohmann::ordered_json j;
  j["document_count"] = document_count;
  j["total_tokens"] = total_tokens;
  j["mean_tokens"] = rounded_mean(mean_tokens());
  auto& langs = j["per_language"] = nlohmann::ordered_json::object();
  for (const auto& [lang, s] : per_language) {
    langs[std::string(to_string(lang))] = {{"count", s.count}, {"mean_tokens", rounded_mean(s.mean_tokens())}};
  }
  auto& hist = j["length_histogram"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < length_histogram.size(); ++i)
    hist.push_back({{"bucket", kHistogramLabels[i]}, {"count", length_histogram[i]}});
  return j;
}

CorpusStats corpus_stats(std::span<const PackedDocument> docs) {
  CorpusStats stats;
  for (const auto& d : docs) stats.add(d);
  return stats;
}

}  // namespace repoctx
