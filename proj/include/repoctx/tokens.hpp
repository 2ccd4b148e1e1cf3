#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace repoctx {

// Stand-in for a real tokenizer. Only the counting function matters to the
// pipeline, so three interchangeable strategies are offered.
class TokenCounter {
 public:
  enum class Kind { WordPunct, ByteRatio, External };

  // Maximal runs of [A-Za-z0-9_] plus every other non-whitespace code point.
  static TokenCounter word_punct();
  // ceil(bytes * denominator / numerator), i.e. bytes_per_token = num/den.
  static TokenCounter byte_ratio(std::uint64_t numerator, std::uint64_t denominator = 1);
  // Exact counts keyed by document id, loaded from JSON Lines
  // {"repo_id": str, "tokens": int}.
  static TokenCounter external(const std::filesystem::path& counts_file);
  static TokenCounter external(std::unordered_map<std::string, std::uint64_t> counts);

  // "wordpunct", "byteratio:4", "byteratio:7/2" or "external:<path>".
  static TokenCounter parse(std::string_view spec);

  Kind kind() const { return kind_; }
  std::string spec() const;

  // For External counters the doc_id selects the count; text is ignored.
  std::uint64_t count(std::string_view text, std::string_view doc_id = {}) const;

  // Count of `prior + sep + piece` from the prior text's count and size,
  // where sep is whitespace. An empty prior takes no separator. Exact for WordPunct and ByteRatio; External
  // counters throw CountError.
  std::uint64_t count_joined(std::uint64_t prior_count, std::size_t prior_bytes, std::string_view sep,
                             std::string_view piece) const;

  // Token strings used for similarity scoring. External counters carry no
  // segmentation and fall back to WordPunct.
  std::vector<std::string_view> tokenize(std::string_view text) const;

 private:
  TokenCounter() = default;

  Kind kind_ = Kind::WordPunct;
  std::uint64_t num_ = 1;
  std::uint64_t den_ = 1;
  std::string source_;
  std::shared_ptr<const std::unordered_map<std::string, std::uint64_t>> counts_;
};

std::uint64_t count_word_punct(std::string_view text);
std::vector<std::string_view> word_punct_tokens(std::string_view text);

}  // namespace repoctx
