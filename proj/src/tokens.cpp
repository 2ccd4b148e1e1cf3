#include "repoctx/tokens.hpp"

#include <charconv>
#include <fstream>

#include "json.hpp"
#include "repoctx/errors.hpp"
#include "repoctx/text.hpp"

namespace repoctx {

namespace {

// Byte length of the code point starting with lead byte c. Input is assumed
// sanitized; stray continuation bytes count as one.
std::size_t code_point_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

template <typename Sink>
void scan_word_punct(std::string_view text, Sink&& sink) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
    } else if (is_word_byte(c)) {
      std::size_t j = i + 1;
      while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      sink(text.substr(i, j - i));
      i = j;
    } else {
      const std::size_t n = std::min(code_point_length(c), text.size() - i);
      sink(text.substr(i, n));
      i += n;
    }
  }
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::uint64_t count_word_punct(std::string_view text) {
  std::uint64_t n = 0;
  scan_word_punct(text, [&](std::string_view) { ++n; });
  return n;
}

std::vector<std::string_view> word_punct_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  scan_word_punct(text, [&](std::string_view tok) { out.push_back(tok); });
  return out;
}

TokenCounter TokenCounter::word_punct() { return TokenCounter{}; }

TokenCounter TokenCounter::byte_ratio(std::uint64_t numerator, std::uint64_t denominator) {
  if (numerator == 0 || denominator == 0)
    throw ConfigError("bytes_per_token must be a positive rational");
  TokenCounter c;
  c.kind_ = Kind::ByteRatio;
  c.num_ = numerator;
  c.den_ = denominator;
  return c;
}

TokenCounter TokenCounter::external(std::unordered_map<std::string, std::uint64_t> counts) {
  TokenCounter c;
  c.kind_ = Kind::External;
  c.counts_ = std::make_shared<const std::unordered_map<std::string, std::uint64_t>>(std::move(counts));
  return c;
}

TokenCounter TokenCounter::external(const std::filesystem::path& counts_file) {
  std::ifstream in(counts_file);
  if (!in) throw ConfigError("cannot read token counts file " + counts_file.string());
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      counts[j.at("repo_id").get<std::string>()] = j.at("tokens").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(lineno, std::string("bad token count entry: ") + e.what());
    }
  }
  TokenCounter c = external(std::move(counts));
  c.source_ = counts_file.string();
  return c;
}

TokenCounter TokenCounter::parse(std::string_view spec) {
  if (spec == "wordpunct") return word_punct();
  if (spec.starts_with("byteratio:")) {
    auto ratio = spec.substr(10);
    auto slash = ratio.find('/');
    if (slash == std::string_view::npos) return byte_ratio(parse_u64(ratio, "bytes_per_token"));
    return byte_ratio(parse_u64(ratio.substr(0, slash), "bytes_per_token numerator"),
                      parse_u64(ratio.substr(slash + 1), "bytes_per_token denominator"));
  }
  if (spec.starts_with("external:")) return external(std::filesystem::path(spec.substr(9)));
  throw ConfigError("unknown token counter '" + std::string(spec) +
                    "' (expected wordpunct, byteratio:N[/D] or external:PATH)");
}

std::string TokenCounter::spec() const {
  switch (kind_) {
    case Kind::WordPunct: return "wordpunct";
    case Kind::ByteRatio:
      return "byteratio:" + std::to_string(num_) + (den_ == 1 ? "" : "/" + std::to_string(den_));
    case Kind::External: return "external:" + source_;
  }
  return {};
}

std::uint64_t TokenCounter::count(std::string_view text, std::string_view doc_id) const {
  switch (kind_) {
    case Kind::WordPunct: return count_word_punct(text);
    case Kind::ByteRatio: {
      const std::uint64_t scaled = static_cast<std::uint64_t>(text.size()) * den_;
      return (scaled + num_ - 1) / num_;
    }
    case Kind::External: {
      auto it = counts_->find(std::string(doc_id));
      if (it == counts_->end())
        throw CountError("no external token count for document '" + std::string(doc_id) + "'");
      return it->second;
    }
  }
  return 0;
}

std::uint64_t TokenCounter::count_joined(std::uint64_t prior_count, std::size_t prior_bytes,
                                         std::string_view sep, std::string_view piece) const {
  switch (kind_) {
    case Kind::WordPunct: return prior_count + count_word_punct(piece);
    case Kind::ByteRatio: {
      const std::uint64_t bytes = prior_bytes + (prior_bytes ? sep.size() : 0) + piece.size();
      return (bytes * den_ + num_ - 1) / num_;
    }
    case Kind::External: throw CountError("external token counts cannot measure constructed text");
  }
  return 0;
}

std::vector<std::string_view> TokenCounter::tokenize(std::string_view text) const {
  if (kind_ != Kind::ByteRatio) return word_punct_tokens(text);
  // Token k covers bytes [floor(k*num/den), floor((k+1)*num/den)).
  std::vector<std::string_view> out;
  std::uint64_t k = 0, begin = 0;
  while (begin < text.size()) {
    const std::uint64_t end = std::min<std::uint64_t>(text.size(), ((k + 1) * num_) / den_);
    if (end > begin) out.push_back(text.substr(begin, end - begin));
    begin = std::max(begin, end);
    ++k;
  }
  return out;
}

}  // namespace repoctx
