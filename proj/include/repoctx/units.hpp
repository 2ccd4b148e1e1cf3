#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "repoctx/corpus.hpp"
#include "repoctx/packer.hpp"

namespace repoctx {

enum class UnitKind { Class, Method, Function };

std::string_view to_string(UnitKind kind);

struct CodeUnit {
  UnitKind kind = UnitKind::Function;
  std::string name;
  std::string qualified_name;  // dotted, e.g. "Outer.Inner.method"
  std::string file_path;
  std::uint64_t offset = 0;  // byte span within the packed document
  std::uint64_t length = 0;
  std::string doc_text;
  std::string signature;  // header line, whitespace-collapsed

  bool operator==(const CodeUnit&) const = default;
};

// Units of one file with offsets relative to `content`. Python gets a block
// parser; the brace languages get signature patterns plus brace matching.
std::vector<CodeUnit> extract_file_units(std::string_view content, Language language,
                                         const std::string& file_path);

// Units of every segment, offsets rebased onto doc.text, sorted by offset.
std::vector<CodeUnit> extract_units(const PackedDocument& doc);

// Replaces comments, string/char literals and (for C/C++) preprocessor lines
// with spaces. Newlines and byte offsets are preserved.
std::string mask_non_code(std::string_view content, Language language);

}  // namespace repoctx
