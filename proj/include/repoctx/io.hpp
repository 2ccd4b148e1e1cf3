#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace repoctx {

inline constexpr std::string_view kToolName = "repoctx";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Writes to a sibling temp file; commit() renames it over the target.
// Destruction without commit removes the temp file, so a failed run never
// leaves a partial artifact behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile();

  std::ostream& stream() { return out_; }
  void write_line(std::string_view line);
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

struct ArtifactMeta {
  std::string artifact;  // e.g. "packed", "instructions"
  std::uint64_t seed = 0;
  std::string config_hash;
};

// {"_meta": {"tool", "version", "artifact", "seed", "config_hash"}}
std::string meta_line(const ArtifactMeta& meta);
bool is_meta_record(const nlohmann::json& j);

// Calls fn(record, line_number) for each non-empty line, skipping metadata
// lines. Throws IoError if the file cannot be opened and RecordError on
// invalid JSON or when fn throws a JSON/argument error.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&, std::size_t)>& fn);

}  // namespace repoctx
