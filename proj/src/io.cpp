#include "repoctx/io.hpp"

#include <stdexcept>
#include <unistd.h>

#include "repoctx/errors.hpp"
#include "repoctx/text.hpp"

namespace fs = std::filesystem;

namespace repoctx {

AtomicFile::AtomicFile(fs::path target) : target_(std::move(target)) {
  std::error_code ec;
  if (target_.has_parent_path()) fs::create_directories(target_.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + target_.parent_path().string() + ": " + ec.message());
  temp_ = target_;
  temp_ += ".tmp-" + std::to_string(::getpid());
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
  if (committed_) return;
  out_.close();
  std::error_code ec;
  fs::remove(temp_, ec);
}

void AtomicFile::write_line(std::string_view line) {
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw IoError("write failed for " + target_.string());
  out_.close();
  std::error_code ec;
  fs::rename(temp_, target_, ec);
  if (ec) throw IoError("cannot move " + temp_.string() + " to " + target_.string() + ": " + ec.message());
  committed_ = true;
}

std::string meta_line(const ArtifactMeta& meta) {
  nlohmann::ordered_json inner;
  inner["tool"] = kToolName;
  inner["version"] = kToolVersion;
  inner["artifact"] = meta.artifact;
  inner["seed"] = meta.seed;
  inner["config_hash"] = meta.config_hash;
  nlohmann::ordered_json j;
  j["_meta"] = std::move(inner);
  return j.dump();
}

bool is_meta_record(const nlohmann::json& j) { return j.is_object() && j.contains("_meta"); }

void read_jsonl(const fs::path& path, const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (is_meta_record(j)) continue;
    try {
      fn(j, lineno);
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(lineno, std::string("malformed record: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw RecordError(lineno, std::string("malformed record: ") + e.what());
    }
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
}

}  // namespace repoctx
