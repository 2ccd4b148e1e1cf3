#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace repoctx {

enum class Language { Python, C, Cpp, Go, Java, JavaScript, TypeScript, Other };
enum class FileKind { Documentation, Build, Code, Other };

inline constexpr Language kRankedLanguages[] = {
    Language::Python, Language::C,    Language::Cpp,        Language::Go,
    Language::Java,   Language::JavaScript, Language::TypeScript};

std::string_view to_string(Language lang);
std::string_view to_string(FileKind kind);
std::optional<Language> parse_language(std::string_view name);

struct SourceFile {
  std::string path;  // repo-relative, normalized
  Language language = Language::Other;
  FileKind kind = FileKind::Other;
  std::string content;
  std::uint64_t token_count = 0;
};

struct Repository {
  std::string id;
  std::vector<SourceFile> files;  // sorted by path
  std::optional<Language> dominant_language;
  std::size_t ingest_warnings = 0;
};

struct IngestLimits {
  std::uintmax_t max_file_bytes = 1u << 20;
};

// Path pattern tables behind classify_file. Extendable through the config file.
struct ClassifierTables {
  std::vector<std::string> doc_basename_prefixes{"README", "CHANGELOG", "CONTRIBUTING",
                                                 "LICENSE", "NOTICE"};
  std::vector<std::string> doc_extensions{".md", ".rst", ".adoc"};
  std::vector<std::string> build_basenames{
      "Makefile",     "CMakeLists.txt", "pom.xml",   "build.gradle", "build.gradle.kts",
      "package.json", "setup.py",       "pyproject.toml", "setup.cfg", "go.mod",
      "Cargo.toml",   "BUILD",          "BUILD.bazel",    "configure.ac", "meson.build"};

  static const ClassifierTables& defaults();
};

Language detect_language(std::string_view path);
FileKind classify_file(std::string_view path,
                       const ClassifierTables& tables = ClassifierTables::defaults());

// Builds a SourceFile from raw bytes: normalizes the path, lossy-decodes the
// content and classifies it.
SourceFile make_source_file(std::string_view path, std::string_view bytes,
                            const ClassifierTables& tables = ClassifierTables::defaults());

// Builds a Repository from in-memory files, sorting them by path. Throws
// IngestError on duplicate paths or an empty file list.
Repository make_repository(std::string id, std::vector<SourceFile> files);

Repository scan_repository(const std::filesystem::path& root, const IngestLimits& limits = {},
                           const ClassifierTables& tables = ClassifierTables::defaults());

struct RepoLocation {
  std::string repo_id;
  std::filesystem::path path;
};

// Immediate subdirectories of a corpus root, or the entries of a JSON Lines
// manifest ({"repo_id", "path"}; relative paths resolve against the manifest's
// directory). Sorted by repo_id; ids must be unique.
std::vector<RepoLocation> list_corpus(const std::filesystem::path& root_or_manifest);

// Scans every repository in the corpus. Repositories without any admissible
// file are skipped. Output ordering is by repo_id regardless of worker count.
std::vector<Repository> scan_corpus(const std::filesystem::path& root_or_manifest,
                                    const IngestLimits& limits, std::size_t workers,
                                    const ClassifierTables& tables = ClassifierTables::defaults());

nlohmann::ordered_json to_json(const Repository& repo);

}  // namespace repoctx
