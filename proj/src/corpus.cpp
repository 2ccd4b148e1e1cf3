#include "repoctx/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "repoctx/errors.hpp"
#include "repoctx/parallel.hpp"
#include "repoctx/text.hpp"

namespace fs = std::filesystem;

namespace repoctx {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Python: return "Python";
    case Language::C: return "C";
    case Language::Cpp: return "Cpp";
    case Language::Go: return "Go";
    case Language::Java: return "Java";
    case Language::JavaScript: return "JavaScript";
    case Language::TypeScript: return "TypeScript";
    case Language::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(FileKind kind) {
  switch (kind) {
    case FileKind::Documentation: return "Documentation";
    case FileKind::Build: return "Build";
    case FileKind::Code: return "Code";
    case FileKind::Other: return "Other";
  }
  return "Other";
}

std::optional<Language> parse_language(std::string_view name) {
  for (auto lang : kRankedLanguages) {
    if (to_string(lang) == name) return lang;
  }
  if (name == "Other") return Language::Other;
  return std::nullopt;
}

const ClassifierTables& ClassifierTables::defaults() {
  static const ClassifierTables tables;
  return tables;
}

namespace {

std::string extension_of(std::string_view path) {
  auto base = basename_of(path);
  auto dot = base.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  return to_lower(base.substr(dot));
}

}  // namespace

Language detect_language(std::string_view path) {
  const std::string ext = extension_of(path);
  if (ext == ".py") return Language::Python;
  if (ext == ".c" || ext == ".h") return Language::C;
  if (ext == ".cc" || ext == ".cpp" || ext == ".cxx" || ext == ".hpp" || ext == ".hh")
    return Language::Cpp;
  if (ext == ".go") return Language::Go;
  if (ext == ".java") return Language::Java;
  if (ext == ".js" || ext == ".jsx" || ext == ".mjs" || ext == ".cjs") return Language::JavaScript;
  if (ext == ".ts" || ext == ".tsx") return Language::TypeScript;
  return Language::Other;
}

FileKind classify_file(std::string_view path, const ClassifierTables& tables) {
  const auto base = basename_of(path);
  for (const auto& prefix : tables.doc_basename_prefixes) {
    if (starts_with_icase(base, prefix)) return FileKind::Documentation;
  }
  const std::string ext = extension_of(path);
  if (!ext.empty()) {
    for (const auto& doc_ext : tables.doc_extensions) {
      if (ext == to_lower(doc_ext)) return FileKind::Documentation;
    }
  }
  for (const auto& name : tables.build_basenames) {
    if (base == name) return FileKind::Build;
  }
  if (detect_language(path) != Language::Other) return FileKind::Code;
  return FileKind::Other;
}

SourceFile make_source_file(std::string_view path, std::string_view bytes,
                            const ClassifierTables& tables) {
  SourceFile file;
  file.path = normalize_path(path);
  file.language = detect_language(file.path);
  file.kind = classify_file(file.path, tables);
  file.content = sanitize_utf8(bytes);
  return file;
}

Repository make_repository(std::string id, std::vector<SourceFile> files) {
  if (id.empty()) throw IngestError("repository id must be nonempty");
  if (files.empty()) throw IngestError("repository '" + id + "' has no files");
  std::sort(files.begin(), files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  for (std::size_t i = 1; i < files.size(); ++i) {
    if (files[i].path == files[i - 1].path)
      throw IngestError("repository '" + id + "' has duplicate path " + files[i].path);
  }
  Repository repo;
  repo.id = std::move(id);
  repo.files = std::move(files);
  return repo;
}

namespace {

bool is_vcs_dir(const fs::path& name) {
  const auto s = name.string();
  return s == ".git" || s == ".hg" || s == ".svn";
}

}  // namespace

Repository scan_repository(const fs::path& root, const IngestLimits& limits,
                           const ClassifierTables& tables) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IngestError("cannot read repository root " + root.string());

  std::vector<SourceFile> files;
  std::size_t warnings = 0;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw IngestError("cannot read repository root " + root.string() + ": " + ec.message());

  for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
    if (ec) {
      ++warnings;
      ec.clear();
      continue;
    }
    const auto& entry = *it;
    if (entry.is_directory(ec) && !entry.is_symlink(ec)) {
      if (is_vcs_dir(entry.path().filename())) it.disable_recursion_pending();
      continue;
    }
    if (entry.is_symlink(ec) || !entry.is_regular_file(ec)) continue;
    const auto size = entry.file_size(ec);
    if (ec || size > limits.max_file_bytes) {
      ++warnings;
      ec.clear();
      continue;
    }
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) {
      ++warnings;
      continue;
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
      ++warnings;
      continue;
    }
    const auto rel = fs::relative(entry.path(), root, ec).generic_string();
    if (ec) {
      ++warnings;
      ec.clear();
      continue;
    }
    files.push_back(make_source_file(rel, bytes, tables));
  }

  std::string id = root.filename().string();
  if (id.empty()) id = root.parent_path().filename().string();
  if (files.empty()) {
    Repository empty;
    empty.id = id;
    empty.ingest_warnings = warnings;
    return empty;
  }
  Repository repo = make_repository(std::move(id), std::move(files));
  repo.ingest_warnings = warnings;
  return repo;
}

std::vector<RepoLocation> list_corpus(const fs::path& root_or_manifest) {
  std::error_code ec;
  std::vector<RepoLocation> out;
  if (fs::is_directory(root_or_manifest, ec)) {
    for (const auto& entry : fs::directory_iterator(root_or_manifest, ec)) {
      if (entry.is_directory() && !is_vcs_dir(entry.path().filename()))
        out.push_back({entry.path().filename().string(), entry.path()});
    }
    if (ec) throw IngestError("cannot list corpus root " + root_or_manifest.string());
  } else if (fs::is_regular_file(root_or_manifest, ec)) {
    std::ifstream in(root_or_manifest);
    if (!in) throw IngestError("cannot read manifest " + root_or_manifest.string());
    const auto base = root_or_manifest.parent_path();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        RepoLocation loc{j.at("repo_id").get<std::string>(), fs::path(j.at("path").get<std::string>())};
        if (loc.path.is_relative()) loc.path = base / loc.path;
        out.push_back(std::move(loc));
      } catch (const nlohmann::json::exception& e) {
        throw RecordError(lineno, std::string("bad manifest entry: ") + e.what());
      }
    }
  } else {
    throw IngestError("corpus root does not exist: " + root_or_manifest.string());
  }
  std::sort(out.begin(), out.end(),
            [](const RepoLocation& a, const RepoLocation& b) { return a.repo_id < b.repo_id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].repo_id == out[i - 1].repo_id)
      throw IngestError("duplicate repo_id " + out[i].repo_id);
  }
  return out;
}

std::vector<Repository> scan_corpus(const fs::path& root_or_manifest, const IngestLimits& limits,
                                    std::size_t workers, const ClassifierTables& tables) {
  const auto locations = list_corpus(root_or_manifest);
  auto scanned = parallel_map(locations, workers, [&](const RepoLocation& loc) {
    Repository repo = scan_repository(loc.path, limits, tables);
    repo.id = loc.repo_id;
    return repo;
  });
  std::vector<Repository> out;
  for (auto& repo : scanned) {
    if (!repo.files.empty()) out.push_back(std::move(repo));
  }
  return out;
}

nlohmann::ordered_json to_json(const Repository& repo) {
  nlohmann::ordered_json j;
  j["repo_id"] = repo.id;
  j["dominant_language"] =
      repo.dominant_language ? nlohmann::ordered_json(to_string(*repo.dominant_language)) : nullptr;
  auto& files = j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : repo.files) {
    files.push_back({{"path", f.path},
                     {"language", to_string(f.language)},
                     {"kind", to_string(f.kind)},
                     {"content", f.content},
                     {"token_count", f.token_count}});
  }
  return j;
}

}  // namespace repoctx
