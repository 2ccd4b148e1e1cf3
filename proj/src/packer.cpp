#include "repoctx/packer.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "repoctx/parallel.hpp"
#include "repoctx/text.hpp"

namespace repoctx {

namespace {

std::optional<Language> build_file_vote(std::string_view basename) {
  if (basename == "package.json") return Language::JavaScript;
  if (basename == "go.mod") return Language::Go;
  if (basename == "pom.xml" || basename.starts_with("build.gradle")) return Language::Java;
  if (basename == "setup.py" || basename == "pyproject.toml" || basename == "setup.cfg")
    return Language::Python;
  if (basename == "CMakeLists.txt" || basename == "Makefile" || basename == "configure.ac")
    return Language::Cpp;
  return std::nullopt;
}

// Files before subdirectories, each group in lexicographic order.
bool folder_dfs_less(std::string_view a, std::string_view b) {
  const auto pa = split_path(a);
  const auto pb = split_path(b);
  const std::size_t common = std::min(pa.size(), pb.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (pa[i] == pb[i]) continue;
    const bool a_file = i + 1 == pa.size();
    const bool b_file = i + 1 == pb.size();
    if (a_file != b_file) return a_file;
    return pa[i] < pb[i];
  }
  return pa.size() < pb.size();
}

}  // namespace

Language dominant_language(const Repository& repo) {
  std::array<std::size_t, std::size(kRankedLanguages)> score{};
  auto slot = [](Language lang) { return static_cast<std::size_t>(lang); };
  for (const auto& f : repo.files) {
    if (f.kind == FileKind::Code && f.language != Language::Other) ++score[slot(f.language)];
    if (auto vote = build_file_vote(basename_of(f.path))) ++score[slot(*vote)];
  }
  Language best = Language::Other;
  std::size_t best_score = 0;
  for (auto lang : kRankedLanguages) {
    if (score[slot(lang)] > best_score) {
      best_score = score[slot(lang)];
      best = lang;
    }
  }
  return best;
}

std::vector<std::size_t> dfs_folder_indices(std::span<const SourceFile> files) {
  std::vector<std::size_t> idx(files.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return folder_dfs_less(files[a].path, files[b].path);
  });
  return idx;
}

std::vector<SourceFile> dfs_folder_order(std::span<const SourceFile> files) {
  std::vector<SourceFile> out;
  out.reserve(files.size());
  for (auto i : dfs_folder_indices(files)) out.push_back(files[i]);
  return out;
}

std::vector<std::size_t> packing_order(const Repository& repo, const ImportGraph& graph) {
  const auto folder = dfs_folder_indices(repo.files);
  const auto connected = topo_order(graph);
  std::vector<bool> placed(repo.files.size(), false);

  std::vector<std::size_t> order;
  order.reserve(repo.files.size());
  for (auto i : folder) {
    const auto kind = repo.files[i].kind;
    if (kind == FileKind::Documentation || kind == FileKind::Build) {
      order.push_back(i);
      placed[i] = true;
    }
  }
  for (auto i : connected) {
    if (placed[i]) continue;
    order.push_back(i);
    placed[i] = true;
  }
  for (auto i : folder) {
    if (!placed[i]) order.push_back(i);
  }
  return order;
}

PackedDocument pack_repository(const Repository& repo, const ImportGraph& graph,
                               const PackOptions& options) {
  PackedDocument doc;
  doc.repo_id = repo.id;
  doc.language = repo.dominant_language.value_or(dominant_language(repo));
  std::size_t reserve = 0;
  for (const auto& f : repo.files) reserve += f.content.size() + f.path.size() + options.header_prefix.size() + 3;
  doc.text.reserve(reserve);

  for (auto i : packing_order(repo, graph)) {
    const auto& f = repo.files[i];
    doc.text += options.header_prefix;
    doc.text += f.path;
    doc.text += '\n';
    doc.segments.push_back({f.path, doc.text.size(), f.content.size()});
    doc.text += f.content;
    if (!f.content.empty() && f.content.back() != '\n') doc.text += '\n';
    doc.text += '\n';
  }
  doc.total_tokens = options.counter.count(doc.text, doc.repo_id);
  return doc;
}

PackResult pack_corpus(const std::vector<Repository>& repos, const PackOptions& options,
                       std::size_t workers) {
  PackResult result;
  result.documents.resize(repos.size());
  result.graphs.resize(repos.size());
  parallel_for(repos.size(), workers, [&](std::size_t i) {
    result.graphs[i] = break_cycles(build_graph(repos[i]));
    result.documents[i] = pack_repository(repos[i], result.graphs[i], options);
  });
  return result;
}

nlohmann::ordered_json to_json(const PackedDocument& doc) {
  nlohmann::ordered_json j;
  j["repo_id"] = doc.repo_id;
  j["language"] = to_string(doc.language);
  j["total_tokens"] = doc.total_tokens;
  j["text"] = doc.text;
  auto& segs = j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : doc.segments)
    segs.push_back({{"path", s.path}, {"offset", s.offset}, {"length", s.length}});
  return j;
}

PackedDocument packed_document_from_json(const nlohmann::json& j) {
  PackedDocument doc;
  doc.repo_id = j.at("repo_id").get<std::string>();
  const auto lang = parse_language(j.at("language").get<std::string>());
  if (!lang) throw std::invalid_argument("unknown language " + j.at("language").dump());
  doc.language = *lang;
  doc.total_tokens = j.at("total_tokens").get<std::uint64_t>();
  doc.text = j.at("text").get<std::string>();
  for (const auto& s : j.at("segments")) {
    Segment seg{s.at("path").get<std::string>(), s.at("offset").get<std::uint64_t>(),
                s.at("length").get<std::uint64_t>()};
    if (seg.offset > doc.text.size() || seg.length > doc.text.size() - seg.offset)
      throw std::invalid_argument("segment " + seg.path + " lies outside the document text");
    doc.segments.push_back(std::move(seg));
  }
  return doc;
}

}  // namespace repoctx
