#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "repoctx/corpus.hpp"
#include "repoctx/import_graph.hpp"
#include "repoctx/tokens.hpp"

namespace repoctx {

struct Segment {
  std::string path;
  std::uint64_t offset = 0;  // byte offset into PackedDocument::text
  std::uint64_t length = 0;  // byte length of the file content
  bool operator==(const Segment&) const = default;
};

struct PackedDocument {
  std::string repo_id;
  Language language = Language::Other;
  std::vector<Segment> segments;
  std::string text;
  std::uint64_t total_tokens = 0;

  bool operator==(const PackedDocument&) const = default;
};

struct PackOptions {
  std::string header_prefix = "// FILE: ";
  TokenCounter counter = TokenCounter::word_punct();
};

Language dominant_language(const Repository& repo);

std::vector<SourceFile> dfs_folder_order(std::span<const SourceFile> files);
// Same traversal, returning positions into `files`.
std::vector<std::size_t> dfs_folder_indices(std::span<const SourceFile> files);

// File indices in packing order: documentation/build files, then the
// dependency-ordered connected files, then everything else.
std::vector<std::size_t> packing_order(const Repository& repo, const ImportGraph& graph);

PackedDocument pack_repository(const Repository& repo, const ImportGraph& graph,
                               const PackOptions& options = {});

// build_graph + break_cycles + pack_repository over a corpus. Output order
// follows the input order.
struct PackResult {
  std::vector<PackedDocument> documents;
  std::vector<ImportGraph> graphs;
};
PackResult pack_corpus(const std::vector<Repository>& repos, const PackOptions& options,
                       std::size_t workers);

nlohmann::ordered_json to_json(const PackedDocument& doc);
// Throws nlohmann::json::exception / std::invalid_argument on malformed input.
PackedDocument packed_document_from_json(const nlohmann::json& j);

}  // namespace repoctx
