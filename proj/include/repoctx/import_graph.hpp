#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "repoctx/corpus.hpp"

namespace repoctx {

struct ImportSpec {
  std::string raw_text;     // the matched statement, verbatim
  std::string target_hint;  // module path / include path / specifier
};

struct Edge {
  std::size_t importer = 0;
  std::size_t imported = 0;
  auto operator<=>(const Edge&) const = default;
};

// Nodes are indices into Repository::files. `paths` is indexed the same way
// and defines the lexicographic visit order used by cycle breaking and
// topological ordering.
struct ImportGraph {
  std::vector<std::string> paths;
  std::vector<std::size_t> nodes;   // Code files
  std::vector<Edge> edges;          // sorted, unique, no self-edges
  std::vector<Edge> removed_edges;  // back edges removed by break_cycles
  std::size_t dropped_imports = 0;  // unresolved or external specs

  std::vector<std::size_t> degrees() const;
};

// Line-pattern import extraction. Files whose language has no patterns (or
// that are not Code) yield an empty list.
std::vector<ImportSpec> extract_imports(const SourceFile& file);

// Resolves specs of repo.files[file_index] to intra-repository edges.
// `dropped`, when given, is incremented once per spec that resolves to nothing.
std::vector<Edge> resolve_imports(const Repository& repo, std::size_t file_index,
                                  const std::vector<ImportSpec>& specs,
                                  std::size_t* dropped = nullptr);

ImportGraph build_graph(const Repository& repo);

// Iterative DFS from nodes in path order, children in path order; every back
// edge moves from edges to removed_edges.
ImportGraph break_cycles(ImportGraph graph);

// Dependencies-first order over nodes with positive degree (stable Kahn with
// a path-ordered ready set). Throws std::logic_error if a cycle remains.
std::vector<std::size_t> topo_order(const ImportGraph& graph);

// One JSON Lines record per edge: {"repo_id", "edge": [importer, imported], "removed"}.
std::vector<std::string> graph_audit_lines(const std::string& repo_id, const ImportGraph& graph);

}  // namespace repoctx
