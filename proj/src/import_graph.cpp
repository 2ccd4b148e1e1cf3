#include "repoctx/import_graph.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "repoctx/text.hpp"

namespace repoctx {

namespace {

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string strip_trailing_comment(std::string_view s, char marker) {
  auto pos = s.find(marker);
  return std::string(trim(pos == std::string_view::npos ? s : s.substr(0, pos)));
}

void push_spec(std::vector<ImportSpec>& out, std::string_view raw, std::string hint) {
  if (hint.empty()) return;
  out.push_back({std::string(trim(raw)), std::move(hint)});
}

void extract_python(std::string_view content, std::vector<ImportSpec>& out) {
  static const std::regex import_re(R"(^\s*import\s+(.+)$)");
  static const std::regex from_re(R"(^\s*from\s+(\.*[\w.]*)\s+import\s+(.+)$)");
  static const std::regex dotted_re(R"(^\s*([\w.]+)(\s+as\s+\w+)?\s*$)");
  for (auto line : split_lines(content)) {
    const auto stripped = trim(line);
    if (stripped.starts_with("#")) continue;
    if (stripped.find("import") == std::string_view::npos) continue;
    const std::string code = strip_trailing_comment(line, '#');
    std::smatch m;
    if (std::regex_match(code, m, from_re)) {
      // One spec per imported name: `from pkg import b` may name the module
      // pkg/b.py; the resolver falls back to pkg itself when it does not.
      const std::string module = m[1].str();
      const bool only_dots = module.find_first_not_of('.') == std::string::npos;
      std::string names = m[2].str();
      std::erase_if(names, [](char c) { return c == '(' || c == ')'; });
      std::size_t start = 0;
      while (start <= names.size()) {
        auto end = names.find(',', start);
        if (end == std::string::npos) end = names.size();
        std::smatch nm;
        const std::string item(names.substr(start, end - start));
        if (std::regex_match(item, nm, dotted_re)) {
          push_spec(out, line, only_dots ? module + nm[1].str() : module + "." + nm[1].str());
        } else if (trim(item) == "*") {
          push_spec(out, line, module);
        }
        start = end + 1;
      }
    } else if (std::regex_match(code, m, import_re)) {
      const std::string list = m[1].str();
      std::size_t start = 0;
      while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string::npos) end = list.size();
        std::smatch nm;
        const std::string item(list.substr(start, end - start));
        if (std::regex_match(item, nm, dotted_re)) push_spec(out, line, nm[1].str());
        start = end + 1;
      }
    }
  }
}

bool is_c_like_comment_line(std::string_view stripped) {
  return stripped.starts_with("//") || stripped.starts_with("/*") || stripped.starts_with("*");
}

void extract_c(std::string_view content, std::vector<ImportSpec>& out) {
  static const std::regex include_re(R"(^\s*#\s*include\s*\"([^\"]+)\")");
  for (auto line : split_lines(content)) {
    const auto stripped = trim(line);
    if (is_c_like_comment_line(stripped) || stripped.find("include") == std::string_view::npos)
      continue;
    std::cmatch m;
    if (std::regex_search(line.data(), line.data() + line.size(), m, include_re))
      push_spec(out, line, m[1].str());
  }
}

void extract_go(std::string_view content, std::vector<ImportSpec>& out) {
  static const std::regex single_re(R"(^\s*import\s+(?:[\w.]+\s+)?[\"`]([^\"`]+)[\"`])");
  static const std::regex block_open_re(R"(^\s*import\s*\()");
  static const std::regex quoted_re(R"([\"`]([^\"`]+)[\"`])");
  bool in_block = false;
  for (auto line : split_lines(content)) {
    const auto stripped = trim(line);
    if (stripped.starts_with("//")) continue;
    std::cmatch m;
    if (in_block) {
      const auto close = stripped.find(')');
      auto body = close == std::string_view::npos ? line : line.substr(0, line.find(')'));
      if (std::regex_search(body.data(), body.data() + body.size(), m, quoted_re))
        push_spec(out, line, m[1].str());
      if (close != std::string_view::npos) in_block = false;
      continue;
    }
    if (std::regex_search(line.data(), line.data() + line.size(), m, block_open_re)) {
      auto rest = line.substr(static_cast<std::size_t>(m.length(0)));
      const auto close = rest.find(')');
      auto body = close == std::string_view::npos ? rest : rest.substr(0, close);
      std::cmatch q;
      if (std::regex_search(body.data(), body.data() + body.size(), q, quoted_re))
        push_spec(out, line, q[1].str());
      in_block = close == std::string_view::npos;
    } else if (std::regex_search(line.data(), line.data() + line.size(), m, single_re)) {
      push_spec(out, line, m[1].str());
    }
  }
}

void extract_java(std::string_view content, std::vector<ImportSpec>& out) {
  static const std::regex import_re(R"(^\s*import\s+(static\s+)?([\w.]+(?:\.\*)?)\s*;)");
  for (auto line : split_lines(content)) {
    const auto stripped = trim(line);
    if (is_c_like_comment_line(stripped) || !stripped.starts_with("import")) continue;
    std::cmatch m;
    if (std::regex_search(line.data(), line.data() + line.size(), m, import_re)) {
      // Static imports name a member; keep the marker so resolution can
      // strip it.
      push_spec(out, line, (m[1].matched ? "static:" : "") + m[2].str());
    }
  }
}

void extract_js(std::string_view content, std::vector<ImportSpec>& out) {
  static const std::regex from_re(R"(\bfrom\s*[\"']([^\"']+)[\"'])");
  static const std::regex bare_import_re(R"(^\s*import\s*[\"']([^\"']+)[\"'])");
  static const std::regex require_re(R"(\brequire\s*\(\s*[\"']([^\"']+)[\"']\s*\))");
  for (auto line : split_lines(content)) {
    const auto stripped = trim(line);
    if (is_c_like_comment_line(stripped)) continue;
    const char* b = line.data();
    const char* e = line.data() + line.size();
    std::cmatch m;
    const bool import_like = stripped.starts_with("import") || stripped.starts_with("export") ||
                             stripped.starts_with("}");
    if (import_like && std::regex_search(b, e, m, from_re)) {
      push_spec(out, line, m[1].str());
    } else if (std::regex_search(b, e, m, bare_import_re)) {
      push_spec(out, line, m[1].str());
    }
    for (std::cregex_iterator it(b, e, require_re), end; it != end; ++it)
      push_spec(out, line, (*it)[1].str());
  }
}

// Joins rel onto dir; nullopt if the result would climb above the root.
std::optional<std::string> resolve_relative(std::string_view dir, std::string_view rel) {
  std::vector<std::string_view> parts = split_path(dir);
  for (auto part : split_path(rel)) {
    if (part == ".") continue;
    if (part == "..") {
      if (parts.empty()) return std::nullopt;
      parts.pop_back();
      continue;
    }
    parts.push_back(part);
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '/';
    out.append(parts[i]);
  }
  return out;
}

std::string dots_to_slashes(std::string_view dotted) {
  std::string s(dotted);
  std::replace(s.begin(), s.end(), '.', '/');
  return s;
}

bool path_has_suffix(std::string_view path, std::string_view suffix) {
  if (path == suffix) return true;
  return path.size() > suffix.size() && path.ends_with(suffix) &&
         path[path.size() - suffix.size() - 1] == '/';
}

class Resolver {
 public:
  explicit Resolver(const Repository& repo) : repo_(repo) {
    for (std::size_t i = 0; i < repo.files.size(); ++i) {
      const auto& f = repo.files[i];
      by_path_.emplace(f.path, i);
      if (f.language == Language::Go && f.kind == FileKind::Code)
        go_dirs_[std::string(dirname_of(f.path))].push_back(i);
      if (basename_of(f.path) == "go.mod") go_module_file_ = i;
    }
    if (go_module_file_) {
      static const std::regex module_re(R"((?:^|\n)\s*module\s+(\S+))");
      std::smatch m;
      const auto& content = repo.files[*go_module_file_].content;
      if (std::regex_search(content, m, module_re)) {
        go_module_ = m[1].str();
        go_module_dir_ = std::string(dirname_of(repo.files[*go_module_file_].path));
      }
    }
  }

  std::vector<std::size_t> resolve(std::size_t importer, const ImportSpec& spec) const {
    const auto& file = repo_.files[importer];
    const std::string_view dir = dirname_of(file.path);
    switch (file.language) {
      case Language::Python: return python(dir, spec.target_hint);
      case Language::C:
      case Language::Cpp: return first_of({resolve_relative(dir, spec.target_hint),
                                           resolve_relative("", spec.target_hint)});
      case Language::Go: return go(spec.target_hint);
      case Language::Java: return java(spec.target_hint);
      case Language::JavaScript:
      case Language::TypeScript: return js(dir, spec.target_hint);
      case Language::Other: return {};
    }
    return {};
  }

 private:
  std::optional<std::size_t> lookup(const std::optional<std::string>& path) const {
    if (!path) return std::nullopt;
    auto it = by_path_.find(*path);
    if (it == by_path_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::size_t> first_of(std::initializer_list<std::optional<std::string>> candidates) const {
    for (const auto& c : candidates) {
      if (auto hit = lookup(c)) return {*hit};
    }
    return {};
  }

  std::vector<std::size_t> python(std::string_view dir, std::string_view hint) const {
    auto hit = python_module(dir, hint);
    if (!hit.empty()) return hit;
    // `from pkg import name` where name is not a module: fall back to pkg.
    const auto dots = hint.find_first_not_of('.');
    if (dots == std::string_view::npos) return {};
    const auto last = hint.find_last_of('.');
    if (last != std::string_view::npos && last >= dots) return python_module(dir, hint.substr(0, last));
    if (dots > 0) return python_module(dir, hint.substr(0, dots));
    return {};
  }

  std::vector<std::size_t> python_module(std::string_view dir, std::string_view hint) const {
    const auto dots = hint.find_first_not_of('.');
    if (dots == std::string_view::npos || dots > 0) {
      // Relative import: one dot is the current package, each extra dot one level up.
      const std::size_t level = dots == std::string_view::npos ? hint.size() : dots;
      std::string base(dir);
      for (std::size_t i = 1; i < level; ++i) {
        auto up = resolve_relative(base, "..");
        if (!up) return {};
        base = *up;
      }
      const auto rest = dots == std::string_view::npos ? std::string{} : dots_to_slashes(hint.substr(dots));
      if (rest.empty()) return first_of({resolve_relative(base, "__init__.py")});
      return first_of({resolve_relative(base, rest + ".py"), resolve_relative(base, rest + "/__init__.py")});
    }
    const std::string rel = dots_to_slashes(hint);
    return first_of({resolve_relative("", rel + ".py"), resolve_relative("", rel + "/__init__.py"),
                     resolve_relative(dir, rel + ".py"), resolve_relative(dir, rel + "/__init__.py")});
  }

  std::vector<std::size_t> go(std::string_view hint) const {
    if (!go_module_.empty()) {
      std::optional<std::string> exact;
      if (hint == go_module_) {
        exact = go_module_dir_;
      } else if (hint.starts_with(go_module_ + "/")) {
        exact = resolve_relative(go_module_dir_, hint.substr(go_module_.size() + 1));
      }
      if (exact) {
        auto it = go_dirs_.find(*exact);
        if (it != go_dirs_.end()) return it->second;
      }
    }
    // Longest directory whose segments are a suffix of the import path.
    const auto hint_parts = split_path(hint);
    std::size_t best_len = 0;
    const std::vector<std::size_t>* best = nullptr;
    for (const auto& [d, files] : go_dirs_) {
      const auto parts = split_path(d);
      if (parts.empty() || parts.size() > hint_parts.size() || parts.size() <= best_len) continue;
      if (std::equal(parts.begin(), parts.end(), hint_parts.end() - static_cast<std::ptrdiff_t>(parts.size()))) {
        best_len = parts.size();
        best = &files;
      }
    }
    return best ? *best : std::vector<std::size_t>{};
  }

  std::vector<std::size_t> java(std::string_view hint) const {
    bool is_static = false;
    if (hint.starts_with("static:")) {
      is_static = true;
      hint.remove_prefix(7);
    }
    if (hint.ends_with(".*")) {
      const std::string pkg_dir = dots_to_slashes(hint.substr(0, hint.size() - 2));
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < repo_.files.size(); ++i) {
        const auto& f = repo_.files[i];
        if (f.language == Language::Java && path_has_suffix(dirname_of(f.path), pkg_dir)) out.push_back(i);
      }
      if (!out.empty() || !is_static) return out;
      // `import static a.b.C.*` names the members of class C.
      return java_class(hint.substr(0, hint.size() - 2));
    }
    auto hits = java_class(hint);
    if (hits.empty() && is_static) {
      const auto dot = hint.rfind('.');
      if (dot != std::string_view::npos) hits = java_class(hint.substr(0, dot));
    }
    return hits;
  }

  std::vector<std::size_t> java_class(std::string_view dotted) const {
    const std::string suffix = dots_to_slashes(dotted) + ".java";
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < repo_.files.size(); ++i) {
      if (path_has_suffix(repo_.files[i].path, suffix)) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> js(std::string_view dir, std::string_view hint) const {
    const bool relative = hint == "." || hint == ".." || hint.starts_with("./") || hint.starts_with("../");
    if (!relative) return {};
    auto base = resolve_relative(dir, hint);
    if (!base) return {};
    static constexpr std::string_view kExts[] = {".ts", ".tsx", ".js", ".jsx"};
    if (auto hit = lookup(base)) return {*hit};
    for (auto ext : kExts) {
      if (auto hit = lookup(*base + std::string(ext))) return {*hit};
    }
    for (auto ext : kExts) {
      if (auto hit = lookup(resolve_relative(*base, "index" + std::string(ext)))) return {*hit};
    }
    return {};
  }

  const Repository& repo_;
  std::unordered_map<std::string, std::size_t> by_path_;
  std::map<std::string, std::vector<std::size_t>> go_dirs_;
  std::optional<std::size_t> go_module_file_;
  std::string go_module_;
  std::string go_module_dir_;
};

}  // namespace

std::vector<std::size_t> ImportGraph::degrees() const {
  std::vector<std::size_t> deg(paths.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.importer];
    ++deg[e.imported];
  }
  return deg;
}

std::vector<ImportSpec> extract_imports(const SourceFile& file) {
  std::vector<ImportSpec> out;
  if (file.kind != FileKind::Code) return out;
  switch (file.language) {
    case Language::Python: extract_python(file.content, out); break;
    case Language::C:
    case Language::Cpp: extract_c(file.content, out); break;
    case Language::Go: extract_go(file.content, out); break;
    case Language::Java: extract_java(file.content, out); break;
    case Language::JavaScript:
    case Language::TypeScript: extract_js(file.content, out); break;
    case Language::Other: break;
  }
  return out;
}

std::vector<Edge> resolve_imports(const Repository& repo, std::size_t file_index,
                                  const std::vector<ImportSpec>& specs, std::size_t* dropped) {
  const Resolver resolver(repo);
  std::vector<Edge> edges;
  for (const auto& spec : specs) {
    bool any = false;
    for (auto target : resolver.resolve(file_index, spec)) {
      if (target == file_index) continue;
      edges.push_back({file_index, target});
      any = true;
    }
    if (!any && dropped) ++*dropped;
  }
  return edges;
}

ImportGraph build_graph(const Repository& repo) {
  ImportGraph graph;
  graph.paths.reserve(repo.files.size());
  for (const auto& f : repo.files) graph.paths.push_back(f.path);

  const Resolver resolver(repo);
  std::set<Edge> edges;
  for (std::size_t i = 0; i < repo.files.size(); ++i) {
    const auto& f = repo.files[i];
    if (f.kind != FileKind::Code) continue;
    graph.nodes.push_back(i);
    for (const auto& spec : extract_imports(f)) {
      bool any = false;
      for (auto target : resolver.resolve(i, spec)) {
        if (target == i || repo.files[target].kind != FileKind::Code) continue;
        edges.insert({i, target});
        any = true;
      }
      if (!any) ++graph.dropped_imports;
    }
  }
  graph.edges.assign(edges.begin(), edges.end());
  return graph;
}

namespace {

std::vector<std::size_t> path_rank(const ImportGraph& graph) {
  std::vector<std::size_t> order(graph.paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return graph.paths[a] < graph.paths[b]; });
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

ImportGraph break_cycles(ImportGraph graph) {
  const std::size_t n = graph.paths.size();
  const auto rank = path_rank(graph);
  auto by_path = [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; };

  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : graph.edges) adj[e.importer].push_back(e.imported);
  for (auto& children : adj) std::sort(children.begin(), children.end(), by_path);

  std::vector<std::size_t> roots;
  {
    std::set<std::size_t> seen;
    for (auto v : graph.nodes) seen.insert(v);
    for (const auto& e : graph.edges) {
      seen.insert(e.importer);
      seen.insert(e.imported);
    }
    roots.assign(seen.begin(), seen.end());
    std::sort(roots.begin(), roots.end(), by_path);
  }

  enum class Color : unsigned char { White, Grey, Black };
  std::vector<Color> color(n, Color::White);
  std::set<Edge> back;
  struct Frame {
    std::size_t node;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  for (auto root : roots) {
    if (color[root] != Color::White) continue;
    color[root] = Color::Grey;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next_child == adj[top.node].size()) {
        color[top.node] = Color::Black;
        stack.pop_back();
        continue;
      }
      const std::size_t u = top.node;
      const std::size_t v = adj[u][top.next_child++];
      if (color[v] == Color::Grey) {
        back.insert({u, v});
      } else if (color[v] == Color::White) {
        color[v] = Color::Grey;
        stack.push_back({v, 0});
      }
    }
  }

  std::vector<Edge> kept;
  for (const auto& e : graph.edges) {
    if (back.count(e)) {
      graph.removed_edges.push_back(e);
    } else {
      kept.push_back(e);
    }
  }
  graph.edges = std::move(kept);
  std::sort(graph.removed_edges.begin(), graph.removed_edges.end());
  return graph;
}

std::vector<std::size_t> topo_order(const ImportGraph& graph) {
  const std::size_t n = graph.paths.size();
  std::vector<std::size_t> pending_deps(n, 0);
  std::vector<std::vector<std::size_t>> importers(n);
  std::vector<bool> connected(n, false);
  for (const auto& e : graph.edges) {
    ++pending_deps[e.importer];
    importers[e.imported].push_back(e.importer);
    connected[e.importer] = connected[e.imported] = true;
  }

  std::set<std::pair<std::string_view, std::size_t>> ready;
  std::size_t total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!connected[v]) continue;
    ++total;
    if (pending_deps[v] == 0) ready.emplace(graph.paths[v], v);
  }

  std::vector<std::size_t> order;
  order.reserve(total);
  while (!ready.empty()) {
    const auto v = ready.begin()->second;
    ready.erase(ready.begin());
    order.push_back(v);
    for (auto u : importers[v]) {
      if (--pending_deps[u] == 0) ready.emplace(graph.paths[u], u);
    }
  }
  if (order.size() != total) throw std::logic_error("topo_order: import graph still has a cycle");
  return order;
}

std::vector<std::string> graph_audit_lines(const std::string& repo_id, const ImportGraph& graph) {
  std::vector<std::pair<Edge, bool>> all;
  for (const auto& e : graph.edges) all.emplace_back(e, false);
  for (const auto& e : graph.removed_edges) all.emplace_back(e, true);
  std::sort(all.begin(), all.end());
  std::vector<std::string> lines;
  lines.reserve(all.size());
  for (const auto& [e, removed] : all) {
    nlohmann::ordered_json j;
    j["repo_id"] = repo_id;
    j["edge"] = {graph.paths[e.importer], graph.paths[e.imported]};
    j["removed"] = removed;
    lines.push_back(j.dump());
  }
  return lines;
}

}  // namespace repoctx
