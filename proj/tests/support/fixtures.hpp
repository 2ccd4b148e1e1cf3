#pragma once

// Random inputs for property tests. Everything is driven by repoctx::Rng so
// a failing case can be replayed from its seed.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>
#include <string>
#include <utility>
#include <vector>

#include "repoctx/corpus.hpp"
#include "repoctx/packer.hpp"
#include "repoctx/text.hpp"

namespace fixture {

using repoctx::Rng;

struct RandomRepo {
  repoctx::Repository repo;
  // Intended import edges by path: (importer, imported).
  std::set<std::pair<std::string, std::string>> edges;
};

// Python and C files spread over a few directories, plus documentation,
// build manifests and data files. Imports are written so that each one
// resolves to exactly one file.
inline RandomRepo random_repository(Rng& rng, const std::string& id, std::size_t max_files = 30,
                                    std::size_t max_edges = 60) {
  static const char* kDirs[] = {"", "pkg", "lib", "pkg/sub", "tools"};
  static const char* kExtras[] = {"README.md", "docs/guide.md", "Makefile", "setup.py", "pkg/CMakeLists.txt",
                                  "data/x.txt", "notes.txt", "LICENSE", "tools/config.yaml"};
  struct CodeFile {
    std::string path;
    bool python;
    std::string module;  // dotted module for Python, include path for C
  };
  // Leaves room for every extra file so the total stays within max_files.
  const std::size_t n_code = 2 + rng.below(max_files - std::size(kExtras) - 2);
  std::vector<CodeFile> code;
  for (std::size_t i = 0; i < n_code; ++i) {
    const std::string dir = kDirs[rng.below(std::size(kDirs))];
    const bool python = rng.below(3) != 0;
    const std::string stem = (python ? "m" : "h") + std::to_string(i);
    const std::string path = repoctx::join_path(dir, stem + (python ? ".py" : ".h"));
    std::string module = python ? path.substr(0, path.size() - 3) : path;
    if (python) std::replace(module.begin(), module.end(), '/', '.');
    code.push_back({path, python, module});
  }

  RandomRepo out;
  std::vector<std::vector<std::size_t>> imports(code.size());
  const std::size_t n_edges = rng.below(max_edges + 1);
  for (std::size_t e = 0; e < n_edges; ++e) {
    auto a = static_cast<std::size_t>(rng.below(code.size()));
    auto b = static_cast<std::size_t>(rng.below(code.size()));
    if (a == b || code[a].python != code[b].python) continue;
    imports[a].push_back(b);
    out.edges.insert({code[a].path, code[b].path});
  }

  std::vector<repoctx::SourceFile> files;
  for (std::size_t i = 0; i < code.size(); ++i) {
    std::string body;
    for (auto b : imports[i]) body += code[i].python ? "import " + code[b].module + "\n" : "#include \"" + code[b].module + "\"\n";
    if (code[i].python) {
      body += "\n\ndef f" + std::to_string(i) + "(x):\n    return x + " + std::to_string(rng.below(100)) + "\n";
    } else {
      body += "\nint f" + std::to_string(i) + "(int x) { return x * " + std::to_string(rng.below(100)) + "; }\n";
    }
    if (rng.below(5) == 0 && !body.empty()) body.pop_back();  // some files lack a final newline
    files.push_back(repoctx::make_source_file(code[i].path, body));
  }
  for (const char* extra : kExtras) {
    if (rng.below(2) == 0) files.push_back(repoctx::make_source_file(extra, std::string("content of ") + extra + "\n"));
  }
  if (rng.below(4) == 0) files.push_back(repoctx::make_source_file("empty.txt", ""));
  out.repo = repoctx::make_repository(id, std::move(files));
  return out;
}

// Random digraph on n nodes as an ImportGraph whose every node is code.
inline repoctx::ImportGraph random_digraph(Rng& rng, std::size_t n, std::size_t max_edges) {
  repoctx::ImportGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    g.paths.push_back("n" + std::string(i < 10 ? "0" : "") + std::to_string(i));
    g.nodes.push_back(i);
  }
  std::set<repoctx::Edge> edges;
  const std::size_t m = rng.below(max_edges + 1);
  for (std::size_t e = 0; e < m; ++e) {
    auto a = static_cast<std::size_t>(rng.below(n));
    auto b = static_cast<std::size_t>(rng.below(n));
    if (a != b) edges.insert({a, b});
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

// A documented function or method together with the exact bytes the
// extractor is expected to report for it. Sources are unique within a repo.
struct KnownUnit {
  std::string file;
  std::string name;
  std::string source;
};

struct SynthRepo {
  repoctx::Repository repo;
  std::vector<KnownUnit> units;
};

inline SynthRepo synth_repository(Rng& rng, const std::string& id) {
  SynthRepo out;
  std::vector<repoctx::SourceFile> files;
  files.push_back(repoctx::make_source_file("README.md", "# " + id + "\n\nSynthetic test repository.\n"));
  const std::size_t n_files = 1 + rng.below(4);
  for (std::size_t f = 0; f < n_files; ++f) {
    const auto lang = rng.below(5);
    const std::size_t n_funcs = 1 + rng.below(8);
    std::string content;
    std::string path;
    auto add = [&](const std::string& name, const std::string& prefix, const std::string& src,
                   const std::string& suffix) {
      content += prefix + src + suffix;
      out.units.push_back({path, name, src});
    };
    switch (lang) {
      case 0: {
        path = "src/mod" + std::to_string(f) + ".py";
        content = "import os\n\n\n";
        for (std::size_t i = 0; i < n_funcs; ++i) {
          const std::string name = "func_" + std::to_string(f) + "_" + std::to_string(i);
          std::string src = "def " + name + "(a, b):\n    \"\"\"Combine a and b, variant " + std::to_string(i) +
                            ".\"\"\"\n    total = a * " + std::to_string(rng.below(50)) + "\n    return total + b";
          add(name, "", src, "\n\n\n");
        }
        const std::string cls = "Holder" + std::to_string(f);
        content += "class " + cls + ":\n    \"\"\"Keeps a value.\"\"\"\n\n";
        const std::string msrc = "def get(self):\n        \"\"\"Return the value.\"\"\"\n        return self.value_" +
                                 std::to_string(f);
        content += "    " + msrc + "\n";
        out.units.push_back({path, cls + ".get", msrc});
        break;
      }
      case 1: {
        path = "pkg/file" + std::to_string(f) + ".go";
        content = "package pkg\n\nimport \"fmt\"\n\n";
        for (std::size_t i = 0; i < n_funcs; ++i) {
          const std::string name = "Func" + std::to_string(f) + "x" + std::to_string(i);
          std::string src = "func " + name + "(a, b int) int {\n\tif a > b {\n\t\treturn a - b\n\t}\n\treturn b + " +
                            std::to_string(rng.below(50)) + "\n}";
          add(name, "// " + name + " combines two integers.\n", src, "\n\n");
        }
        break;
      }
      case 2: {
        path = "src/unit" + std::to_string(f) + ".cpp";
        content = "#include <vector>\n#include \"unit.h\"\n\nnamespace demo {\n\n";
        for (std::size_t i = 0; i < n_funcs; ++i) {
          const std::string name = "combine_" + std::to_string(f) + "_" + std::to_string(i);
          std::string src = "int " + name + "(int a, int b) {\n  // braces in strings: \"{\"\n  return a * " +
                            std::to_string(rng.below(50)) + " + b;\n}";
          add(name, "/// Combines a and b.\n", src, "\n\n");
        }
        content += "}  // namespace demo\n";
        break;
      }
      case 3: {
        path = "src/main/java/demo/Util" + std::to_string(f) + ".java";
        const std::string cls = "Util" + std::to_string(f);
        content = "package demo;\n\nimport java.util.List;\n\npublic class " + cls + " {\n";
        for (std::size_t i = 0; i < n_funcs; ++i) {
          const std::string name = "combine" + std::to_string(f) + "_" + std::to_string(i);
          std::string src = "public static int " + name + "(int a, int b) {\n        return a - b * " +
                            std::to_string(rng.below(50)) + ";\n    }";
          content += "    /** Combines two values. */\n    " + src + "\n\n";
          out.units.push_back({path, cls + "." + name, src});
        }
        content += "}\n";
        break;
      }
      default: {
        path = "web/lib" + std::to_string(f) + ".js";
        content = "import { x } from \"./other.js\";\n\n";
        for (std::size_t i = 0; i < n_funcs; ++i) {
          const std::string name = "combine" + std::to_string(f) + "_" + std::to_string(i);
          std::string src = "function " + name + "(a, b) {\n  const s = `${a}{`;\n  return s + b + " +
                            std::to_string(rng.below(50)) + ";\n}";
          add(name, "// Joins a and b.\n", src, "\n\n");
        }
        break;
      }
    }
    files.push_back(repoctx::make_source_file(path, content));
  }
  out.repo = repoctx::make_repository(id, std::move(files));
  return out;
}

// Writes a repository to disk under root/repo.id.
inline void write_repository(const std::filesystem::path& root, const repoctx::Repository& repo) {
  for (const auto& f : repo.files) {
    const auto p = root / repo.id / f.path;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << f.content;
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Fresh scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::size_t counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("repoctx-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace fixture
