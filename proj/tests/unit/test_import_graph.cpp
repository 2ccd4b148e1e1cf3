#include <algorithm>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "repoctx/import_graph.hpp"

using namespace repoctx;

namespace {

std::vector<std::string> hints(const std::string& path, const std::string& content) {
  std::vector<std::string> out;
  for (const auto& s : extract_imports(make_source_file(path, content))) out.push_back(s.target_hint);
  return out;
}

std::set<std::pair<std::string, std::string>> named_edges(const ImportGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto e : g.edges) out.insert({g.paths[e.importer], g.paths[e.imported]});
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs(const std::vector<Edge>& edges) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto e : edges) out.emplace_back(e.importer, e.imported);
  return out;
}

ImportGraph graph_of(std::vector<std::string> names, std::vector<Edge> edges) {
  ImportGraph g;
  g.paths = std::move(names);
  for (std::size_t i = 0; i < g.paths.size(); ++i) g.nodes.push_back(i);
  std::sort(edges.begin(), edges.end());
  g.edges = std::move(edges);
  return g;
}

}  // namespace

TEST_CASE("Python import statements") {
  CHECK(hints("a.py", "from pkg.util import f\n") == std::vector<std::string>{"pkg.util.f"});
  CHECK(hints("a.py", "import os, pkg.b as b\n") == std::vector<std::string>{"os", "pkg.b"});
  CHECK(hints("a.py", "from . import x, y\n") == std::vector<std::string>{".x", ".y"});
  CHECK(hints("a.py", "from ..core import *\n") == std::vector<std::string>{"..core"});
  CHECK(hints("a.py", "# import fake\nx = 'import'\n").empty());
}

TEST_CASE("C and C++ includes") {
  CHECK(hints("m.c", "#include \"lib/math.h\"\n") == std::vector<std::string>{"lib/math.h"});
  CHECK(hints("m.c", "#include <stdio.h>\n").empty());
  CHECK(hints("m.cpp", "  #  include \"x.hpp\" // note\n") == std::vector<std::string>{"x.hpp"});
}

TEST_CASE("Go, Java and JavaScript imports") {
  CHECK(hints("main.go", "import \"fmt\"\nimport (\n\t\"example.com/m/util\"\n\tlog \"github.com/x/log\"\n)\n") ==
        std::vector<std::string>{"fmt", "example.com/m/util", "github.com/x/log"});
  CHECK(hints("A.java", "import java.util.List;\nimport static a.b.C.d;\nimport a.b.*;\n") ==
        std::vector<std::string>{"java.util.List", "static:a.b.C.d", "a.b.*"});
  CHECK(hints("a.js", "import React from \"react\";\nimport \"./side.js\";\nconst x = require('./x');\n") ==
        std::vector<std::string>{"react", "./side.js", "./x"});
}

TEST_CASE("resolution examples") {
  {
    auto repo = make_repository("r", {make_source_file("a.py", "import pkg.b\n"), make_source_file("pkg/b.py", "")});
    auto g = build_graph(repo);
    CHECK(named_edges(g) == std::set<std::pair<std::string, std::string>>{{"a.py", "pkg/b.py"}});
  }
  {
    auto repo = make_repository("r", {make_source_file("m.c", "#include \"m.h\"\n"), make_source_file("m.h", "")});
    CHECK(named_edges(build_graph(repo)) == std::set<std::pair<std::string, std::string>>{{"m.c", "m.h"}});
  }
  {
    auto repo = make_repository("r", {make_source_file("app.js", "import React from \"react\"\n")});
    auto g = build_graph(repo);
    CHECK(g.edges.empty());
    CHECK(g.dropped_imports == 1);
  }
}

TEST_CASE("Python relative imports and from-import fallback") {
  auto repo = make_repository("r", {make_source_file("pkg/__init__.py", ""), make_source_file("pkg/a.py", "from . import b\nfrom .c import thing\n"),
                                    make_source_file("pkg/b.py", ""), make_source_file("pkg/c.py", ""),
                                    make_source_file("main.py", "from pkg import helper\nfrom pkg.a import run\n")});
  CHECK(named_edges(build_graph(repo)) == std::set<std::pair<std::string, std::string>>{
                                              {"pkg/a.py", "pkg/b.py"},
                                              {"pkg/a.py", "pkg/c.py"},
                                              {"main.py", "pkg/__init__.py"},
                                              {"main.py", "pkg/a.py"}});
}

TEST_CASE("Go imports resolve through go.mod to every file of the package") {
  auto repo = make_repository("r", {make_source_file("go.mod", "module example.com/m\n\ngo 1.21\n"),
                                    make_source_file("main.go", "package main\n\nimport \"example.com/m/util\"\n"),
                                    make_source_file("util/a.go", "package util\n"),
                                    make_source_file("util/b.go", "package util\n")});
  CHECK(named_edges(build_graph(repo)) ==
        std::set<std::pair<std::string, std::string>>{{"main.go", "util/a.go"}, {"main.go", "util/b.go"}});
}

TEST_CASE("Java and TypeScript resolution") {
  auto repo = make_repository(
      "r", {make_source_file("src/main/java/a/b/App.java", "package a.b;\nimport a.c.Util;\n"),
            make_source_file("src/main/java/a/c/Util.java", "package a.c;\n"),
            make_source_file("web/index.ts", "import { f } from './lib';\nimport x from '../web/other.js';\n"),
            make_source_file("web/lib/index.ts", ""), make_source_file("web/other.js", "")});
  CHECK(named_edges(build_graph(repo)) == std::set<std::pair<std::string, std::string>>{
                                              {"src/main/java/a/b/App.java", "src/main/java/a/c/Util.java"},
                                              {"web/index.ts", "web/lib/index.ts"},
                                              {"web/index.ts", "web/other.js"}});
}

TEST_CASE("build_graph basics") {
  auto docs_only = make_repository("r", {make_source_file("README.md", "import x\n")});
  auto g = build_graph(docs_only);
  CHECK(g.nodes.empty());
  CHECK(g.edges.empty());

  auto mutual = make_repository("r", {make_source_file("a.py", "import b\n"), make_source_file("b.py", "import a\n")});
  CHECK(build_graph(mutual).edges.size() == 2);

  auto twice = make_repository("r", {make_source_file("a.py", "import b\nimport b\nfrom b import x\n"),
                                     make_source_file("b.py", "")});
  CHECK(build_graph(twice).edges.size() == 1);

  auto self = make_repository("r", {make_source_file("a.py", "import a\n")});
  CHECK(build_graph(self).edges.empty());
}

TEST_CASE("break_cycles on a 2-cycle removes the edge into the earlier path") {
  auto g = break_cycles(graph_of({"A", "B"}, {{0, 1}, {1, 0}}));
  CHECK(g.edges == std::vector<Edge>{{0, 1}});
  CHECK(g.removed_edges == std::vector<Edge>{{1, 0}});
  CHECK_FALSE(oracle::has_cycle(2, pairs(g.edges)));
}

TEST_CASE("break_cycles leaves a DAG alone") {
  auto in = graph_of({"a", "b", "c"}, {{0, 1}, {1, 2}, {0, 2}});
  auto g = break_cycles(in);
  CHECK(g.edges == in.edges);
  CHECK(g.removed_edges.empty());
}

TEST_CASE("break_cycles on a 3-cycle removes exactly C->A") {
  auto g = break_cycles(graph_of({"A", "B", "C"}, {{0, 1}, {1, 2}, {2, 0}}));
  CHECK(g.removed_edges == std::vector<Edge>{{2, 0}});
  CHECK(g.edges.size() == 2);
  CHECK_FALSE(oracle::has_cycle(3, pairs(g.edges)));
}

TEST_CASE("topo_order examples") {
  {
    auto g = graph_of({"a.py", "pkg/b.py"}, {{0, 1}});
    CHECK(topo_order(g) == std::vector<std::size_t>{1, 0});
  }
  CHECK(topo_order(graph_of({"a", "b"}, {})).empty());
  {
    // b->a, c->a, d->b, d->c
    auto g = graph_of({"a", "b", "c", "d"}, {{1, 0}, {2, 0}, {3, 1}, {3, 2}});
    auto order = topo_order(g);
    CHECK(order == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(oracle::is_dependencies_first(order, pairs(g.edges)));
  }
  CHECK_THROWS_AS(topo_order(graph_of({"a", "b"}, {{0, 1}, {1, 0}})), std::logic_error);
}

TEST_CASE("random DAG property: topo order is valid and covers connected nodes") {
  Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    auto g = break_cycles(fixture::random_digraph(rng, 1 + rng.below(12), 30));
    auto order = topo_order(g);
    CHECK(oracle::is_dependencies_first(order, pairs(g.edges)));
    std::set<std::size_t> connected;
    for (auto e : g.edges) {
      connected.insert(e.importer);
      connected.insert(e.imported);
    }
    CHECK(std::set<std::size_t>(order.begin(), order.end()) == connected);
    CHECK(order.size() == connected.size());
  }
}

TEST_CASE("random repositories resolve exactly the intended imports") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    auto r = fixture::random_repository(rng, "r" + std::to_string(t));
    CHECK(named_edges(build_graph(r.repo)) == r.edges);
  }
}

TEST_CASE("graph audit lines") {
  auto repo = make_repository("r", {make_source_file("a.py", "import b\n"), make_source_file("b.py", "import a\n")});
  auto g = break_cycles(build_graph(repo));
  auto lines = graph_audit_lines("r", g);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == R"({"repo_id":"r","edge":["a.py","b.py"],"removed":false})");
  CHECK(lines[1] == R"({"repo_id":"r","edge":["b.py","a.py"],"removed":true})");
}
