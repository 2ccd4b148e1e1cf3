#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "repoctx/units.hpp"

using namespace repoctx;

namespace {

std::string span(std::string_view content, const CodeUnit& u) { return std::string(content.substr(u.offset, u.length)); }

const CodeUnit* find(const std::vector<CodeUnit>& units, std::string_view qualified) {
  auto it = std::find_if(units.begin(), units.end(), [&](const CodeUnit& u) { return u.qualified_name == qualified; });
  return it == units.end() ? nullptr : &*it;
}

const CodeUnit* by_name(const std::vector<CodeUnit>& units, std::string_view name) {
  auto it = std::find_if(units.begin(), units.end(), [&](const CodeUnit& u) { return u.name == name; });
  return it == units.end() ? nullptr : &*it;
}

}  // namespace

TEST_CASE("Python function with a docstring") {
  const std::string src = "def f(x):\n    \"d\"\n    return x\n";
  auto units = extract_file_units(src, Language::Python, "a.py");
  REQUIRE(units.size() == 1);
  CHECK(units[0].kind == UnitKind::Function);
  CHECK(units[0].name == "f");
  CHECK(units[0].doc_text == "d");
  CHECK(span(src, units[0]) == "def f(x):\n    \"d\"\n    return x");
  CHECK(units[0].signature == "def f(x):");
}

TEST_CASE("Python class with two methods") {
  const std::string src =
      "class C:\n    \"\"\"A class.\"\"\"\n\n    def m1(self):\n        return 1\n\n    @property\n    def m2(self):\n"
      "        '''Second.'''\n        return 2\n\n\nx = C()\n";
  auto units = extract_file_units(src, Language::Python, "c.py");
  REQUIRE(units.size() == 3);
  CHECK(units[0].kind == UnitKind::Class);
  CHECK(units[0].doc_text == "A class.");
  const auto* m1 = find(units, "C.m1");
  const auto* m2 = find(units, "C.m2");
  REQUIRE(m1);
  REQUIRE(m2);
  CHECK(m1->kind == UnitKind::Method);
  CHECK(span(src, *m1) == "def m1(self):\n        return 1");
  CHECK(m2->doc_text == "Second.");
  CHECK(span(src, units[0]).ends_with("return 2"));
}

TEST_CASE("Python: strings that look like code are ignored") {
  const std::string src =
      "TEXT = \"\"\"\ndef fake():\n    pass\n\"\"\"\n\n\nasync def real(a,\n         b):\n    return (a +\n"
      "            b)\n";
  auto units = extract_file_units(src, Language::Python, "s.py");
  REQUIRE(units.size() == 1);
  CHECK(units[0].name == "real");
  CHECK(span(src, units[0]).ends_with("b)"));
}

TEST_CASE("Python: nested functions are not separate units") {
  const std::string src = "def outer():\n    def inner():\n        return 1\n    return inner\n";
  auto units = extract_file_units(src, Language::Python, "n.py");
  REQUIRE(units.size() == 1);
  CHECK(units[0].name == "outer");
}

TEST_CASE("Go function on one line") {
  const std::string src = "package m\n\nfunc Add(a, b int) int { return a + b }\n";
  auto units = extract_file_units(src, Language::Go, "m.go");
  REQUIRE(units.size() == 1);
  CHECK(units[0].kind == UnitKind::Function);
  CHECK(units[0].name == "Add");
  CHECK(span(src, units[0]) == "func Add(a, b int) int { return a + b }");
}

TEST_CASE("Go methods and types") {
  const std::string src =
      "package m\n\n// Point is a point.\ntype Point struct {\n\tX int\n}\n\n// Len returns the length.\n"
      "func (p *Point) Len() int {\n\treturn p.X\n}\n";
  auto units = extract_file_units(src, Language::Go, "p.go");
  const auto* len = find(units, "Point.Len");
  REQUIRE(len);
  CHECK(len->kind == UnitKind::Method);
  CHECK(len->doc_text == "Len returns the length.");
  CHECK(span(src, *len) == "func (p *Point) Len() int {\n\treturn p.X\n}");
  const auto* point = find(units, "Point");
  REQUIRE(point);
  CHECK(point->kind == UnitKind::Class);
}

TEST_CASE("C++ classes, methods, namespaces and masking") {
  const std::string src =
      "#include <map>\n#define BRACE {\nnamespace ns {\n\n/// Holds state.\nclass Box {\n public:\n"
      "  int get() const { return v_; }\n  const char* s() { return \"}\"; }\n\n private:\n  int v_ = 0;\n};\n\n"
      "// Doubles.\nstatic int twice(int x) {\n  if (x) { return x * 2; }\n  return 0;\n}\n\n}  // namespace ns\n";
  auto units = extract_file_units(src, Language::Cpp, "b.cpp");
  const auto* box = by_name(units, "Box");
  REQUIRE(box);
  CHECK(box->kind == UnitKind::Class);
  CHECK(box->doc_text == "Holds state.");
  const auto* twice = by_name(units, "twice");
  REQUIRE(twice);
  CHECK(twice->kind == UnitKind::Function);
  CHECK(twice->doc_text == "Doubles.");
  CHECK(span(src, *twice) == "static int twice(int x) {\n  if (x) { return x * 2; }\n  return 0;\n}");
  const auto* get = by_name(units, "get");
  REQUIRE(get);
  CHECK(get->kind == UnitKind::Method);
  const auto* s = by_name(units, "s");
  REQUIRE(s);
  CHECK(span(src, *s) == "const char* s() { return \"}\"; }");
}

TEST_CASE("C: control statements are not functions") {
  const std::string src = "int main(void) {\n  for (int i = 0; i < 3; i++) {\n    while (0) {}\n  }\n  return 0;\n}\n";
  auto units = extract_file_units(src, Language::C, "m.c");
  REQUIRE(units.size() == 1);
  CHECK(units[0].name == "main");
}

TEST_CASE("Java class with methods and Javadoc") {
  const std::string src =
      "package a;\n\n/** Utility. */\npublic final class U {\n  /**\n   * Adds.\n   */\n  @Override\n"
      "  public static int add(int a, int b) {\n    return a + b;\n  }\n\n  U() {}\n}\n";
  auto units = extract_file_units(src, Language::Java, "U.java");
  const auto* cls = find(units, "U");
  REQUIRE(cls);
  CHECK(cls->kind == UnitKind::Class);
  CHECK(cls->doc_text == "Utility.");
  const auto* add = find(units, "U.add");
  REQUIRE(add);
  CHECK(add->kind == UnitKind::Method);
  CHECK(add->doc_text == "Adds.");
  // Annotations belong to the declaration.
  CHECK(span(src, *add).starts_with("@Override\n  public static int add(int a, int b) {"));
  CHECK(span(src, *add).ends_with("}"));
}

TEST_CASE("JavaScript functions, arrows and classes") {
  const std::string src =
      "// Sums.\nexport function sum(a, b) {\n  return `${a}}` + b;\n}\n\nconst twice = (x) => {\n  return x * 2;\n};\n\n"
      "class Shape {\n  area() {\n    return 0;\n  }\n}\n";
  auto units = extract_file_units(src, Language::JavaScript, "a.js");
  const auto* sum = find(units, "sum");
  REQUIRE(sum);
  CHECK(sum->doc_text == "Sums.");
  CHECK(span(src, *sum) == "export function sum(a, b) {\n  return `${a}}` + b;\n}");
  const auto* twice = find(units, "twice");
  REQUIRE(twice);
  CHECK(twice->kind == UnitKind::Function);
  const auto* area = find(units, "Shape.area");
  REQUIRE(area);
  CHECK(area->kind == UnitKind::Method);
}

TEST_CASE("extract_units rebases onto the packed document") {
  auto repo = make_repository("r", {make_source_file("a.py", "def f():\n    return 1\n"),
                                    make_source_file("b.go", "package b\n\nfunc G() {}\n")});
  auto doc = pack_repository(repo, break_cycles(build_graph(repo)));
  auto units = extract_units(doc);
  REQUIRE(units.size() == 2);
  CHECK(doc.text.substr(units[0].offset, units[0].length) == "def f():\n    return 1");
  CHECK(units[0].file_path == "a.py");
  CHECK(doc.text.substr(units[1].offset, units[1].length) == "func G() {}");
}

TEST_CASE("generated corpora: every known unit is found with exact bytes") {
  Rng rng(123);
  for (int t = 0; t < 30; ++t) {
    auto s = fixture::synth_repository(rng, "s" + std::to_string(t));
    auto doc = pack_repository(s.repo, break_cycles(build_graph(s.repo)));
    auto units = extract_units(doc);
    for (const auto& known : s.units) {
      auto it = std::find_if(units.begin(), units.end(), [&](const CodeUnit& u) {
        return u.file_path == known.file && doc.text.compare(u.offset, u.length, known.source) == 0 &&
               u.length == known.source.size();
      });
      CHECK_MESSAGE(it != units.end(), known.file << ": " << known.name);
    }
  }
}

TEST_CASE("mask_non_code keeps offsets") {
  const std::string src = "int a = 1; // }\nchar* s = \"{\";\n/* { */\n";
  auto masked = mask_non_code(src, Language::C);
  CHECK(masked.size() == src.size());
  CHECK(masked.find('{') == std::string::npos);
  CHECK(masked.find('}') == std::string::npos);
  CHECK(std::count(masked.begin(), masked.end(), '\n') == 3);
}
