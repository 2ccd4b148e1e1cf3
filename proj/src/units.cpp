#include "repoctx/units.hpp"

#include <algorithm>
#include <optional>
#include <regex>

#include "repoctx/text.hpp"

namespace repoctx {

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Class: return "class";
    case UnitKind::Method: return "method";
    case UnitKind::Function: return "function";
  }
  return "function";
}

namespace {

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space_byte(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

struct PhysicalLine {
  std::size_t begin = 0;  // offset of first byte
  std::size_t end = 0;    // offset one past the last byte, excluding "\r\n"
};

std::vector<PhysicalLine> physical_lines(std::string_view content) {
  std::vector<PhysicalLine> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto nl = content.find('\n', start);
    const std::size_t next = nl == std::string_view::npos ? content.size() : nl + 1;
    std::size_t end = nl == std::string_view::npos ? content.size() : nl;
    if (end > start && content[end - 1] == '\r') --end;
    lines.push_back({start, end});
    start = next;
  }
  return lines;
}

// ---------------------------------------------------------------- Python

struct PyLine {
  PhysicalLine span;
  std::size_t indent = 0;
  bool logical_start = false;  // begins a new logical line
  bool blank = false;          // whitespace only
  bool comment_only = false;
};

std::size_t indent_width(std::string_view line) {
  std::size_t w = 0;
  for (char c : line) {
    if (c == ' ') {
      ++w;
    } else if (c == '\t') {
      w = (w / 8 + 1) * 8;
    } else {
      break;
    }
  }
  return w;
}

std::vector<PyLine> python_lines(std::string_view content) {
  std::vector<PyLine> out;
  char triple = 0;  // active triple-quote character
  int depth = 0;
  bool continuation = false;
  for (const auto& pl : physical_lines(content)) {
    PyLine line;
    line.span = pl;
    const auto text = content.substr(pl.begin, pl.end - pl.begin);
    line.indent = indent_width(text);
    const auto stripped = trim(text);
    line.logical_start = triple == 0 && depth == 0 && !continuation;
    line.blank = stripped.empty();
    line.comment_only = !line.blank && stripped.front() == '#' && line.logical_start;
    continuation = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (triple) {
        if (c == '\\') {
          ++i;
        } else if (c == triple && text.substr(i, 3) == std::string(3, triple)) {
          triple = 0;
          i += 2;
        }
        continue;
      }
      if (c == '#') break;
      if (c == '"' || c == '\'') {
        if (text.substr(i, 3) == std::string(3, c)) {
          triple = c;
          i += 2;
          continue;
        }
        for (++i; i < text.size() && text[i] != c; ++i) {
          if (text[i] == '\\') ++i;
        }
        continue;
      }
      if (c == '(' || c == '[' || c == '{') ++depth;
      if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
      if (c == '\\' && i + 1 == text.size()) continuation = true;
    }
    out.push_back(line);
  }
  return out;
}

std::string clean_docstring(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto nl = raw.find('\n', start);
    if (nl == std::string_view::npos) nl = raw.size();
    lines.push_back(trim(raw.substr(start, nl - start)));
    start = nl + 1;
  }
  std::string out;
  for (auto l : lines) {
    if (!out.empty() || !l.empty()) {
      if (!out.empty()) out += '\n';
      out.append(l);
    }
  }
  return std::string(trim(out));
}

// Docstring literal starting at content[pos], or nullopt.
std::optional<std::string> python_docstring_at(std::string_view content, std::size_t pos) {
  std::size_t i = pos;
  while (i < content.size() && (content[i] == 'r' || content[i] == 'R' || content[i] == 'u' || content[i] == 'U')) ++i;
  if (i >= content.size() || (content[i] != '"' && content[i] != '\'')) return std::nullopt;
  const char q = content[i];
  if (content.substr(i, 3) == std::string(3, q)) {
    const auto close = content.find(std::string(3, q), i + 3);
    if (close == std::string_view::npos) return std::nullopt;
    return clean_docstring(content.substr(i + 3, close - i - 3));
  }
  std::size_t j = i + 1;
  while (j < content.size() && content[j] != q && content[j] != '\n') {
    if (content[j] == '\\') ++j;
    ++j;
  }
  if (j >= content.size() || content[j] != q) return std::nullopt;
  return clean_docstring(content.substr(i + 1, j - i - 1));
}

std::vector<CodeUnit> extract_python(std::string_view content, const std::string& file_path) {
  static const std::regex def_re(R"(^(?:async\s+)?def\s+([A-Za-z_]\w*))");
  static const std::regex class_re(R"(^class\s+([A-Za-z_]\w*))");

  const auto lines = python_lines(content);
  struct Scope {
    std::size_t indent;
    bool is_class;
    std::optional<std::size_t> unit;  // index into units, if recorded
    std::string qualified;
    std::size_t header_line;
    std::size_t end;
  };
  std::vector<CodeUnit> units;
  std::vector<Scope> scopes;

  auto close_scope = [&](const Scope& s) {
    if (!s.unit) return;
    auto& u = units[*s.unit];
    u.length = s.end - u.offset;
    // Docstring: first statement of the body.
    for (std::size_t j = s.header_line + 1; j < lines.size(); ++j) {
      const auto& l = lines[j];
      if (!l.logical_start || l.blank || l.comment_only) continue;
      if (l.span.begin >= s.end || l.indent <= s.indent) break;
      if (auto doc = python_docstring_at(content, l.span.begin + l.indent)) u.doc_text = *doc;
      break;
    }
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.blank) continue;
    const bool opens_statement = line.logical_start && !line.comment_only;
    if (opens_statement) {
      while (!scopes.empty() && scopes.back().indent >= line.indent) {
        close_scope(scopes.back());
        scopes.pop_back();
      }
    }
    for (auto& s : scopes) {
      if (!line.comment_only || line.indent > s.indent) s.end = line.span.end;
    }
    if (!opens_statement) continue;

    const std::string stripped(content.substr(line.span.begin + line.indent, line.span.end - line.span.begin - line.indent));
    std::smatch m;
    const bool is_def = std::regex_search(stripped, m, def_re);
    const bool is_class = !is_def && std::regex_search(stripped, m, class_re);
    if (!is_def && !is_class) continue;

    const std::string name = m[1].str();
    const Scope* parent = scopes.empty() ? nullptr : &scopes.back();
    const bool recordable = parent == nullptr || (parent->is_class && parent->unit);
    Scope scope{line.indent, is_class, std::nullopt, "", i, line.span.end};
    if (recordable) {
      CodeUnit u;
      u.kind = is_class ? UnitKind::Class : (parent ? UnitKind::Method : UnitKind::Function);
      u.name = name;
      u.qualified_name = parent ? parent->qualified + "." + name : name;
      u.file_path = file_path;
      u.offset = line.span.begin + line.indent;
      std::string header(stripped);
      for (std::size_t j = i + 1; j < lines.size() && !lines[j].logical_start; ++j)
        header.append(" ").append(content.substr(lines[j].span.begin, lines[j].span.end - lines[j].span.begin));
      u.signature = collapse_whitespace(header);
      scope.qualified = u.qualified_name;
      scope.unit = units.size();
      units.push_back(std::move(u));
    }
    scopes.push_back(std::move(scope));
  }
  while (!scopes.empty()) {
    close_scope(scopes.back());
    scopes.pop_back();
  }
  std::sort(units.begin(), units.end(), [](const CodeUnit& a, const CodeUnit& b) { return a.offset < b.offset; });
  return units;
}

// ---------------------------------------------------------------- brace languages

bool is_brace_language(Language lang) {
  switch (lang) {
    case Language::C:
    case Language::Cpp:
    case Language::Go:
    case Language::Java:
    case Language::JavaScript:
    case Language::TypeScript: return true;
    default: return false;
  }
}

std::string mask_brace_language(std::string_view src, Language lang) {
  std::string out(src);
  auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < out.size(); ++k) {
      if (out[k] != '\n') out[k] = ' ';
    }
  };
  const bool c_family = lang == Language::C || lang == Language::Cpp;
  const bool js = lang == Language::JavaScript || lang == Language::TypeScript;
  bool at_line_start = true;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      at_line_start = true;
      ++i;
      continue;
    }
    if (c_family && at_line_start && c == '#') {
      std::size_t j = i;
      while (j < src.size()) {
        auto nl = src.find('\n', j);
        if (nl == std::string_view::npos) {
          j = src.size();
          break;
        }
        std::size_t last = nl;
        while (last > j && (src[last - 1] == '\r' || src[last - 1] == ' ')) --last;
        j = nl;
        if (last > 0 && src[last - 1] == '\\') {
          ++j;
          continue;
        }
        break;
      }
      blank(i, j);
      i = j;
      continue;
    }
    if (c != ' ' && c != '\t' && c != '\r') at_line_start = false;
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      auto nl = src.find('\n', i);
      if (nl == std::string_view::npos) nl = src.size();
      blank(i, nl);
      i = nl;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto close = src.find("*/", i + 2);
      const std::size_t end = close == std::string_view::npos ? src.size() : close + 2;
      blank(i, end);
      i = end;
      continue;
    }
    if (lang == Language::Cpp && c == 'R' && i + 1 < src.size() && src[i + 1] == '"' &&
        (i == 0 || !is_word_byte(static_cast<unsigned char>(src[i - 1])))) {
      const auto paren = src.find('(', i + 2);
      if (paren != std::string_view::npos && paren - i - 2 <= 16) {
        const std::string terminator = ")" + std::string(src.substr(i + 2, paren - i - 2)) + "\"";
        auto close = src.find(terminator, paren + 1);
        const std::size_t end = close == std::string_view::npos ? src.size() : close + terminator.size();
        blank(i, end);
        i = end;
        continue;
      }
    }
    if (lang == Language::Java && src.substr(i, 3) == "\"\"\"") {
      auto close = src.find("\"\"\"", i + 3);
      const std::size_t end = close == std::string_view::npos ? src.size() : close + 3;
      blank(i, end);
      i = end;
      continue;
    }
    if (c == '`' && (js || lang == Language::Go)) {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '`') {
        if (js && src[j] == '\\') ++j;
        ++j;
      }
      const std::size_t end = std::min(src.size(), j + 1);
      blank(i, end);
      i = end;
      continue;
    }
    if (c == '"' || c == '\'') {
      // C++14 digit separator: 1'000'000.
      if (c == '\'' && lang == Language::Cpp && i > 0 && std::isxdigit(static_cast<unsigned char>(src[i - 1])) &&
          i + 1 < src.size() && std::isxdigit(static_cast<unsigned char>(src[i + 1]))) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c && src[j] != '\n') {
        if (src[j] == '\\') ++j;
        ++j;
      }
      const std::size_t end = (j < src.size() && src[j] == c) ? j + 1 : j;
      // Keep the quotes so headers like `extern "C"` stay recognizable.
      blank(i + 1, end > i + 1 ? end - 1 : end);
      i = end;
      continue;
    }
    ++i;
  }
  return out;
}

const std::regex& go_func_re() {
  static const std::regex re(
      R"(^func\s*(?:\(\s*(?:[A-Za-z_]\w*\s+)?\*?\s*([A-Za-z_]\w*)\s*(?:\[[^\]]*\])?\s*\)\s*)?([A-Za-z_]\w*)\s*(?:\[[^\]]*\]\s*)?\()");
  return re;
}

bool is_keyword(std::string_view word) {
  static constexpr std::string_view kWords[] = {
      "if",     "for",    "while",  "switch", "catch",  "return", "sizeof", "else",     "do",
      "try",    "new",    "delete", "throw",  "case",   "function", "synchronized", "with",
      "typeof", "await",  "yield",  "using",  "decltype", "alignof", "static_assert", "foreach",
      "elif",   "defer",  "go",     "select", "super",  "this",   "import", "export", "assert"};
  return std::find(std::begin(kWords), std::end(kWords), word) != std::end(kWords);
}

enum class FrameKind { Transparent, Class, Function, Other };

struct Classified {
  FrameKind frame = FrameKind::Other;
  std::string name;          // unqualified
  std::string owner;         // receiver / qualifier, dotted
  std::size_t decl_offset = 0;  // offset of the declaration within the header
};

// Finds the matching ')' for the '(' at pos, or npos.
std::size_t match_paren(std::string_view s, std::size_t pos) {
  int depth = 0;
  for (std::size_t i = pos; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

std::string strip_annotations(std::string s) {
  static const std::regex anno_re(R"(@[A-Za-z_][\w.]*(\s*\([^()]*\))?)");
  return std::regex_replace(s, anno_re, " ");
}

// Start of the declaration inside a header: walk up contiguous non-blank
// lines, stopping at statements that clearly belong elsewhere.
std::size_t declaration_start(std::string_view header, Language lang) {
  std::vector<PhysicalLine> lines = physical_lines(header);
  if (lines.empty()) return header.size();
  if (lang == Language::Go) {
    for (std::size_t k = lines.size(); k-- > 0;) {
      const auto t = trim(header.substr(lines[k].begin, lines[k].end - lines[k].begin));
      if (t.starts_with("func") || t.starts_with("type ")) return lines[k].begin + (t.data() - (header.data() + lines[k].begin));
    }
  }
  std::size_t start_line = lines.size();
  for (std::size_t k = lines.size(); k-- > 0;) {
    const auto t = trim(header.substr(lines[k].begin, lines[k].end - lines[k].begin));
    if (t.empty()) {
      if (start_line == lines.size()) continue;  // trailing blank lines before '{'
      break;
    }
    if (k + 1 < lines.size() || start_line != lines.size()) {
      if (t.starts_with("import ") || t.starts_with("package ") || t == ")" || t.ends_with(":") ||
          t.starts_with("export {") || t == "]")
        break;
    }
    start_line = k;
  }
  if (start_line == lines.size()) return header.size();
  const auto& l = lines[start_line];
  std::size_t off = l.begin;
  while (off < l.end && is_space_byte(static_cast<unsigned char>(header[off]))) ++off;
  return off;
}

Classified classify_header(std::string_view header_masked, Language lang, FrameKind parent) {
  Classified out;
  out.decl_offset = declaration_start(header_masked, lang);
  const std::string decl = collapse_whitespace(header_masked.substr(out.decl_offset));
  if (decl.empty()) return out;

  if (lang == Language::Go) {
    static const std::regex type_re(R"(^type\s+([A-Za-z_]\w*)(?:\[[^\]]*\])?\s+(struct|interface)\s*$)");
    std::smatch m;
    if (std::regex_search(decl, m, go_func_re())) {
      out.frame = FrameKind::Function;
      out.name = m[2].str();
      out.owner = m[1].str();
    } else if (std::regex_match(decl, m, type_re)) {
      out.frame = FrameKind::Class;
      out.name = m[1].str();
    }
    return out;
  }

  static const std::regex namespace_re(R"(^(?:inline\s+)?namespace\b[\w:\s]*$|^extern\s*"\s*"$)");
  if (std::regex_match(decl, namespace_re)) {
    out.frame = FrameKind::Transparent;
    return out;
  }

  const std::string clean = collapse_whitespace(strip_annotations(decl));
  const auto open = clean.find('(');

  if (lang == Language::JavaScript || lang == Language::TypeScript) {
    static const std::regex arrow_re(
        R"(^(?:export\s+)?(?:const|let|var)\s+([A-Za-z_$][\w$]*)\s*(?::[^=]+)?=\s*(?:async\s+)?(?:\([^()]*\)|[A-Za-z_$][\w$]*)\s*(?::\s*[^=]+)?=>$)");
    static const std::regex field_arrow_re(
        R"(^(?:(?:public|private|protected|static|readonly)\s+)*([A-Za-z_$][\w$]*)\s*(?::[^=]+)?=\s*(?:async\s+)?(?:\([^()]*\)|[A-Za-z_$][\w$]*)\s*(?::\s*[^=]+)?=>$)");
    std::smatch m;
    if (std::regex_match(clean, m, arrow_re) ||
        (parent == FrameKind::Class && std::regex_match(clean, m, field_arrow_re))) {
      out.frame = FrameKind::Function;
      out.name = m[1].str();
      return out;
    }
  }

  static const std::regex class_re(
      R"((?:^|\s)(?:class|struct|interface|union|enum(?:\s+class|\s+struct)?)\s+([A-Za-z_$][\w$]*))");
  std::smatch cm;
  const bool class_like = std::regex_search(clean, cm, class_re);
  if (class_like && (open == std::string::npos || static_cast<std::size_t>(cm.position(0)) < open)) {
    const std::string before = clean.substr(0, static_cast<std::size_t>(cm.position(0)));
    if (before.find('=') == std::string::npos && before.find("new ") == std::string::npos) {
      out.frame = FrameKind::Class;
      out.name = cm[1].str();
    }
    return out;
  }
  if (open == std::string::npos) return out;
  const auto close = match_paren(clean, open);
  if (close == std::string::npos) return out;

  static const std::regex name_re(
      R"(([A-Za-z_$~][\w$]*(?:\s*(?:::|\.)\s*~?[A-Za-z_$][\w$]*)*)\s*(?:<[^()]*>)?\s*$)");
  const std::string before = clean.substr(0, open);
  std::smatch nm;
  if (!std::regex_search(before, nm, name_re)) return out;
  std::string chain = nm[1].str();
  std::erase_if(chain, [](char c) { return c == ' '; });
  const std::string prefix = before.substr(0, static_cast<std::size_t>(nm.position(0)));
  if (prefix.find('=') != std::string::npos || prefix.find('(') != std::string::npos ||
      prefix.find(')') != std::string::npos || prefix.find(',') != std::string::npos)
    return out;
  static const std::regex bad_prefix_re(R"((?:^|\s)(?:return|new|else|throw|case|await|delete)\s*$)");
  if (std::regex_search(prefix, bad_prefix_re)) return out;
  const std::string after = clean.substr(close + 1);
  if (after.find('=') != std::string::npos && after.find("=>") == std::string::npos) return out;
  if (after.find("=>") != std::string::npos) return out;  // inline arrow callbacks

  std::string qualifier;
  std::string name = chain;
  for (std::string sep : {"::", "."}) {
    auto pos = name.rfind(sep);
    if (pos != std::string::npos) {
      qualifier = name.substr(0, pos);
      name = name.substr(pos + sep.size());
      break;
    }
  }
  if (name.empty() || is_keyword(name) || is_keyword(chain)) return out;
  std::size_t p = 0;
  while ((p = qualifier.find("::")) != std::string::npos) qualifier.replace(p, 2, ".");
  out.frame = FrameKind::Function;
  out.name = name;
  out.owner = qualifier;
  return out;
}

std::string strip_comment_markers(std::string_view block) {
  std::string out;
  std::size_t start = 0;
  while (start <= block.size()) {
    auto nl = block.find('\n', start);
    if (nl == std::string_view::npos) nl = block.size();
    auto line = trim(block.substr(start, nl - start));
    start = nl + 1;
    if (line.starts_with("/**")) {
      line.remove_prefix(3);
    } else if (line.starts_with("/*")) {
      line.remove_prefix(2);
    } else if (line.starts_with("///")) {
      line.remove_prefix(3);
    } else if (line.starts_with("//")) {
      line.remove_prefix(2);
    } else if (line.starts_with("*") && !line.starts_with("*/")) {
      line.remove_prefix(1);
    }
    if (line.ends_with("*/")) line.remove_suffix(2);
    line = trim(line);
    if (line.empty() && out.empty()) continue;
    if (!out.empty()) out += '\n';
    out.append(line);
  }
  return std::string(trim(out));
}

// Comment block immediately above `pos` (only whitespace in between).
std::string preceding_comment(std::string_view content, std::size_t pos) {
  std::size_t end = pos;
  while (end > 0 && is_space_byte(static_cast<unsigned char>(content[end - 1]))) --end;
  if (end >= 2 && content.substr(end - 2, 2) == "*/") {
    const auto open = content.rfind("/*", end - 2);
    if (open == std::string_view::npos) return {};
    return strip_comment_markers(content.substr(open, end - open));
  }
  // Run of `//` lines.
  std::size_t block_begin = std::string_view::npos;
  std::size_t line_end = end;
  while (line_end > 0) {
    auto line_begin = content.rfind('\n', line_end - 1);
    line_begin = line_begin == std::string_view::npos ? 0 : line_begin + 1;
    const auto t = trim(content.substr(line_begin, line_end - line_begin));
    if (!t.starts_with("//")) break;
    block_begin = line_begin;
    if (line_begin == 0) break;
    line_end = line_begin - 1;
  }
  if (block_begin == std::string_view::npos) return {};
  return strip_comment_markers(content.substr(block_begin, end - block_begin));
}

std::vector<CodeUnit> extract_brace(std::string_view content, Language lang, const std::string& file_path) {
  const std::string masked = mask_brace_language(content, lang);
  struct Frame {
    FrameKind kind;
    std::optional<std::size_t> unit;
    std::string qualified;  // for classes
  };
  std::vector<Frame> frames;
  std::vector<CodeUnit> units;
  std::vector<bool> closed;
  std::size_t last_delim = 0;  // one past the previous ';', '{' or '}'

  for (std::size_t i = 0; i < masked.size(); ++i) {
    const char c = masked[i];
    if (c == ';') {
      last_delim = i + 1;
    } else if (c == '{') {
      const FrameKind parent = frames.empty() ? FrameKind::Transparent : frames.back().kind;
      Frame frame{FrameKind::Other, std::nullopt, ""};
      if (parent == FrameKind::Transparent || parent == FrameKind::Class) {
        const std::string_view header(masked.data() + last_delim, i - last_delim);
        Classified cls = classify_header(header, lang, parent);
        frame.kind = cls.frame;
        if (cls.frame == FrameKind::Class || cls.frame == FrameKind::Function) {
          CodeUnit u;
          const std::string parent_q = (parent == FrameKind::Class && !frames.empty()) ? frames.back().qualified : "";
          std::string owner = cls.owner;
          if (!parent_q.empty()) owner = owner.empty() ? parent_q : parent_q + "." + owner;
          u.name = cls.name;
          u.qualified_name = owner.empty() ? cls.name : owner + "." + cls.name;
          if (cls.frame == FrameKind::Class) {
            u.kind = UnitKind::Class;
          } else {
            u.kind = owner.empty() ? UnitKind::Function : UnitKind::Method;
          }
          u.file_path = file_path;
          u.offset = last_delim + cls.decl_offset;
          u.signature = collapse_whitespace(content.substr(u.offset, i - u.offset));
          u.doc_text = preceding_comment(content, u.offset);
          frame.qualified = u.qualified_name;
          frame.unit = units.size();
          units.push_back(std::move(u));
          closed.push_back(false);
        }
      }
      frames.push_back(std::move(frame));
      last_delim = i + 1;
    } else if (c == '}') {
      if (!frames.empty()) {
        if (auto idx = frames.back().unit) {
          units[*idx].length = i + 1 - units[*idx].offset;
          closed[*idx] = true;
        }
        frames.pop_back();
      }
      last_delim = i + 1;
    }
  }
  std::vector<CodeUnit> out;
  for (std::size_t k = 0; k < units.size(); ++k) {
    if (closed[k]) out.push_back(std::move(units[k]));
  }
  std::sort(out.begin(), out.end(), [](const CodeUnit& a, const CodeUnit& b) { return a.offset < b.offset; });
  return out;
}

}  // namespace

std::string mask_non_code(std::string_view content, Language language) {
  if (!is_brace_language(language)) return std::string(content);
  return mask_brace_language(content, language);
}

std::vector<CodeUnit> extract_file_units(std::string_view content, Language language,
                                         const std::string& file_path) {
  if (language == Language::Python) return extract_python(content, file_path);
  if (is_brace_language(language)) return extract_brace(content, language, file_path);
  return {};
}

std::vector<CodeUnit> extract_units(const PackedDocument& doc) {
  std::vector<CodeUnit> all;
  for (const auto& seg : doc.segments) {
    const std::string_view content(doc.text.data() + seg.offset, seg.length);
    for (auto& u : extract_file_units(content, detect_language(seg.path), seg.path)) {
      u.offset += seg.offset;
      all.push_back(std::move(u));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const CodeUnit& a, const CodeUnit& b) { return a.offset < b.offset; });
  return all;
}

}  // namespace repoctx
