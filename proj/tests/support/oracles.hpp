#pragma once

// Reference implementations used to check the library. Each one takes a
// different route from the code under test: closure matrices instead of
// DFS, memoized recursion instead of a rolling DP table, shunting-yard
// instead of recursive descent.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oracle {

// Transitive closure by repeated squaring over a boolean matrix; a cycle
// exists iff some node reaches itself.
inline bool has_cycle(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (auto [a, b] : edges) reach[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return true;
  return false;
}

// Every edge (importer, imported) must have imported earlier in order.
inline bool is_dependencies_first(const std::vector<std::size_t>& order,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (auto [importer, imported] : edges) {
    auto a = pos.find(importer), b = pos.find(imported);
    if (a == pos.end() || b == pos.end()) return false;
    if (!(b->second < a->second)) return false;
  }
  return true;
}

template <typename T>
std::size_t lcs_length(const std::vector<T>& a, const std::vector<T>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  auto go = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t r = a[i] == b[j] ? 1 + self(self, i + 1, j + 1)
                                 : std::max(self(self, i + 1, j), self(self, i, j + 1));
    memo[key] = r;
    return r;
  };
  return go(go, 0, 0);
}

// Word-and-punctuation tokens, written separately from the library: a
// maximal run of [A-Za-z0-9_], or one non-space character (UTF-8 aware).
inline std::vector<std::string> wordpunct(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto word = [](unsigned char c) { return std::isalnum(c) || c == '_'; };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
    } else if (c < 0x80 && word(c)) {
      std::size_t j = i;
      while (j < s.size() && static_cast<unsigned char>(s[j]) < 0x80 && word(static_cast<unsigned char>(s[j]))) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
    } else {
      std::size_t len = c < 0x80 ? 1 : c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 1;
      len = std::min(len, s.size() - i);
      out.emplace_back(s.substr(i, len));
      i += len;
    }
  }
  return out;
}

inline double lcs_similarity(std::string_view a, std::string_view b) {
  auto ta = wordpunct(a), tb = wordpunct(b);
  if (ta.empty() && tb.empty()) return 1.0;
  return 2.0 * static_cast<double>(lcs_length(ta, tb)) / static_cast<double>(ta.size() + tb.size());
}

// Shunting-yard over + - * and parentheses, evaluated in 128-bit.
inline __int128 evaluate(std::string_view expr) {
  std::vector<__int128> values;
  std::vector<char> ops;
  auto prec = [](char op) { return op == '*' ? 2 : 1; };
  auto reduce = [&] {
    if (values.size() < 2 || ops.empty()) throw std::runtime_error("bad expression");
    __int128 b = values.back();
    values.pop_back();
    __int128 a = values.back();
    values.pop_back();
    char op = ops.back();
    ops.pop_back();
    values.push_back(op == '+' ? a + b : op == '-' ? a - b : a * b);
  };
  bool expect_operand = true;
  for (std::size_t i = 0; i < expr.size();) {
    char c = expr[i];
    if (c == ' ') {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && expect_operand && i + 1 < expr.size() &&
                std::isdigit(static_cast<unsigned char>(expr[i + 1])))) {
      bool neg = c == '-';
      if (neg) ++i;
      __int128 v = 0;
      while (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) v = v * 10 + (expr[i++] - '0');
      values.push_back(neg ? -v : v);
      expect_operand = false;
    } else if (c == '(') {
      ops.push_back(c);
      ++i;
      expect_operand = true;
    } else if (c == ')') {
      while (!ops.empty() && ops.back() != '(') reduce();
      if (ops.empty()) throw std::runtime_error("unbalanced");
      ops.pop_back();
      ++i;
      expect_operand = false;
    } else if (c == '+' || c == '-' || c == '*') {
      while (!ops.empty() && ops.back() != '(' && prec(ops.back()) >= prec(c)) reduce();
      ops.push_back(c);
      ++i;
      expect_operand = true;
    } else {
      throw std::runtime_error(std::string("unexpected character ") + c);
    }
  }
  while (!ops.empty()) reduce();
  if (values.size() != 1) throw std::runtime_error("bad expression");
  return values.back();
}

inline std::string to_decimal(__int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s += static_cast<char>('0' + static_cast<int>(u % 10));
    u /= 10;
  }
  if (neg) s += '-';
  std::reverse(s.begin(), s.end());
  return s;
}

// Reads the key function out of a prompt and answers as a flawless model would.
inline std::optional<std::string> perfect_retriever(std::string_view prompt) {
  const std::string_view head = "def key():";
  auto at = prompt.find(head);
  if (at == std::string_view::npos) return std::nullopt;
  auto ret = prompt.find("return ", at);
  if (ret == std::string_view::npos) return std::nullopt;
  ret += 7;
  auto end = prompt.find('\n', ret);
  return to_decimal(evaluate(prompt.substr(ret, end - ret)));
}

}  // namespace oracle
