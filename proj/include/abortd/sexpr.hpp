#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abortd {

struct SourceLoc {
  int line = 0;  // 1-based, 0 = unknown
  int col = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, const std::string& msg)
      : std::runtime_error(msg), loc(loc) {}
  SourceLoc loc;
};

// Renders "line:col: severity: message" (file prefix added by callers that
// know the file name).
inline std::string format_message(SourceLoc loc, const std::string& severity,
                                  const std::string& msg) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " +
         severity + ": " + msg;
}

namespace sexpr {

struct Node {
  enum class Kind { Symbol, List };
  Kind kind = Kind::Symbol;
  std::string text;         // Symbol only
  std::vector<Node> items;  // List only
  SourceLoc loc;

  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_list() const { return kind == Kind::List; }
  bool is_symbol(std::string_view s) const {
    return kind == Kind::Symbol && text == s;
  }
};

// Reader over a character stream. Comments run from ';' to end of line.
class Reader {
 public:
  explicit Reader(std::string_view input) : input_(input) {}

  // Parses exactly one s-expression; trailing whitespace/comments allowed.
  Node read_one() {
    skip_ws();
    if (at_end()) throw ParseError(loc(), "empty input");
    Node n = read_node();
    skip_ws();
    if (!at_end()) throw ParseError(loc(), "trailing content after expression");
    return n;
  }

 private:
  Node read_node() {
    skip_ws();
    if (at_end()) throw ParseError(loc(), "unexpected end of input");
    char c = peek();
    if (c == '(') return read_list();
    if (c == ')') throw ParseError(loc(), "unbalanced parentheses: unexpected ')'");
    return read_symbol();
  }

  Node read_list() {
    Node n;
    n.kind = Node::Kind::List;
    n.loc = loc();
    get();  // '('
    for (;;) {
      skip_ws();
      if (at_end())
        throw ParseError(n.loc, "unbalanced parentheses: missing ')'");
      if (peek() == ')') {
        get();
        return n;
      }
      n.items.push_back(read_node());
    }
  }

  Node read_symbol() {
    Node n;
    n.kind = Node::Kind::Symbol;
    n.loc = loc();
    while (!at_end() && !is_delim(peek())) n.text.push_back(get());
    if (n.text.empty()) throw ParseError(n.loc, "lexical error: empty token");
    return n;
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  void skip_ws() {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) get();
      if (!at_end() && peek() == ';') {
        while (!at_end() && peek() != '\n') get();
        continue;
      }
      break;
    }
  }

  bool at_end() const { return pos_ >= input_.size(); }
  char peek() const { return input_[pos_]; }
  char get() {
    char c = input_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  SourceLoc loc() const { return {line_, col_}; }

  std::string_view input_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline Node parse(std::string_view text) { return Reader(text).read_one(); }

}  // namespace sexpr
}  // namespace abortd
