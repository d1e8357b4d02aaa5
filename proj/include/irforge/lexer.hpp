//===-- lexer.hpp - Token scanning for textual LLVM-IR ----------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Low-level scanning utilities shared by the module parser and the textual
// function slicer. Types and constants are treated as opaque tokens: the
// scanners only need to find their boundaries, never interpret them.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/ir.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge::lex {

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '$' || c == '.' || c == '_';
}

inline bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '.' || c == '_';
}

// Remove a trailing ';' comment, respecting string literals. LLVM IR strings
// never contain escaped quotes (quotes are written as \22), so a bare '"'
// always toggles string state.
inline std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"')
      in_string = !in_string;
    else if (c == ';' && !in_string)
      return std::string(line.substr(0, i));
  }
  return std::string(line);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

// One comment-stripped, trimmed line of input. Lines whose '(' or '['
// brackets stay open are joined with their successors, which flattens
// multi-line switch tables and wrapped operand lists. The source byte range
// covers the original physical lines.
struct LogicalLine {
  std::string text;
  std::size_t line_no = 0;   // 1-based first physical line
  std::size_t src_begin = 0; // byte offset into the original text
  std::size_t src_end = 0;   // one past the final physical line (incl. '\n')
};

inline std::vector<LogicalLine> logical_lines(std::string_view text) {
  std::vector<LogicalLine> out;
  std::size_t pos = 0, line_no = 0;
  LogicalLine pending;
  int open = 0; // net ( and [ depth of the pending logical line
  bool have_pending = false;

  auto flush = [&] {
    if (have_pending) {
      out.push_back(pending);
      have_pending = false;
      open = 0;
    }
  };

  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    std::string stripped = strip_comment(text.substr(pos, next - pos));
    std::string_view body = trim(stripped);

    if (!body.empty()) {
      if (!have_pending) {
        pending = LogicalLine{std::string(body), line_no, pos, next};
        have_pending = true;
      } else {
        pending.text += ' ';
        pending.text += body;
        pending.src_end = next;
      }
      bool in_string = false;
      for (char c : body) {
        if (c == '"')
          in_string = !in_string;
        if (in_string)
          continue;
        if (c == '(' || c == '[')
          ++open;
        else if (c == ')' || c == ']')
          --open;
      }
      if (open <= 0)
        flush();
    } else if (have_pending && open <= 0) {
      flush();
    }
    pos = next;
  }
  flush();
  return out;
}

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return eof() ? '\0' : s[pos]; }
  char peek_at(std::size_t off) const {
    return pos + off < s.size() ? s[pos + off] : '\0';
  }
  void skip_ws() {
    while (!eof() && (s[pos] == ' ' || s[pos] == '\t'))
      ++pos;
  }
  bool consume(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string_view rest() const { return s.substr(pos); }
};

// "...": quotes inside LLVM strings are always written as \22 escapes, so the
// next '"' closes the literal.
inline std::string scan_string(Cursor &c) {
  std::string out;
  if (c.peek() != '"')
    return out;
  out.push_back('"');
  ++c.pos;
  while (!c.eof() && c.peek() != '"') {
    out.push_back(c.peek());
    ++c.pos;
  }
  if (!c.eof()) {
    out.push_back('"');
    ++c.pos;
  }
  return out;
}

inline std::string scan_word(Cursor &c) {
  c.skip_ws();
  std::string out;
  while (!c.eof() && is_word_char(c.peek())) {
    out.push_back(c.peek());
    ++c.pos;
  }
  return out;
}

// A sigil-led token: %name, @name, %"quoted name", !name. Returns text
// including the sigil.
inline std::string scan_value_token(Cursor &c) {
  c.skip_ws();
  std::string out;
  char sigil = c.peek();
  if (sigil != '%' && sigil != '@' && sigil != '!')
    return out;
  out.push_back(sigil);
  ++c.pos;
  if (c.peek() == '"') {
    out += scan_string(c);
    return out;
  }
  while (!c.eof() && (is_ident_char(c.peek()) || c.peek() == '-')) {
    out.push_back(c.peek());
    ++c.pos;
  }
  return out;
}

// Balanced scan over any of ([{< ... >}]) with string awareness. Appends the
// group to `out` with whitespace runs collapsed to single spaces. Returns
// false on unbalanced input.
inline bool scan_group(Cursor &c, std::string &out) {
  std::size_t depth = 0;
  bool first = true;
  bool last_was_space = false;
  do {
    if (c.eof())
      return false;
    char ch = c.peek();
    if (ch == '"') {
      out += scan_string(c);
      last_was_space = false;
      first = false;
      continue;
    }
    if (ch == ' ' || ch == '\t') {
      if (!last_was_space && !first) {
        out.push_back(' ');
        last_was_space = true;
      }
      ++c.pos;
      continue;
    }
    if (ch == '(' || ch == '[' || ch == '{' || ch == '<')
      ++depth;
    else if (ch == ')' || ch == ']' || ch == '}' || ch == '>')
      --depth;
    out.push_back(ch);
    last_was_space = false;
    first = false;
    ++c.pos;
  } while (depth > 0);
  return true;
}

// Scans one type token: primitive words, named types, arrays, vectors,
// structs, plus pointer / addrspace / function-type suffixes. The result is
// an opaque canonical string; returns nullopt when the cursor is not at a
// type.
inline std::optional<std::string> scan_type(Cursor &c) {
  c.skip_ws();
  std::string out;
  char ch = c.peek();
  if (ch == '[' || ch == '<' || ch == '{') {
    if (!scan_group(c, out))
      return std::nullopt;
  } else if (ch == '%') {
    out = scan_value_token(c);
    if (out.size() <= 1)
      return std::nullopt;
  } else if ((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
             ch == '_') {
    out = scan_word(c);
    if (out.empty())
      return std::nullopt;
  } else {
    return std::nullopt;
  }

  // Suffixes: '*', 'addrspace(N)*', function-type argument lists.
  for (;;) {
    if (c.peek() == '*') {
      out.push_back('*');
      ++c.pos;
      continue;
    }
    std::size_t save = c.pos;
    c.skip_ws();
    if (c.peek() == '(') {
      out.push_back(' ');
      if (!scan_group(c, out))
        return std::nullopt;
      continue;
    }
    if (c.peek() == '*') {
      // space before '*' occurs after addrspace groups
      out.push_back('*');
      ++c.pos;
      continue;
    }
    if (c.peek() == 'a') {
      std::size_t word_start = c.pos;
      std::string w = scan_word(c);
      if (w == "addrspace" && c.peek() == '(') {
        out += " addrspace";
        if (!scan_group(c, out))
          return std::nullopt;
        continue;
      }
      c.pos = word_start;
    }
    c.pos = save;
    break;
  }
  return out;
}

inline bool all_digits(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  return true;
}

// Words that may open a constant expression: `op [flags] ( ... )`.
inline bool starts_constant_expr(std::string_view w) {
  return w == "getelementptr" || w == "bitcast" || w == "ptrtoint" ||
         w == "inttoptr" || w == "addrspacecast" || w == "trunc" ||
         w == "zext" || w == "sext" || w == "fptrunc" || w == "fpext" ||
         w == "fptoui" || w == "fptosi" || w == "uitofp" || w == "sitofp" ||
         w == "icmp" || w == "fcmp" || w == "select" || w == "add" ||
         w == "sub" || w == "mul" || w == "shl" || w == "lshr" ||
         w == "ashr" || w == "and" || w == "or" || w == "xor" ||
         w == "extractvalue" || w == "insertvalue" || w == "extractelement" ||
         w == "insertelement" || w == "shufflevector" ||
         w == "blockaddress" || w == "dso_local_equivalent" ||
         w == "no_cfi";
}

// Scans one metadata token: !15, !name, !{...}, !"...", !DIExpression(...).
inline std::string scan_metadata(Cursor &c) {
  c.skip_ws();
  std::string out;
  if (c.peek() != '!')
    return out;
  out.push_back('!');
  ++c.pos;
  if (c.peek() == '{') {
    scan_group(c, out);
    return out;
  }
  if (c.peek() == '"') {
    out += scan_string(c);
    return out;
  }
  while (!c.eof() && (is_ident_char(c.peek()) || c.peek() == '-')) {
    out.push_back(c.peek());
    ++c.pos;
  }
  if (c.peek() == '(')
    scan_group(c, out);
  return out;
}

// Scans one operand and classifies it. `label_type` marks the operand
// position as a branch-target label.
inline OperandRef scan_operand(Cursor &c, bool label_type = false) {
  c.skip_ws();
  OperandRef op;
  char ch = c.peek();

  if (ch == '%') {
    op.text = scan_value_token(c);
    op.kind = label_type ? OperandRef::Kind::BlockLabel
                         : OperandRef::Kind::Local;
    return op;
  }
  if (ch == '@') {
    op.text = scan_value_token(c);
    op.kind = OperandRef::Kind::Global;
    return op;
  }
  if (ch == '!') {
    op.text = scan_metadata(c);
    op.kind = OperandRef::Kind::Metadata;
    return op;
  }
  if (ch == '"') {
    op.text = scan_string(c);
    op.kind = OperandRef::Kind::OtherConstant;
    return op;
  }
  if (ch == '[' || ch == '{' || ch == '<') {
    scan_group(c, op.text);
    op.kind = OperandRef::Kind::OtherConstant;
    return op;
  }
  if (ch == 'c' && c.peek_at(1) == '"') {
    op.text.push_back('c');
    ++c.pos;
    op.text += scan_string(c);
    op.kind = OperandRef::Kind::OtherConstant;
    return op;
  }
  if ((ch >= '0' && ch <= '9') || ch == '-' || ch == '+') {
    // Numeric literal. Integers are decimal; 0x... literals are float bit
    // patterns in textual IR.
    std::string num;
    if (ch == '-' || ch == '+') {
      num.push_back(ch);
      ++c.pos;
    }
    while (!c.eof()) {
      char d = c.peek();
      bool take = (d >= '0' && d <= '9') || (d >= 'a' && d <= 'f') ||
                  (d >= 'A' && d <= 'F') || d == 'x' || d == 'X' || d == '.';
      if ((d == 'e' || d == 'E') && num.find('.') != std::string::npos)
        take = true;
      if ((d == '+' || d == '-') && !num.empty() &&
          (num.back() == 'e' || num.back() == 'E'))
        take = true;
      if (!take)
        break;
      num.push_back(d);
      ++c.pos;
    }
    op.text = num;
    std::string_view digits(num);
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+'))
      digits.remove_prefix(1);
    if (all_digits(digits)) {
      op.kind = OperandRef::Kind::ConstantInt;
      errno = 0;
      char *end = nullptr;
      long long v = std::strtoll(num.c_str(), &end, 10);
      if (errno == 0 && end && *end == '\0')
        op.int_value = v;
    } else {
      op.kind = OperandRef::Kind::ConstantFp;
    }
    return op;
  }

  std::string w = scan_word(c);
  if (w == "true" || w == "false") {
    op.kind = OperandRef::Kind::ConstantInt;
    op.int_value = w == "true" ? 1 : 0;
    op.text = w;
    return op;
  }
  if (w == "null" || w == "undef" || w == "poison" || w == "none" ||
      w == "zeroinitializer") {
    op.kind = OperandRef::Kind::OtherConstant;
    op.text = w;
    return op;
  }
  if (starts_constant_expr(w)) {
    // constant expression: op [flags...] ( ... )
    op.text = w;
    for (;;) {
      c.skip_ws();
      if (c.peek() == '(') {
        op.text.push_back(' ');
        scan_group(c, op.text);
        break;
      }
      std::string flag = scan_word(c);
      if (flag.empty())
        break;
      op.text += ' ';
      op.text += flag;
    }
    op.kind = OperandRef::Kind::OtherConstant;
    return op;
  }
  // Bare keyword operand (e.g. inline asm handled by the caller, or an
  // unrecognized constant): keep the raw word.
  op.text = w;
  op.kind = OperandRef::Kind::OtherConstant;
  return op;
}

} // namespace irforge::lex
