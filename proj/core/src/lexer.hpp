/*
 * Copyright (c) 2026, The archref Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ARCHREF_SRC_LEXER_HPP_
#define ARCHREF_SRC_LEXER_HPP_

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "archref/frontend.hpp"

namespace archref {

struct Token {
  enum class Kind { kWord, kString, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t end_line = 0;
  std::size_t end_column = 0;

  bool is(std::string_view punct) const { return kind == Kind::kPunct && text == punct; }
  bool is_word(std::string_view word) const {
    return kind == Kind::kWord && text == word;
  }
};

inline bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' ||
         c == '.' || c == '-';
}

inline bool is_name(const std::string& s) {
  if (s.empty()) return false;
  const char c = s[0];
  if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return false;
  for (char x : s) {
    if (!std::isalnum(static_cast<unsigned char>(x)) && x != '_' && x != '\'' &&
        x != '-' && x != '.') {
      return false;
    }
  }
  return true;
}

/// Tokens of the architecture language. '#' starts a comment.
class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : file_(std::move(file)) {
    std::size_t line = 1, col = 1, k = 0;
    auto advance = [&] {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++k;
    };
    while (k < text.size()) {
      const char c = text[k];
      if (c == '#') {
        while (k < text.size() && text[k] != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      Token t;
      t.line = line;
      t.column = col;
      if (c == '-' && k + 1 < text.size() && text[k + 1] == '>') {
        t.kind = Token::Kind::kPunct;
        t.text = "->";
        advance();
        advance();
      } else if (c == '"') {
        t.kind = Token::Kind::kString;
        advance();
        while (k < text.size() && text[k] != '"') {
          if (text[k] == '\n') fail_at(line, col, "unterminated string");
          if (text[k] == '\\' && k + 1 < text.size()) advance();
          t.text += text[k];
          advance();
        }
        if (k >= text.size()) fail_at(t.line, t.column, "unterminated string");
        advance();
      } else if (word_char(c)) {
        t.kind = Token::Kind::kWord;
        while (k < text.size() && word_char(text[k]) &&
               !(text[k] == '-' && k + 1 < text.size() && text[k + 1] == '>')) {
          t.text += text[k];
          advance();
        }
      } else if (std::string_view("{}()[],;:=*|").find(c) != std::string_view::npos) {
        t.kind = Token::Kind::kPunct;
        t.text = std::string(1, c);
        advance();
      } else {
        fail_at(line, col, std::string("unexpected character '") + c + "'");
      }
      t.end_line = line;
      t.end_column = col - 1;
      tokens_.push_back(std::move(t));
    }
    Token end;
    end.line = end.end_line = line;
    end.column = end.end_column = col;
    tokens_.push_back(std::move(end));
  }

  bool at_end() const { return tokens_[pos_].kind == Token::Kind::kEnd; }
  const Token& peek() const { return tokens_[pos_]; }
  const Token& last() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }

  Token next() {
    Token t = tokens_[pos_];
    if (!at_end()) ++pos_;
    return t;
  }

  bool accept(std::string_view punct) {
    if (!peek().is(punct)) return false;
    ++pos_;
    return true;
  }

  Token expect(std::string_view punct) {
    if (!peek().is(punct)) {
      fail(peek(), "expected '" + std::string(punct) + "', found " + found(peek()));
    }
    return next();
  }

  Token expect_name() {
    if (peek().kind != Token::Kind::kWord || !is_name(peek().text)) {
      fail(peek(), "expected a name, found " + found(peek()));
    }
    return next();
  }

  Token expect_value() {
    if (peek().kind != Token::Kind::kWord && peek().kind != Token::Kind::kString) {
      fail(peek(), "expected a value, found " + found(peek()));
    }
    return next();
  }

  SourceSpan span(const Token& from, const Token& to) const {
    return {file_, from.line, from.column, to.end_line, to.end_column};
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    Diagnostic d;
    d.message = message;
    d.span = span(at, at);
    throw ParseError({std::move(d)});
  }

 private:
  static std::string found(const Token& t) {
    if (t.kind == Token::Kind::kEnd) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail_at(std::size_t line, std::size_t col,
                            const std::string& message) const {
    Diagnostic d;
    d.message = message;
    d.span = {file_, line, col, line, col};
    throw ParseError({std::move(d)});
  }

  std::string file_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace archref

#endif  // ARCHREF_SRC_LEXER_HPP_
