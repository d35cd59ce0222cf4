#include "cbc/lang/lexer.hpp"

#include <array>
#include <cctype>
#include <limits>

#include "cbc/errors.hpp"

namespace cbc {

namespace {

constexpr std::array<std::string_view, 21> kKeywords = {
    "class", "extends", "abstract", "field",  "ctor",      "method",    "returns",
    "if",    "else",    "while",    "return", "new",       "null",      "true",
    "false", "this",    "public",   "private", "protected", "int", "bool"};

// Two-character operators must be tried before their one-character prefixes.
constexpr std::array<std::string_view, 6> kTwoCharOps = {"==", "!=", "<=", ">=", "&&", "||"};
constexpr std::string_view kOneCharOps = "{}();,.:=<>+-*/!";

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.text = std::string(src.substr(i, j - i));
      tok.kind = is_keyword(tok.text) ? Tok::Keyword : Tok::Ident;
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::uint64_t v = 0;
      bool overflow = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        v = v * 10 + static_cast<std::uint64_t>(src[j] - '0');
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) overflow = true;
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      if (overflow) throw SyntaxError(tok.pos, tok.text, {"integer literal within 64-bit range"});
      tok.kind = Tok::IntLit;
      tok.value = static_cast<std::int64_t>(v);
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    bool matched = false;
    for (auto op : kTwoCharOps) {
      if (src.substr(i, 2) == op) {
        tok.kind = Tok::Punct;
        tok.text = std::string(op);
        advance(2);
        matched = true;
        break;
      }
    }
    if (!matched && kOneCharOps.find(c) != std::string_view::npos) {
      tok.kind = Tok::Punct;
      tok.text = std::string(1, c);
      advance(1);
      matched = true;
    }
    if (!matched) {
      throw SyntaxError(tok.pos, std::string(1, c), {"identifier", "integer literal", "operator"});
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace cbc
