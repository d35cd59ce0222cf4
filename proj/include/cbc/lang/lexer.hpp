#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cbc/lang/ast.hpp"

namespace cbc {

enum class Tok {
  Ident,
  IntLit,
  Keyword,
  Punct,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  SourcePos pos;
};

/// Splits MiniOO source into tokens. `//` comments run to end of line.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace cbc
