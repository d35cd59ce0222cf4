#include "cbc/errors.hpp"

namespace cbc {

namespace {

std::string where(SourcePos pos) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

std::string syntax_message(SourcePos pos, const std::string& found, const std::vector<std::string>& expected) {
  std::string msg = where(pos) + ": syntax error: unexpected " + found;
  if (!expected.empty()) {
    msg += ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
  }
  return msg;
}

}  // namespace

SyntaxError::SyntaxError(SourcePos pos, std::string found, std::vector<std::string> expected)
    : Error(syntax_message(pos, found, expected)), pos_(pos), expected_(std::move(expected)) {}

ResolveError::ResolveError(SourcePos pos, const std::string& message)
    : Error(where(pos) + ": " + message), pos_(pos) {}

}  // namespace cbc
