#pragma once

#include <string>
#include <string_view>

#include "cbc/lang/ast.hpp"

namespace cbc {

/// Parses MiniOO text into an unresolved Program (syntax only).
/// Throws SyntaxError with position and expected tokens.
Program parse_syntax(std::string_view source);

/// Parses and resolves: the result has override links checked, locals
/// slotted and every expression typed. Throws SyntaxError or ResolveError.
Program parse_program(std::string_view source);

/// Canonical MiniOO rendering of a Program; reparsing it yields a
/// structurally identical Program.
std::string print_program(const Program& program);

}  // namespace cbc
