#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cbc/lang/ast.hpp"

namespace cbc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed MiniOO text. Carries the offending position and what the parser
/// would have accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, std::string found, std::vector<std::string> expected);

  SourcePos pos() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourcePos pos_;
  std::vector<std::string> expected_;
};

/// Well-formed text that does not resolve: unknown names, cyclic
/// inheritance, type errors, bad overrides, missing returns.
class ResolveError : public Error {
 public:
  ResolveError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Structural CFG defects (unreachable code, no path to exit).
class CfgError : public Error {
 public:
  using Error::Error;
};

class UnknownClassError : public Error {
 public:
  explicit UnknownClassError(const std::string& name)
      : Error("unknown class '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class NoSuchMethodError : public Error {
 public:
  NoSuchMethodError(const std::string& cls, const std::string& method)
      : Error("no method '" + method + "' visible on class '" + cls + "'") {}
};

}  // namespace cbc
