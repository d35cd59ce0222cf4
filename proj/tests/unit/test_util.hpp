#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cbc::testing {

inline std::string fixture_path(const std::string& name) { return std::string(CBC_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cbc::testing
