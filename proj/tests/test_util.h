#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(SDPGAME_FIXTURES) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path);
  std::stringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

inline const nlohmann::json& oracle() {
  static const nlohmann::json j = nlohmann::json::parse(read_file(fixture_path("oracle_values.json")));
  return j;
}

}  // namespace testutil
