#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "momentflow/document.hpp"

namespace fixture {

inline std::string path(const std::string& rel) { return std::string(MOMENTFLOW_SOURCE_DIR) + "/" + rel; }

inline momentflow::NetworkDocument network(const std::string& name) {
  return momentflow::load_document(path("networks/" + name + ".json"));
}

inline std::string read(const std::string& rel) {
  std::ifstream in(path(rel), std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixture
