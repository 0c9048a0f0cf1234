#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace testutil {

inline std::string read_fixture(const std::string& name) {
  std::ifstream f(std::string(SUBMACHINE_FIXTURE_DIR) + "/" + name);
  REQUIRE_MESSAGE(f.good(), "missing fixture: ", name);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace testutil
