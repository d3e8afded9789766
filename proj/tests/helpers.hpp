#ifndef SEMAUTO_TESTS_HELPERS_HPP
#define SEMAUTO_TESTS_HELPERS_HPP

#include "doctest.h"
#include "oracles.hpp"

namespace testutil {

inline std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil

#endif  // SEMAUTO_TESTS_HELPERS_HPP
