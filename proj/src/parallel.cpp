// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/parallel.hpp"

#include <cstdlib>
#include <string>

namespace examflow {

unsigned default_jobs() {
  if (const char* env = std::getenv("EXAMFLOW_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace examflow
