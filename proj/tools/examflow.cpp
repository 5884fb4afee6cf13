// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/cli.hpp"

int main(int argc, char** argv) { return examflow::cli::main_entry(argc, argv); }
