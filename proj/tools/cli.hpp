// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Command-line front end. Exit codes: 0 success, 1 input error (bad netlist,
// image, dataset, geometry or arguments), 2 runtime contract violation.

#include <iosfwd>
#include <string>
#include <vector>

namespace nvtwin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitContract = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nvtwin::cli
