//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace potacc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs the potacc command line. `args` includes the program name.
/// Returns 0 on success, 1 on validation failure, 2 on I/O failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace potacc
