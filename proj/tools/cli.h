// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polyscene::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kExhausted = 2,
  kIo = 3,
};

/// Runs the polyscene command line. Results go to `out`, diagnostics to
/// `err`. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

/// --data-dir, then $POLYSCENE_DATA, then ./polyscene-data.
std::filesystem::path resolve_data_dir(const std::optional<std::string>& flag);

}  // namespace polyscene::cli
