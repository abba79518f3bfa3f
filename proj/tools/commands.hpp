// Copyright 2026 The mailrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command-line front end: prepare, build-graph, train, eval, diagnose and
// sweep. run_cli returns the process exit code:
//   0 success, 2 user or config error, 3 artifact or format error,
//   4 numerical failure, 1 internal error.

#include <filesystem>

#include "mailrec/dataset.hpp"

namespace mailrec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUser = 2;
inline constexpr int kExitArtifact = 3;
inline constexpr int kExitNumerics = 4;

int run_cli(int argc, const char* const* argv);

// Prepared dataset directory written by `prepare`.
data::Dataset load_prepared(const std::filesystem::path& dir);

}  // namespace mailrec::cli
