// Copyright 2026 The Clozekit Authors.
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

#ifndef CLOZEKIT_TOOLS_CLI_H_
#define CLOZEKIT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace clozekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Runs one `clozekit` invocation; `args` excludes the program name.
// Returns 0 on success, 1 for bad input (arguments, data, config) and 2 for
// runtime failures such as I/O errors or a diverging training run.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clozekit::cli

#endif  // CLOZEKIT_TOOLS_CLI_H_
