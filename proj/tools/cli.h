// Copyright 2026 The provtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// provtree command line front end.
//
//   provtree check <corpus>                    consistency reports
//   provtree tree <corpus> --strategy S        version tree (dot/document/csv)
//   provtree diff <corpus> <id_a> <id_b>       semantic diff and transforms
//   provtree generate --spec <file>            synthetic corpus with ground truth
//   provtree evaluate --instances K ...        builder comparison report
//   provtree embed <corpus> --dump             normalized attribute clusters
//
// Exit codes: 0 ok, 1 inconsistency over threshold, 2 input error,
// 3 size guard.

#ifndef PROVTREE_TOOLS_CLI_H_
#define PROVTREE_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace provtree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInconsistent = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitGuard = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace provtree::cli

#endif  // PROVTREE_TOOLS_CLI_H_
