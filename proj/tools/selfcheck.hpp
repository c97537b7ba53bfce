// Copyright 2026 The mcqa-space Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCQA_TOOLS_SELFCHECK_HPP_
#define MCQA_TOOLS_SELFCHECK_HPP_

#include <ostream>

namespace mcqa::cli {

// Runs the statistics and tokenizer against independent oracles on
// generated inputs. Prints one PASS/FAIL line per check; true if all pass.
bool run_selfcheck(std::ostream& out);

}  // namespace mcqa::cli

#endif  // MCQA_TOOLS_SELFCHECK_HPP_
