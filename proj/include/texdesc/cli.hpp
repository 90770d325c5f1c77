// Copyright 2026 The texdesc Authors
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

#ifndef TEXDESC__CLI_HPP_
#define TEXDESC__CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace texdesc::cli
{

/// Exit codes: 0 success, 1 domain/runtime error (or an errored report
/// cell), 2 usage error.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

/// Long flag names accepted by a subcommand ("" for the top level).
std::vector<std::string> flag_names(std::string_view command);

/// Help text of a subcommand ("" for the top level).
std::string help_text(std::string_view command);

/// Inclusive integer range "a..b" or a single real value.
std::vector<double> parse_sigma_list(const std::string & text);

/// Comma-separated integers and/or inclusive "a..b" ranges.
std::vector<std::uint64_t> parse_seed_list(const std::string & text);

}  // namespace texdesc::cli

#endif  // TEXDESC__CLI_HPP_
