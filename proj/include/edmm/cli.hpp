/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edmm::cli {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int invalid_model = 1;
inline constexpr int incompatible = 2;
inline constexpr int usage = 3;
inline constexpr int io = 4;
}  // namespace exit_code

/// Environment variable naming default catalog files or directories, colon separated.
inline constexpr const char* catalog_path_variable = "EDMM_CATALOG_PATH";

/**
 * Runs one command. `args` excludes the program name. Results go to `out`,
 * human-readable errors to `err`. Returns the process exit code.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edmm::cli
