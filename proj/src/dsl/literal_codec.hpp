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

// String scalars carry either a literal or an intrinsic reference:
//
//   ${name}              model property
//   ${Component::name}   effective property of another component
//   $${...}              literal text "${...}" (one '$' dropped per escape)

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "edmm/model.hpp"

namespace edmm::dsl {

struct DecodedString {
  std::string literal;
  std::optional<Reference> reference;
  std::optional<std::string> error;
};

DecodedString decode_string(std::string_view text);

/// Inverse of decode_string for literals.
std::string encode_literal(std::string_view literal);

std::string encode_reference(const Reference& reference);

}  // namespace edmm::dsl
