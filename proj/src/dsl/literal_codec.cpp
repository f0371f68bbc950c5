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

#include "dsl/literal_codec.hpp"

#include <fmt/format.h>

#include "edmm/dsl.hpp"

namespace edmm::dsl {

namespace {

/// Number of leading '$' when text has the shape `$...${...}`, else 0.
std::size_t dollar_run(std::string_view text) {
  std::size_t n = 0;
  while (n < text.size() && text[n] == '$') ++n;
  if (n == 0 || n >= text.size() || text[n] != '{' || text.back() != '}') return 0;
  return n;
}

}  // namespace

DecodedString decode_string(std::string_view text) {
  DecodedString out;
  std::size_t dollars = dollar_run(text);
  if (dollars == 0) {
    out.literal = std::string(text);
    return out;
  }
  if (dollars > 1) {
    out.literal = std::string(text.substr(1));
    return out;
  }
  std::string_view inner = text.substr(2, text.size() - 3);
  auto invalid = [&](std::string_view why) {
    out.error = fmt::format("invalid reference '{}': {}", text, why);
    return out;
  };
  if (inner.empty()) return invalid("empty reference");
  auto sep = inner.find("::");
  if (sep == std::string_view::npos) {
    if (!is_identifier(inner)) return invalid("property name is not an identifier");
    out.reference = Reference{"", std::string(inner)};
    return out;
  }
  std::string_view component = inner.substr(0, sep);
  std::string_view property = inner.substr(sep + 2);
  if (!is_component_name(component)) return invalid("component name is not valid");
  if (!is_identifier(property)) return invalid("property name is not an identifier");
  out.reference = Reference{std::string(component), std::string(property)};
  return out;
}

std::string encode_literal(std::string_view literal) {
  if (dollar_run(literal) > 0) return fmt::format("${}", literal);
  return std::string(literal);
}

std::string encode_reference(const Reference& reference) {
  return PropertyValue(reference).to_text();
}

}  // namespace edmm::dsl
