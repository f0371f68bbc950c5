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

// Positioned YAML tree for the portable subset: no anchors, aliases,
// explicit tags, complex keys or duplicate keys.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace edmm::yaml {

using Json = nlohmann::ordered_json;

struct Mark {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
};

struct Node {
  enum class Kind { null, scalar, sequence, map };

  Kind kind = Kind::null;
  std::string value;    // scalar text
  bool quoted = false;  // single/double quoted or block scalar
  Mark mark;
  std::vector<Node> items;
  std::vector<std::pair<Node, Node>> entries;

  bool is_scalar() const noexcept { return kind == Kind::scalar; }
  bool is_map() const noexcept { return kind == Kind::map; }
  bool is_sequence() const noexcept { return kind == Kind::sequence; }
  bool is_null() const noexcept { return kind == Kind::null; }
};

std::string_view kind_name(Node::Kind kind) noexcept;

class LoadError : public std::runtime_error {
 public:
  enum class Reason { syntax, unsupported_feature, duplicate_key };

  LoadError(Reason reason, Mark mark, const std::string& message)
      : std::runtime_error(message), reason_(reason), mark_(mark) {}

  Reason reason() const noexcept { return reason_; }
  Mark mark() const noexcept { return mark_; }

 private:
  Reason reason_;
  Mark mark_;
};

/// Parses every document in `text`. Throws LoadError.
std::vector<Node> load_all(std::string_view text);

/// Core-schema resolution of an unquoted scalar: null, bool, int, float or string.
Json resolve_plain(std::string_view text);

/// True when `text` written unquoted would read back as the same string.
bool plain_round_trips(std::string_view text);

Json to_json(const Node& node);
std::vector<Json> load_all_json(std::string_view text);

/// Block-style YAML for a JSON document; object key order is preserved.
std::string emit(const Json& document);

}  // namespace edmm::yaml
