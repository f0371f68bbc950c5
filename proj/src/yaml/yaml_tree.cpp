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

#include "yaml/yaml_tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/eventhandler.h>
#include <yaml-cpp/yaml.h>

namespace edmm::yaml {

namespace {

Mark to_mark(const YAML::Mark& m) {
  if (m.is_null() || m.line < 0 || m.column < 0) return {};
  return {m.line + 1, m.column + 1};
}

class TreeBuilder : public YAML::EventHandler {
 public:
  std::vector<Node> documents;

  void OnDocumentStart(const YAML::Mark&) override { stack_.clear(); }

  void OnDocumentEnd() override {
    documents.push_back(root_ ? std::move(*root_) : Node{});
    root_.reset();
  }

  void OnNull(const YAML::Mark& mark, YAML::anchor_t anchor) override {
    reject_anchor(mark, anchor);
    Node n;
    n.kind = Node::Kind::null;
    n.mark = to_mark(mark);
    add(std::move(n));
  }

  void OnAlias(const YAML::Mark& mark, YAML::anchor_t) override {
    throw LoadError(LoadError::Reason::unsupported_feature, to_mark(mark),
                    "aliases are not supported");
  }

  void OnScalar(const YAML::Mark& mark, const std::string& tag, YAML::anchor_t anchor,
                const std::string& value) override {
    reject_anchor(mark, anchor);
    if (tag != "?" && tag != "!") {
      throw LoadError(LoadError::Reason::unsupported_feature, to_mark(mark),
                      fmt::format("explicit tag '{}' is not supported", tag));
    }
    Node n;
    n.kind = Node::Kind::scalar;
    n.value = value;
    n.quoted = tag == "!";
    n.mark = to_mark(mark);
    add(std::move(n));
  }

  void OnSequenceStart(const YAML::Mark& mark, const std::string& tag, YAML::anchor_t anchor,
                       YAML::EmitterStyle::value) override {
    reject_collection_tag(mark, tag);
    reject_anchor(mark, anchor);
    Node n;
    n.kind = Node::Kind::sequence;
    n.mark = to_mark(mark);
    stack_.push_back(Frame{std::move(n), std::nullopt, {}});
  }

  void OnSequenceEnd() override { close(); }

  void OnMapStart(const YAML::Mark& mark, const std::string& tag, YAML::anchor_t anchor,
                  YAML::EmitterStyle::value) override {
    reject_collection_tag(mark, tag);
    reject_anchor(mark, anchor);
    Node n;
    n.kind = Node::Kind::map;
    n.mark = to_mark(mark);
    stack_.push_back(Frame{std::move(n), std::nullopt, {}});
  }

  void OnMapEnd() override { close(); }

  void OnAnchor(const YAML::Mark& mark, const std::string& name) override {
    throw LoadError(LoadError::Reason::unsupported_feature, to_mark(mark),
                    fmt::format("anchor '&{}' is not supported", name));
  }

 private:
  struct Frame {
    Node node;
    std::optional<Node> pending_key;
    std::set<std::string> keys;
  };

  static void reject_anchor(const YAML::Mark& mark, YAML::anchor_t anchor) {
    if (anchor != YAML::NullAnchor) {
      throw LoadError(LoadError::Reason::unsupported_feature, to_mark(mark),
                      "anchors are not supported");
    }
  }

  static void reject_collection_tag(const YAML::Mark& mark, const std::string& tag) {
    if (tag != "?" && tag != "!" && !tag.empty()) {
      throw LoadError(LoadError::Reason::unsupported_feature, to_mark(mark),
                      fmt::format("explicit tag '{}' is not supported", tag));
    }
  }

  void close() {
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    add(std::move(frame.node));
  }

  void add(Node n) {
    if (stack_.empty()) {
      root_ = std::move(n);
      return;
    }
    Frame& top = stack_.back();
    if (top.node.kind == Node::Kind::sequence) {
      top.node.items.push_back(std::move(n));
      return;
    }
    if (!top.pending_key) {
      if (n.kind != Node::Kind::scalar) {
        throw LoadError(LoadError::Reason::unsupported_feature, n.mark,
                        "mapping keys must be scalars");
      }
      if (!top.keys.insert(n.value).second) {
        throw LoadError(LoadError::Reason::duplicate_key, n.mark,
                        fmt::format("duplicate key '{}'", n.value));
      }
      top.pending_key = std::move(n);
      return;
    }
    top.node.entries.emplace_back(std::move(*top.pending_key), std::move(n));
    top.pending_key.reset();
  }

  std::vector<Frame> stack_;
  std::optional<Node> root_;
};

bool matches(const std::regex& re, std::string_view text) {
  return std::regex_match(text.begin(), text.end(), re);
}

const std::regex& int_pattern() {
  static const std::regex re("[-+]?[0-9]+");
  return re;
}

const std::regex& float_pattern() {
  static const std::regex re(
      R"([-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?|[-+]?\.(inf|Inf|INF)|\.(nan|NaN|NAN))");
  return re;
}

void emit_node(YAML::Emitter& out, const Json& value) {
  switch (value.type()) {
    case Json::value_t::object:
      if (value.empty()) {
        out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
        return;
      }
      out << YAML::BeginMap;
      for (const auto& [key, item] : value.items()) {
        out << YAML::Key;
        if (plain_round_trips(key)) {
          out << key;
        } else {
          out << YAML::DoubleQuoted << key;
        }
        out << YAML::Value;
        emit_node(out, item);
      }
      out << YAML::EndMap;
      return;
    case Json::value_t::array:
      if (value.empty()) {
        out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
        return;
      }
      out << YAML::BeginSeq;
      for (const auto& item : value) emit_node(out, item);
      out << YAML::EndSeq;
      return;
    case Json::value_t::string: {
      const auto& s = value.get_ref<const std::string&>();
      if (plain_round_trips(s) && s.find('\n') == std::string::npos) {
        out << s;
      } else {
        out << YAML::DoubleQuoted << s;
      }
      return;
    }
    case Json::value_t::boolean:
      out << (value.get<bool>() ? "true" : "false");
      return;
    case Json::value_t::number_integer:
      out << std::to_string(value.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out << std::to_string(value.get<std::uint64_t>());
      return;
    case Json::value_t::number_float:
      out << value.dump();
      return;
    default:
      out << YAML::Null;
      return;
  }
}

}  // namespace

std::string_view kind_name(Node::Kind kind) noexcept {
  switch (kind) {
    case Node::Kind::null: return "null";
    case Node::Kind::scalar: return "scalar";
    case Node::Kind::sequence: return "sequence";
    case Node::Kind::map: return "mapping";
  }
  return "node";
}

std::vector<Node> load_all(std::string_view text) {
  std::istringstream stream{std::string(text)};
  TreeBuilder builder;
  try {
    YAML::Parser parser(stream);
    while (parser.HandleNextDocument(builder)) {
    }
  } catch (const LoadError&) {
    throw;
  } catch (const YAML::Exception& e) {
    throw LoadError(LoadError::Reason::syntax, to_mark(e.mark), e.msg);
  } catch (const std::exception& e) {
    throw LoadError(LoadError::Reason::syntax, Mark{}, e.what());
  }
  return std::move(builder.documents);
}

Json resolve_plain(std::string_view text) {
  if (text.empty() || text == "~" || text == "null" || text == "Null" || text == "NULL") {
    return nullptr;
  }
  if (text == "true" || text == "True" || text == "TRUE") return true;
  if (text == "false" || text == "False" || text == "FALSE") return false;
  if (matches(int_pattern(), text)) {
    std::int64_t v = 0;
    std::string_view digits = text.front() == '+' ? text.substr(1) : text;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec == std::errc{} && ptr == digits.data() + digits.size()) return v;
    return std::string(text);
  }
  if (matches(float_pattern(), text)) {
    try {
      return std::stod(std::string(text));
    } catch (const std::exception&) {
      return std::string(text);
    }
  }
  return std::string(text);
}

bool plain_round_trips(std::string_view text) {
  if (text.empty()) return false;
  if (!resolve_plain(text).is_string()) return false;
  // YAML 1.1 booleans and numeric-looking forms other tools may coerce.
  static const std::set<std::string, std::less<>> legacy{"y",   "Y",   "yes", "Yes", "YES",
                                                         "n",   "N",   "no",  "No",  "NO",
                                                         "on",  "On",  "ON",  "off", "Off",
                                                         "OFF", "=",   "<<"};
  if (legacy.contains(text)) return false;
  const char first = text.front();
  if ((first >= '0' && first <= '9') || first == '+' || first == '-' || first == '.') {
    return false;
  }
  if (text.find('$') != std::string_view::npos || text.find('#') != std::string_view::npos) {
    return false;
  }
  return std::none_of(text.begin(), text.end(),
                      [](char c) { return c == '\n' || c == '\t' || c == '\r'; });
}

Json to_json(const Node& node) {
  switch (node.kind) {
    case Node::Kind::null:
      return nullptr;
    case Node::Kind::scalar:
      return node.quoted ? Json(node.value) : resolve_plain(node.value);
    case Node::Kind::sequence: {
      Json out = Json::array();
      for (const auto& item : node.items) out.push_back(to_json(item));
      return out;
    }
    case Node::Kind::map: {
      Json out = Json::object();
      for (const auto& [key, value] : node.entries) out[key.value] = to_json(value);
      return out;
    }
  }
  return nullptr;
}

std::vector<Json> load_all_json(std::string_view text) {
  std::vector<Json> out;
  for (const auto& doc : load_all(text)) out.push_back(to_json(doc));
  return out;
}

std::string emit(const Json& document) {
  YAML::Emitter out;
  out.SetIndent(2);
  emit_node(out, document);
  std::string text = out.c_str();
  text.push_back('\n');
  return text;
}

}  // namespace edmm::yaml
