// SPDX-License-Identifier: Apache-2.0
#ifndef OASGEN_YAML_IO_HPP
#define OASGEN_YAML_IO_HPP

#include <charconv>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "oasgen/errors.hpp"
#include "oasgen/text.hpp"

namespace oasgen::yamlio {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline bool full_parse_ll(const std::string& s, long long& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc{} && r.ptr == e;
}

inline bool full_parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace detail

inline ordered_json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (node.Tag() == "!") return s;  // explicitly quoted scalar
      if (s == "null" || s == "~" || s == "Null" || s == "NULL" || s.empty())
        return nullptr;
      if (s == "true" || s == "True" || s == "TRUE") return true;
      if (s == "false" || s == "False" || s == "FALSE") return false;
      long long ll = 0;
      if (detail::full_parse_ll(s, ll)) return ll;
      double d = 0;
      if (detail::full_parse_double(s, d)) return d;
      return s;
    }
    case YAML::NodeType::Sequence: {
      ordered_json arr = ordered_json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      ordered_json obj = ordered_json::object();
      for (const auto& kv : node)
        obj[kv.first.Scalar()] = yaml_to_json(kv.second);
      return obj;
    }
    default:
      return nullptr;
  }
}

inline ordered_json parse_yaml(const std::string& body) {
  try {
    return yaml_to_json(YAML::Load(body));
  } catch (const YAML::Exception& e) {
    throw Error(errc::parse_failure, std::string("yaml: ") + e.what());
  }
}

namespace detail {

inline void emit_json(YAML::Emitter& out, const ordered_json& v) {
  switch (v.type()) {
    case ordered_json::value_t::null:
      out << YAML::Null;
      break;
    case ordered_json::value_t::boolean:
      out << v.get<bool>();
      break;
    case ordered_json::value_t::number_integer:
      out << v.get<long long>();
      break;
    case ordered_json::value_t::number_unsigned:
      out << v.get<unsigned long long>();
      break;
    case ordered_json::value_t::number_float:
      out << v.get<double>();
      break;
    case ordered_json::value_t::string:
      // quote everything so "3.0.3" or "yes" survive a round trip as strings
      out << YAML::DoubleQuoted << v.get<std::string>();
      break;
    case ordered_json::value_t::array:
      out << YAML::BeginSeq;
      for (const auto& item : v) emit_json(out, item);
      out << YAML::EndSeq;
      break;
    case ordered_json::value_t::object:
      out << YAML::BeginMap;
      for (auto it = v.begin(); it != v.end(); ++it) {
        out << YAML::Key << YAML::DoubleQuoted << it.key() << YAML::Value;
        emit_json(out, it.value());
      }
      out << YAML::EndMap;
      break;
    default:
      out << YAML::Null;
      break;
  }
}

}  // namespace detail

inline std::string to_yaml(const ordered_json& v) {
  YAML::Emitter out;
  detail::emit_json(out, v);
  std::string s = out.c_str();
  s += "\n";
  return s;
}

inline bool has_yaml_extension(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return false;
  std::string ext = text::to_lower(path.substr(dot + 1));
  return ext == "yaml" || ext == "yml";
}

// Parses a document body as YAML or JSON depending on the file name.
inline ordered_json parse_structured(const std::string& path,
                                     const std::string& body) {
  if (has_yaml_extension(path)) return parse_yaml(body);
  try {
    return ordered_json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::parse_failure, std::string("json: ") + e.what());
  }
}

}  // namespace oasgen::yamlio

#endif  // OASGEN_YAML_IO_HPP
