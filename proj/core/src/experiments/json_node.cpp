#include "json_node.hpp"

#include <cmath>
#include <limits>

#include "dyson/errors.hpp"

namespace dyson::experiments {

double as_real(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("expected a number", path);
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError("expected a finite number", path);
  return x;
}

std::int64_t as_integer(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) {
    const auto u = j.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw ConfigError("integer out of range", path);
    }
    return static_cast<std::int64_t>(u);
  }
  if (j.is_number_integer()) return j.get<std::int64_t>();
  throw ConfigError("expected an integer", path);
}

Node::Node(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {
  if (!value_->is_object()) throw ConfigError("expected an object", path_.empty() ? "config" : path_);
}

std::string Node::key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool Node::has(const std::string& key) const { return value_->contains(key); }

const Json* Node::peek(const std::string& key) const {
  const auto it = value_->find(key);
  return it == value_->end() ? nullptr : &*it;
}

const Json& Node::get(const std::string& key) {
  const auto it = value_->find(key);
  if (it == value_->end()) throw ConfigError("required key is missing", key_path(key));
  used_.insert(key);
  return *it;
}

Node Node::child(const std::string& key) { return Node(get(key), key_path(key)); }

std::optional<Node> Node::optional_child(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return child(key);
}

double Node::real(const std::string& key) { return as_real(get(key), key_path(key)); }

double Node::real(const std::string& key, double fallback) { return has(key) ? real(key) : fallback; }

std::int64_t Node::integer(const std::string& key) { return as_integer(get(key), key_path(key)); }

std::int64_t Node::integer(const std::string& key, std::int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Node::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const Json& j = get(key);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError("expected a non-negative 64-bit integer", key_path(key));
}

std::string Node::string(const std::string& key) {
  const Json& j = get(key);
  if (!j.is_string()) throw ConfigError("expected a string", key_path(key));
  return j.get<std::string>();
}

std::string Node::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Node::reals(const std::string& key) {
  const Json& j = get(key);
  const std::string p = key_path(key);
  if (!j.is_array()) return {as_real(j, p)};
  if (j.empty()) throw ConfigError("expected at least one value", p);
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_real(j[k], p + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::int64_t> Node::integers(const std::string& key) {
  const Json& j = get(key);
  const std::string p = key_path(key);
  if (!j.is_array()) return {as_integer(j, p)};
  if (j.empty()) throw ConfigError("expected at least one value", p);
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_integer(j[k], p + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::string> Node::strings(const std::string& key) {
  const Json& j = get(key);
  const std::string p = key_path(key);
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw ConfigError("expected a string or an array of strings", p);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_string()) throw ConfigError("expected a string", p + "[" + std::to_string(k) + "]");
    out.push_back(j[k].get<std::string>());
  }
  return out;
}

void Node::finish() const {
  for (const auto& [key, value] : value_->items()) {
    if (!used_.count(key)) throw ConfigError("unknown key", key_path(key));
  }
}

}  // namespace dyson::experiments
