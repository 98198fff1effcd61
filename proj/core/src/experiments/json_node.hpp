#pragma once

// Checked access to a JSON object: type errors and unknown keys become
// ConfigErrors carrying the dotted key path.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace dyson::experiments {

using Json = nlohmann::ordered_json;

class Node {
 public:
  Node(const Json& value, std::string path);

  const std::string& path() const noexcept { return path_; }
  const Json& json() const noexcept { return *value_; }
  std::string key_path(const std::string& key) const;

  bool has(const std::string& key) const;
  /// The raw value, or nullptr if absent; does not count as a read.
  const Json* peek(const std::string& key) const;
  void mark_used(const std::string& key) { used_.insert(key); }
  Node child(const std::string& key);
  std::optional<Node> optional_child(const std::string& key);

  double real(const std::string& key);
  double real(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  /// Scalar or array of reals.
  std::vector<double> reals(const std::string& key);
  std::vector<std::int64_t> integers(const std::string& key);
  std::vector<std::string> strings(const std::string& key);

  /// ConfigError naming the first key that was never read.
  void finish() const;

 private:
  const Json& get(const std::string& key);

  const Json* value_;
  std::string path_;
  std::set<std::string> used_;
};

double as_real(const Json& j, const std::string& path);
std::int64_t as_integer(const Json& j, const std::string& path);

}  // namespace dyson::experiments
