#pragma once

// Shared result schema. Every experiment writes the same columns; fields
// that do not apply to a row are left empty.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyson::experiments {

inline constexpr std::array<std::string_view, 18> kResultColumns = {
    "experiment", "J",        "alpha",    "gamma",     "h",     "beta",      "volume",          "boundary", "L",
    "N",          "annulus_sign", "beyond", "sampler", "quantity", "value", "std_error", "certified_error", "seed"};

/// Columns that are not part of a row's key.
inline constexpr std::array<std::string_view, 4> kValueColumns = {"value", "std_error", "certified_error", "seed"};

struct ResultRow {
  std::string experiment;
  std::optional<double> J;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<double> h;
  std::optional<double> beta;
  std::string volume;
  std::string boundary;
  std::optional<std::int64_t> L;
  std::optional<std::int64_t> N;
  std::optional<int> annulus_sign;
  std::string beyond;
  std::string sampler;
  std::string quantity;
  double value = 0.0;
  double std_error = 0.0;
  double certified_error = 0.0;
  std::uint64_t seed = 0;

  std::vector<std::string> fields() const;
};

std::vector<std::string> result_header();

}  // namespace dyson::experiments
