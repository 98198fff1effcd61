#include "dyson/experiments/results.hpp"

#include "dyson/experiments/csv.hpp"

namespace dyson::experiments {

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

template <class Int>
std::string opt_int(const std::optional<Int>& x) {
  return x ? std::to_string(*x) : std::string();
}

}  // namespace

std::vector<std::string> ResultRow::fields() const {
  return {experiment,      opt(J),          opt(alpha),     opt(gamma),    opt(h),
          opt(beta),       volume,          boundary,       opt_int(L),    opt_int(N),
          opt_int(annulus_sign), beyond,    sampler,        quantity,      format_real(value),
          format_real(std_error), format_real(certified_error), std::to_string(seed)};
}

std::vector<std::string> result_header() { return {kResultColumns.begin(), kResultColumns.end()}; }

}  // namespace dyson::experiments
