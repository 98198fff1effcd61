#include "dyson/blocking.hpp"

#include <cmath>
#include <numeric>

namespace dyson {

namespace {

double naive_error(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

BlockingResult blocking_analysis(std::span<const double> samples, std::size_t min_blocks) {
  BlockingResult out;
  if (samples.empty()) return out;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());

  std::vector<double> level(samples.begin(), samples.end());
  std::size_t block = 1;
  while (true) {
    out.levels.push_back({block, level.size(), naive_error(level)});
    if (level.size() / 2 < std::max<std::size_t>(min_blocks, 2)) break;
    std::vector<double> next(level.size() / 2);
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = 0.5 * (level[2 * k] + level[2 * k + 1]);
    level = std::move(next);
    block *= 2;
  }

  // relative uncertainty of a blocked error estimate from b blocks
  auto spread = [](const BlockingLevel& l) {
    return l.std_error / std::sqrt(2.0 * static_cast<double>(std::max<std::size_t>(l.blocks, 2) - 1));
  };
  const auto& lv = out.levels;
  std::size_t chosen = lv.size() - 1;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    bool plateau = true;
    for (std::size_t j = k + 1; j < lv.size() && plateau; ++j) {
      plateau = lv[j].std_error <= lv[k].std_error + 2.0 * std::hypot(spread(lv[k]), spread(lv[j]));
    }
    if (plateau) {
      chosen = k;
      break;
    }
  }
  out.std_error = lv[chosen].std_error;
  const double base = lv.front().std_error;
  if (base > 0.0) out.autocorr_time = 0.5 * (out.std_error / base) * (out.std_error / base);
  return out;
}

}  // namespace dyson
