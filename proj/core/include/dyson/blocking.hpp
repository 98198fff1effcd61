#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dyson {

struct BlockingLevel {
  std::size_t block_size;
  std::size_t blocks;
  double std_error;
};

struct BlockingResult {
  double mean = 0.0;
  double std_error = 0.0;
  /// Integrated autocorrelation time in units of the sample spacing,
  /// 0.5 * (blocked error / naive error)^2.
  double autocorr_time = 0.5;
  std::vector<BlockingLevel> levels;
};

/// Error of the mean by repeated pairwise blocking (block size doubles per
/// level, down to `min_blocks` blocks). The reported error is taken at the
/// first level that no later level exceeds by more than twice their
/// combined statistical spread.
BlockingResult blocking_analysis(std::span<const double> samples, std::size_t min_blocks = 32);

}  // namespace dyson
