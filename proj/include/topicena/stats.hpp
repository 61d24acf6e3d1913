#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace topicena {

/// Samples with n_a + n_b at or below this use the exact permutation
/// distribution; larger ones use the normal approximation.
inline constexpr std::size_t kExactMaxTotal = 20;
inline constexpr double kContinuityCorrection = 0.5;

struct GroupComparison {
  std::size_t dimension = 0;  // 1-based; 0 when not tied to a projection axis
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double u_statistic = 0.0;  // a-over-b wins, ties count one half
  double p_value_two_sided = 1.0;
  double rank_biserial_effect = 0.0;  // 2U / (n_a n_b) - 1
  bool exact = false;
  double z = 0.0;  // normal path only
};

/// 1-based ranks with ties sharing their average rank.
std::vector<double> midranks(std::span<const double> values);

/// Two-sided Mann-Whitney U test with midrank tie handling. Throws
/// EmptySample if either sample is empty.
GroupComparison mann_whitney_u(std::span<const double> a, std::span<const double> b);

}  // namespace topicena
