#include "topicena/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>

#include "topicena/error.hpp"

namespace topicena {

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

namespace {

/// Exact two-sided p-value: the fraction of all C(N, n_a) relabelings whose
/// |2U - n_a n_b| is at least the observed one. Works on doubled midranks so
/// every quantity is an integer.
double exact_p_value(const std::vector<long long>& doubled_ranks, std::size_t n_a,
                     long long observed_dev) {
  const std::size_t n = doubled_ranks.size();
  const long long max_sum = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0LL);
  // ways[m][s]: subsets of size m whose doubled rank sum is s.
  std::vector<std::vector<std::uint64_t>> ways(
      n_a + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(max_sum) + 1, 0));
  ways[0][0] = 1;
  for (std::size_t item = 0; item < n; ++item) {
    const auto r = static_cast<std::size_t>(doubled_ranks[item]);
    for (std::size_t m = std::min(n_a, item + 1); m >= 1; --m) {
      auto& dst = ways[m];
      const auto& src = ways[m - 1];
      for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) {
        dst[s] += src[s - r];
        if (s == 0) break;
      }
    }
  }
  const auto n_b = static_cast<long long>(n - n_a);
  const auto na = static_cast<long long>(n_a);
  std::uint64_t extreme = 0;
  std::uint64_t total = 0;
  for (long long s = 0; s <= max_sum; ++s) {
    const auto count = ways[n_a][static_cast<std::size_t>(s)];
    if (count == 0) continue;
    total += count;
    const long long two_u = s - na * (na + 1);
    if (std::llabs(two_u - na * n_b) >= observed_dev) extreme += count;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

GroupComparison mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptySample, "Mann-Whitney U needs two non-empty samples");
  }
  GroupComparison out;
  out.n_a = a.size();
  out.n_b = b.size();
  const std::size_t n = out.n_a + out.n_b;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  std::vector<long long> doubled(n);
  for (std::size_t i = 0; i < n; ++i) doubled[i] = std::llround(2.0 * ranks[i]);

  const auto na = static_cast<long long>(out.n_a);
  const auto nb = static_cast<long long>(out.n_b);
  const long long doubled_rank_sum_a =
      std::accumulate(doubled.begin(), doubled.begin() + static_cast<std::ptrdiff_t>(out.n_a), 0LL);
  const long long two_u = doubled_rank_sum_a - na * (na + 1);
  out.u_statistic = static_cast<double>(two_u) / 2.0;
  out.rank_biserial_effect = 2.0 * out.u_statistic / static_cast<double>(na * nb) - 1.0;

  if (n <= kExactMaxTotal) {
    out.exact = true;
    out.p_value_two_sided = exact_p_value(doubled, out.n_a, std::llabs(two_u - na * nb));
    return out;
  }

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  const auto nd = static_cast<double>(n);
  const double mu = static_cast<double>(na * nb) / 2.0;
  const double var = static_cast<double>(na * nb) / 12.0 * ((nd + 1.0) - tie_sum / (nd * (nd - 1.0)));
  if (!(var > 0.0)) {
    out.p_value_two_sided = 1.0;
    return out;
  }
  const double dev = std::max(std::abs(out.u_statistic - mu) - kContinuityCorrection, 0.0);
  out.z = dev / std::sqrt(var);
  out.p_value_two_sided = std::min(1.0, std::erfc(out.z / std::sqrt(2.0)));
  return out;
}

}  // namespace topicena
