#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fatigue/error.hpp"
#include "fatigue/features.hpp"

namespace fatigue {

double mean(std::span<const double> x) {
  if (x.empty()) throw InsufficientData("mean of an empty series");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(x.size());
}

// Each unordered template pair is visited once; the (m+1)-length distance
// extends the m-length one by a single coordinate.
double approximate_entropy(std::span<const double> x, ApEnParams p) {
  if (p.m < 1) throw ArgumentError("ApEn embedding length must be >= 1");
  if (!(p.r > 0.0)) throw ArgumentError("ApEn tolerance must be > 0");
  const std::size_t n = x.size();
  if (n < p.m + 2) {
    throw InsufficientData("ApEn needs at least m+2 = " + std::to_string(p.m + 2) + " samples, got " +
                           std::to_string(n));
  }

  const std::size_t m = p.m;
  const std::size_t short_count = n - m + 1;
  const std::size_t long_count = n - m;
  std::vector<std::size_t> short_matches(short_count, 0);
  std::vector<std::size_t> long_matches(long_count, 0);

  for (std::size_t i = 0; i < short_count; ++i) {
    ++short_matches[i];
    if (i < long_count) ++long_matches[i];
    for (std::size_t j = i + 1; j < short_count; ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < m && dist <= p.r; ++k) dist = std::max(dist, std::abs(x[i + k] - x[j + k]));
      if (dist > p.r) continue;
      ++short_matches[i];
      ++short_matches[j];
      if (j < long_count && std::abs(x[i + m] - x[j + m]) <= p.r) {
        ++long_matches[i];
        ++long_matches[j];
      }
    }
  }

  auto phi = [](const std::vector<std::size_t>& matches) {
    const auto count = static_cast<double>(matches.size());
    double acc = 0.0;
    for (std::size_t c : matches) acc += std::log(static_cast<double>(c) / count);
    return acc / count;
  };
  return phi(short_matches) - phi(long_matches);
}

}  // namespace fatigue
