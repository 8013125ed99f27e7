#pragma once

// Reference implementations written without looking at the library code
// paths they check. Deliberately slow and literal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Approximate entropy by direct template counting: for every template i,
// scan every template j and compare element by element.
inline double phi(const std::vector<double>& x, std::size_t m, double r) {
  const std::size_t n = x.size();
  const std::size_t count = n - m + 1;
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t matches = 0;
    for (std::size_t j = 0; j < count; ++j) {
      bool close = true;
      for (std::size_t k = 0; k < m; ++k) {
        if (std::fabs(x[i + k] - x[j + k]) > r) {
          close = false;
          break;
        }
      }
      if (close) ++matches;
    }
    total += std::log(static_cast<double>(matches) / static_cast<double>(count));
  }
  return total / static_cast<double>(count);
}

inline double apen(const std::vector<double>& x, std::size_t m, double r) { return phi(x, m, r) - phi(x, m + 1, r); }

inline double population_sd(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  const double mu = s / static_cast<double>(x.size());
  double q = 0.0;
  for (double v : x) q += (v - mu) * (v - mu);
  return std::sqrt(q / static_cast<double>(x.size()));
}

// Counts upward passes of |x| through `threshold`. After a counted pass the
// signal must fall below threshold - hysteresis before another can count; a
// series that begins above the threshold has not crossed it.
inline std::size_t upcrossings(const std::vector<double>& x, double threshold, double hysteresis) {
  std::size_t n = 0;
  bool below = !x.empty() && std::fabs(x.front()) < threshold;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double a = std::fabs(x[i]);
    if (below && a >= threshold) {
      ++n;
      below = false;
    }
    if (!below && a < threshold - hysteresis) below = true;
  }
  return n;
}

// Reflexive-transitive reachability by repeated relaxation over an edge list.
inline std::map<std::string, std::set<std::string>> ancestors(const std::set<std::string>& nodes,
                                                              const std::vector<std::pair<std::string, std::string>>& child_parent) {
  std::map<std::string, std::set<std::string>> up;
  for (const auto& n : nodes) up[n] = {n};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [c, p] : child_parent) {
      for (const auto& a : std::set<std::string>(up[p])) changed |= up[c].insert(a).second;
    }
  }
  return up;
}

}  // namespace oracle
