#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls into the library's algorithms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ctime>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

/// Dense weighted digraph: w[a][b] > 0 is an edge a -> b.
using Weights = std::vector<std::vector<std::uint64_t>>;

/// Normalized betweenness by enumerating every simple path between every
/// ordered pair. Path length is Σ 1/w, compared exactly as an integer
/// multiple of 1/L with L the lcm of all weights.
inline std::vector<double> betweenness(const Weights& w) {
  const std::size_t n = w.size();
  std::vector<double> bt(n, 0.0);
  if (n < 3) return bt;
  std::uint64_t lcm = 1;
  for (const auto& row : w)
    for (const auto x : row)
      if (x > 0) lcm = std::lcm(lcm, x);

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      std::optional<std::uint64_t> best;
      std::vector<std::vector<std::size_t>> geodesics;
      std::vector<std::size_t> path{s};
      std::vector<char> on(n, 0);
      on[s] = 1;
      // Depth-first enumeration of simple paths.
      auto walk = [&](auto&& self, std::size_t v, std::uint64_t len) -> void {
        if (v == t) {
          if (!best || len < *best) {
            best = len;
            geodesics.clear();
          }
          if (len == *best) geodesics.push_back(path);
          return;
        }
        for (std::size_t u = 0; u < n; ++u) {
          if (w[v][u] == 0 || on[u]) continue;
          on[u] = 1;
          path.push_back(u);
          self(self, u, len + lcm / w[v][u]);
          path.pop_back();
          on[u] = 0;
        }
      };
      walk(walk, s, 0);
      if (geodesics.empty()) continue;
      std::vector<std::size_t> through(n, 0);
      for (const auto& p : geodesics)
        for (std::size_t i = 1; i + 1 < p.size(); ++i) ++through[p[i]];
      for (std::size_t v = 0; v < n; ++v)
        bt[v] += static_cast<double>(through[v]) / static_cast<double>(geodesics.size());
    }
  }
  const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (auto& b : bt) b /= norm;
  return bt;
}

enum class Scale { seconds, minutes, hours, weekdays, monthdays, months };

/// (value, period, nominal period) of timestamp t from the C library's
/// broken-down UTC time.
struct Measure {
  int value;
  int period;
  double nominal;
};

inline Measure measure(Scale scale, std::int64_t t) {
  const std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  switch (scale) {
    case Scale::seconds: return {tm.tm_sec, 60, 60};
    case Scale::minutes: return {tm.tm_min, 60, 60};
    case Scale::hours: return {tm.tm_hour, 24, 24};
    case Scale::weekdays: return {(tm.tm_wday + 6) % 7, 7, 7};
    case Scale::monthdays: {
      static const int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
      const int y = tm.tm_year + 1900;
      const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
      const int days = len[tm.tm_mon] + (tm.tm_mon == 1 && leap ? 1 : 0);
      return {tm.tm_mday - 1, days, 365.2425 / 12.0};
    }
    case Scale::months: return {tm.tm_mon, 12, 12};
  }
  return {0, 1, 1};
}

struct Circular {
  std::complex<double> m1, m2;
  double R1, R2, theta_mu, theta_mu_rescaled, var, std, dispersion;
  bool mean_defined;
};

/// Single-pass complex summation over the samples.
inline Circular circular(const std::vector<std::int64_t>& ts, Scale scale) {
  std::complex<double> s1 = 0, s2 = 0;
  double nominal = 1;
  for (const auto t : ts) {
    const auto m = measure(scale, t);
    nominal = m.nominal;
    const double theta = 2.0 * std::numbers::pi * m.value / m.period;
    s1 += std::polar(1.0, theta);
    s2 += std::polar(1.0, 2.0 * theta);
  }
  const double n = static_cast<double>(ts.size());
  Circular c{};
  c.m1 = s1 / n;
  c.m2 = s2 / n;
  // A mean of unit vectors is never longer than 1; rounding can push it over.
  c.R1 = std::min(1.0, std::abs(c.m1));
  c.R2 = std::min(1.0, std::abs(c.m2));
  c.var = 1.0 - c.R1;
  c.mean_defined = c.R1 >= 1e-12;
  c.theta_mu = std::atan2(c.m1.imag(), c.m1.real());
  if (c.theta_mu == -std::numbers::pi) c.theta_mu = std::numbers::pi;
  c.theta_mu_rescaled = c.theta_mu * nominal / (2.0 * std::numbers::pi);
  c.std = std::sqrt(-2.0 * std::log(c.R1));
  c.dispersion = (1.0 - c.R2) / (2.0 * c.R1 * c.R1);
  return c;
}

}  // namespace oracle
