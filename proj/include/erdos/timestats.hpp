#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "erdos/error.hpp"
#include "erdos/format.hpp"
#include "erdos/ingest.hpp"

namespace erdos {

enum class Timescale { seconds, minutes, hours, weekdays, monthdays, months };

inline constexpr std::array<Timescale, 6> kAllTimescales = {
    Timescale::seconds, Timescale::minutes,   Timescale::hours,
    Timescale::weekdays, Timescale::monthdays, Timescale::months};

inline std::string_view timescale_name(Timescale s) {
  static constexpr std::array<std::string_view, 6> names = {
      "seconds", "minutes", "hours", "weekdays", "monthdays", "months"};
  return names[static_cast<int>(s)];
}

inline std::optional<Timescale> parse_timescale(std::string_view name) {
  for (const auto s : kAllTimescales)
    if (timescale_name(s) == name) return s;
  return std::nullopt;
}

/// Mean Gregorian month length in days; rescales month-day mean angles.
inline constexpr double kMeanMonthDays = 365.2425 / 12.0;

/// A measurement on a periodic scale: `value` in [0, period).
struct Phase {
  int value = 0;
  int period = 1;

  double angle() const { return value * 2.0 * std::numbers::pi / period; }
  friend auto operator<=>(const Phase&, const Phase&) = default;
};

/// Measurement of a UTC timestamp on a scale. Month days use the length of
/// the message's own calendar month as period.
inline Phase extract(Timescale scale, std::int64_t t) {
  const std::int64_t days = detail::floor_div(t, 86400);
  const std::int64_t sec_of_day = t - days * 86400;
  switch (scale) {
    case Timescale::seconds: return {static_cast<int>(sec_of_day % 60), 60};
    case Timescale::minutes: return {static_cast<int>((sec_of_day / 60) % 60), 60};
    case Timescale::hours: return {static_cast<int>(sec_of_day / 3600), 24};
    case Timescale::weekdays:
      // 1970-01-01 was a Thursday; Monday = 0.
      return {static_cast<int>(((days + 3) % 7 + 7) % 7), 7};
    case Timescale::monthdays: {
      const auto c = detail::civil_from_days(days);
      return {static_cast<int>(c.day) - 1, static_cast<int>(detail::days_in_month(c.year, c.month))};
    }
    case Timescale::months: {
      const auto c = detail::civil_from_days(days);
      return {static_cast<int>(c.month) - 1, 12};
    }
  }
  return {};
}

/// Period used to express the mean angle back in units of the scale.
inline double nominal_period(Timescale scale) {
  switch (scale) {
    case Timescale::seconds:
    case Timescale::minutes: return 60;
    case Timescale::hours: return 24;
    case Timescale::weekdays: return 7;
    case Timescale::monthdays: return kMeanMonthDays;
    case Timescale::months: return 12;
  }
  return 1;
}

/// Number of histogram bins for a scale.
inline int unit_count(Timescale scale) {
  return scale == Timescale::monthdays ? 31 : static_cast<int>(nominal_period(scale));
}

inline std::string unit_label(Timescale scale, int unit) {
  static constexpr std::array<std::string_view, 7> wd = {"Mon", "Tue", "Wed", "Thu",
                                                         "Fri", "Sat", "Sun"};
  static constexpr std::array<std::string_view, 12> mo = {"Jan", "Feb", "Mar", "Apr",
                                                          "May", "Jun", "Jul", "Aug",
                                                          "Sep", "Oct", "Nov", "Dec"};
  switch (scale) {
    case Timescale::weekdays: return std::string(wd[unit]);
    case Timescale::months: return std::string(mo[unit]);
    case Timescale::monthdays: return std::to_string(unit + 1);
    default: return std::to_string(unit);
  }
}

// ---------------------------------------------------------------------------
// Circular statistics
// ---------------------------------------------------------------------------

struct CircularStats {
  std::complex<double> m1, m2;
  double R1 = 0, R2 = 0;
  double theta_mu = 0;           ///< Arg(m1) in (-pi, pi]
  double theta_mu_rescaled = 0;  ///< theta_mu in units of the scale
  double var = 0;                ///< 1 - R1
  double std = 0;                ///< sqrt(-2 ln R1)
  double dispersion = 0;         ///< (1 - R2) / (2 R1^2)
};

/// Raised when the first moment vanishes and the mean angle is undefined.
class MeanUndefinedError : public Error {
 public:
  explicit MeanUndefinedError(double var)
      : Error("circular mean undefined: first moment length is zero"), var(var) {}
  double var;
};

/// Below this first-moment length the mean angle is treated as undefined.
inline constexpr double kMeanUndefinedTolerance = 1e-12;

/// Moment sums over phase tallies. Identical phases are counted once, so
/// shards combine exactly by adding their tallies.
class PhaseTally {
 public:
  void add(Phase p, std::size_t times = 1) {
    counts_[p] += times;
    total_ += times;
  }
  void merge(const PhaseTally& other) {
    for (const auto& [p, c] : other.counts_) add(p, c);
  }
  std::size_t total() const { return total_; }

  /// n-th trigonometric moment.
  std::complex<double> moment(int n) const {
    double re = 0, im = 0;
    for (const auto& [p, c] : counts_) {
      const double a = n * p.angle();
      re += static_cast<double>(c) * std::cos(a);
      im += static_cast<double>(c) * std::sin(a);
    }
    const double N = static_cast<double>(total_);
    return {re / N, im / N};
  }

 private:
  std::map<Phase, std::size_t> counts_;
  std::size_t total_ = 0;
};

inline CircularStats circular_stats(const PhaseTally& tally, double rescale_period) {
  if (tally.total() == 0) throw ContractError("circular_stats needs at least one timestamp");
  CircularStats c;
  c.m1 = tally.moment(1);
  c.m2 = tally.moment(2);
  c.R1 = std::min(1.0, std::abs(c.m1));
  c.R2 = std::min(1.0, std::abs(c.m2));
  c.var = 1.0 - c.R1;
  if (c.R1 < kMeanUndefinedTolerance) throw MeanUndefinedError(c.var);
  c.theta_mu = std::arg(c.m1);
  if (c.theta_mu <= -std::numbers::pi) c.theta_mu = std::numbers::pi;
  c.theta_mu_rescaled = rescale_period / (2.0 * std::numbers::pi) * c.theta_mu;
  c.std = std::sqrt(-2.0 * std::log(c.R1));
  c.dispersion = (1.0 - c.R2) / (2.0 * c.R1 * c.R1);
  return c;
}

inline CircularStats circular_stats(std::span<const std::int64_t> timestamps, Timescale scale) {
  PhaseTally tally;
  for (const auto t : timestamps) tally.add(extract(scale, t));
  return circular_stats(tally, nominal_period(scale));
}

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

struct ActivityHistogram {
  Timescale scale = Timescale::hours;
  std::vector<std::size_t> counts;
  std::vector<double> percentages;
  /// Highest over lowest bin count; empty when some bin is zero.
  std::optional<double> peak_ratio;

  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

/// Histogram of counts, percentages and max/min ratio.
inline ActivityHistogram histogram_from_counts(Timescale scale, std::vector<std::size_t> counts) {
  ActivityHistogram h;
  h.scale = scale;
  h.counts = std::move(counts);
  const double total = static_cast<double>(h.total());
  h.percentages.reserve(h.counts.size());
  for (const auto c : h.counts) h.percentages.push_back(total > 0 ? 100.0 * c / total : 0.0);
  const auto [lo, hi] = std::minmax_element(h.counts.begin(), h.counts.end());
  if (lo != h.counts.end() && *lo > 0)
    h.peak_ratio = static_cast<double>(*hi) / static_cast<double>(*lo);
  return h;
}

inline ActivityHistogram activity_histogram(std::span<const std::int64_t> timestamps,
                                            Timescale scale) {
  if (timestamps.empty()) throw ContractError("activity_histogram needs at least one timestamp");
  std::vector<std::size_t> counts(static_cast<std::size_t>(unit_count(scale)), 0);
  for (const auto t : timestamps) ++counts[static_cast<std::size_t>(extract(scale, t).value)];
  return histogram_from_counts(scale, std::move(counts));
}

struct GroupLevel {
  int width = 1;
  std::vector<double> percentages;  ///< one per contiguous group of `width` units
};

/// Percentages rolled up into contiguous groups of each width, e.g. hours in
/// 1h/2h/3h/4h/6h/12h blocks. Every width must divide the bin count.
inline std::vector<GroupLevel> grouped_histogram(const ActivityHistogram& h,
                                                 std::span<const int> widths) {
  const auto n = static_cast<int>(h.counts.size());
  const double total = static_cast<double>(h.total());
  std::vector<GroupLevel> out;
  for (const int w : widths) {
    if (w < 1 || n % w != 0)
      throw ContractError("group width " + std::to_string(w) + " does not divide " +
                          std::to_string(n));
    GroupLevel level;
    level.width = w;
    for (int g = 0; g < n / w; ++g) {
      std::size_t c = 0;
      for (int i = g * w; i < (g + 1) * w; ++i) c += h.counts[static_cast<std::size_t>(i)];
      level.percentages.push_back(total > 0 ? 100.0 * static_cast<double>(c) / total : 0.0);
    }
    out.push_back(std::move(level));
  }
  return out;
}

/// All divisors of n, ascending.
inline std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

// ---------------------------------------------------------------------------
// Concentration of activity over participants
// ---------------------------------------------------------------------------

/// All values are fractions in [0, 1].
struct ActivityConcentration {
  double hub_share = 0;       ///< messages sent by the most active participant
  double q1 = 0;              ///< fewest top participants covering >= 25% of messages
  double q1_coverage = 0;     ///< messages those participants actually cover
  double q3 = 0;              ///< same for >= 75%
  double q3_coverage = 0;
  double last_decile = 0;     ///< most low-activity participants covering <= 10%
  double last_decile_coverage = 0;
};

inline ActivityConcentration activity_concentration(const Corpus& corpus) {
  if (corpus.messages.empty()) throw EmptyCorpusError();
  std::unordered_map<std::string_view, std::size_t> per_author;
  for (const auto& m : corpus.messages) ++per_author[m.author];
  std::vector<std::size_t> counts;
  counts.reserve(per_author.size());
  for (const auto& [a, c] : per_author) counts.push_back(c);
  std::sort(counts.begin(), counts.end(), std::greater<>());

  const double M = static_cast<double>(corpus.messages.size());
  const double N = static_cast<double>(counts.size());
  ActivityConcentration out;
  out.hub_share = static_cast<double>(counts.front()) / M;

  const std::size_t total = corpus.messages.size();
  // Shares are compared in integer percent to stay exact at the boundaries.
  const auto top_cover = [&](std::size_t percent, double& frac, double& coverage) {
    std::size_t acc = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      acc += counts[i];
      if (acc * 100 >= percent * total) {
        frac = static_cast<double>(i + 1) / N;
        coverage = static_cast<double>(acc) / M;
        return;
      }
    }
  };
  top_cover(25, out.q1, out.q1_coverage);
  top_cover(75, out.q3, out.q3_coverage);

  std::size_t acc = 0, taken = 0;
  for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
    if ((acc + *it) * 10 > total) break;
    acc += *it;
    ++taken;
  }
  out.last_decile = static_cast<double>(taken) / N;
  out.last_decile_coverage = static_cast<double>(acc) / M;
  return out;
}

// ---------------------------------------------------------------------------
// Uniform baseline for the max/min ratio
// ---------------------------------------------------------------------------

struct PeakRatioBaseline {
  double mean = 0;
  double stddev = 0;  ///< population deviation over repetitions
  std::size_t undefined = 0;  ///< repetitions with an empty bin (excluded)
};

/// Max/min bin ratio of `draws` uniform integers in `bins` bins, repeated
/// `reps` times.
inline PeakRatioBaseline uniform_peak_ratio(std::size_t draws, std::size_t bins, std::size_t reps,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, bins - 1);
  std::vector<double> ratios;
  ratios.reserve(reps);
  PeakRatioBaseline out;
  std::vector<std::size_t> counts(bins);
  for (std::size_t r = 0; r < reps; ++r) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < draws; ++i) ++counts[pick(rng)];
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    if (*lo == 0) {
      ++out.undefined;
      continue;
    }
    ratios.push_back(static_cast<double>(*hi) / static_cast<double>(*lo));
  }
  if (ratios.empty()) return out;
  double s = 0;
  for (double x : ratios) s += x;
  out.mean = s / static_cast<double>(ratios.size());
  double ss = 0;
  for (double x : ratios) ss += (x - out.mean) * (x - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(ratios.size()));
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_histogram_csv(const ActivityHistogram& h, std::ostream& out) {
  out << "unit,count,percentage\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << unit_label(h.scale, static_cast<int>(i)) << ',' << h.counts[i] << ','
        << fmt_double(h.percentages[i]) << '\n';
}

inline void write_grouped_csv(const std::vector<GroupLevel>& levels, std::ostream& out) {
  out << "width,group,percentage\n";
  for (const auto& l : levels)
    for (std::size_t g = 0; g < l.percentages.size(); ++g)
      out << l.width << ',' << g << ',' << fmt_double(l.percentages[g]) << '\n';
}

}  // namespace erdos
