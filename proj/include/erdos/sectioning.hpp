#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erdos/error.hpp"
#include "erdos/graph.hpp"
#include "erdos/metrics.hpp"

namespace erdos {

// ---------------------------------------------------------------------------
// Criteria and sectors
// ---------------------------------------------------------------------------

enum class Criterion { k, k_in, k_out, s, s_in, s_out, C1, C2, C3, C4, C5, C6 };

inline constexpr std::array<Criterion, 6> kSimpleCriteria = {
    Criterion::k, Criterion::k_in, Criterion::k_out,
    Criterion::s, Criterion::s_in, Criterion::s_out};

inline constexpr bool is_simple(Criterion c) { return static_cast<int>(c) < 6; }
inline constexpr bool is_strength(Criterion c) {
  return c == Criterion::s || c == Criterion::s_in || c == Criterion::s_out;
}
inline constexpr bool is_directional(Criterion c) {
  return c == Criterion::k_in || c == Criterion::k_out || c == Criterion::s_in ||
         c == Criterion::s_out;
}

inline std::string_view criterion_name(Criterion c) {
  static constexpr std::array<std::string_view, 12> names = {
      "k", "kin", "kout", "s", "sin", "sout", "C1", "C2", "C3", "C4", "C5", "C6"};
  return names[static_cast<int>(c)];
}

inline std::optional<Criterion> parse_criterion(std::string_view name) {
  for (int i = 0; i < 12; ++i) {
    const auto c = static_cast<Criterion>(i);
    if (criterion_name(c) == name) return c;
  }
  if (name == "k_in") return Criterion::k_in;
  if (name == "k_out") return Criterion::k_out;
  if (name == "s_in") return Criterion::s_in;
  if (name == "s_out") return Criterion::s_out;
  return std::nullopt;
}

/// Sector membership bitmask. Simple criteria set exactly one bit; C1 may
/// set none (unclassified) and C2 may set several.
using SectorSet = std::uint8_t;
inline constexpr SectorSet kPeriphery = 1;
inline constexpr SectorSet kIntermediary = 2;
inline constexpr SectorSet kHub = 4;

enum class SectorLabel { periphery, intermediary, hub, unclassified, multiple };

inline SectorLabel label_of(SectorSet s) {
  switch (s) {
    case kPeriphery: return SectorLabel::periphery;
    case kIntermediary: return SectorLabel::intermediary;
    case kHub: return SectorLabel::hub;
    case 0: return SectorLabel::unclassified;
    default: return SectorLabel::multiple;
  }
}

/// "periphery", "hub", ..., "unclassified"; several classes joined by '|'.
inline std::string sector_text(SectorSet s) {
  if (s == 0) return "unclassified";
  std::string out;
  const auto add = [&](SectorSet bit, std::string_view name) {
    if (!(s & bit)) return;
    if (!out.empty()) out.push_back('|');
    out.append(name);
  };
  add(kPeriphery, "periphery");
  add(kIntermediary, "intermediary");
  add(kHub, "hub");
  return out;
}

// ---------------------------------------------------------------------------
// Null model
// ---------------------------------------------------------------------------

/// How the mean edge weight used to rescale strengths is computed.
enum class WeightRule {
  average_edge_weight,  ///< Σs / (2z): total weight over edge count
  literal_printed,      ///< 2z / Σs, kept for comparison runs
};

struct NullModel {
  std::size_t n_vertices = 0;
  std::size_t n_edges = 0;
  double p_e = 0;
  double mean_weight = 0;
  /// Σ_i s_i / 2, i.e. the total edge weight; kept exact for rescaling.
  std::uint64_t total_weight = 0;
  WeightRule weight_rule = WeightRule::average_edge_weight;
};

inline NullModel null_model(const InteractionNetwork& g,
                            WeightRule rule = WeightRule::average_edge_weight) {
  const auto n = g.n_vertices();
  if (n < 2)
    throw DegenerateNetworkError("null model needs at least 2 vertices, got " + std::to_string(n));
  NullModel m;
  m.n_vertices = n;
  m.n_edges = g.n_edges();
  m.total_weight = g.total_weight();
  m.weight_rule = rule;
  m.p_e = static_cast<double>(m.n_edges) / (static_cast<double>(n) * static_cast<double>(n - 1));
  if (m.n_edges > 0) {
    const double sum_s = 2.0 * static_cast<double>(m.total_weight);
    const double z = static_cast<double>(m.n_edges);
    m.mean_weight = rule == WeightRule::average_edge_weight ? sum_s / (2.0 * z) : 2.0 * z / sum_s;
  }
  return m;
}

/// Binomial(trials, p) mass table. Masses are built from the mode outwards
/// with the ratio recurrence in log space and then normalized, which keeps
/// every entry accurate to a few ulps even for 10^5 trials.
class BinomialPmf {
 public:
  BinomialPmf(std::size_t trials, double p) : mass_(trials + 1, 0.0) {
    if (p <= 0.0) {
      mass_.front() = 1.0;
      return;
    }
    if (p >= 1.0) {
      mass_.back() = 1.0;
      return;
    }
    const double n = static_cast<double>(trials);
    const auto mode = std::min<std::size_t>(
        trials, static_cast<std::size_t>(std::floor((n + 1.0) * p)));
    const double log_odds = std::log(p) - std::log1p(-p);
    std::vector<double> logw(trials + 1, 0.0);
    for (std::size_t k = mode; k < trials; ++k)
      logw[k + 1] = logw[k] + std::log((n - static_cast<double>(k)) / static_cast<double>(k + 1)) +
                    log_odds;
    for (std::size_t k = mode; k > 0; --k)
      logw[k - 1] = logw[k] + std::log(static_cast<double>(k) / (n - static_cast<double>(k) + 1.0)) -
                    log_odds;
    // Sum smallest terms first.
    double total = 0.0;
    for (std::size_t k = 0; k <= trials; ++k) mass_[k] = std::exp(logw[k]);
    std::vector<double> sorted = mass_;
    std::sort(sorted.begin(), sorted.end());
    for (double w : sorted) total += w;
    for (auto& w : mass_) w /= total;
  }

  std::size_t trials() const { return mass_.size() - 1; }

  /// Mass at k; 0 outside [0, trials].
  double operator()(std::int64_t k) const {
    if (k < 0 || static_cast<std::size_t>(k) >= mass_.size()) return 0.0;
    return mass_[static_cast<std::size_t>(k)];
  }

  double range_mass(std::int64_t lo, std::int64_t hi) const {
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(trials()));
    double s = 0.0;
    for (auto k = lo; k <= hi; ++k) s += mass_[static_cast<std::size_t>(k)];
    return s;
  }

 private:
  std::vector<double> mass_;
};

/// Total-degree mass over 2(N-1) trials.
inline BinomialPmf null_pmf_total(const NullModel& m) {
  return BinomialPmf(2 * (m.n_vertices - 1), m.p_e);
}

/// In- or out-degree mass over N-1 trials.
inline BinomialPmf null_pmf_directional(const NullModel& m) {
  return BinomialPmf(m.n_vertices - 1, m.p_e);
}

inline double null_pmf_total(const NullModel& m, std::int64_t k) { return null_pmf_total(m)(k); }
inline double null_pmf_directional(const NullModel& m, std::int64_t k) {
  return null_pmf_directional(m)(k);
}

// ---------------------------------------------------------------------------
// Rescaling and binning
// ---------------------------------------------------------------------------

/// Nearest integer (halves round up) to s / w̄, evaluated exactly in integers.
inline std::int64_t rescale_strength(std::uint64_t s, const NullModel& m) {
  const std::uint64_t z = m.n_edges;
  const std::uint64_t w = m.total_weight;
  if (z == 0 || w == 0) return 0;
  // average rule: s / (W/z) = s·z/W; literal rule: s / (z/W) = s·W/z.
  const auto [num, den] = m.weight_rule == WeightRule::average_edge_weight
                              ? std::pair{static_cast<unsigned __int128>(s) * z, w}
                              : std::pair{static_cast<unsigned __int128>(s) * w, z};
  return static_cast<std::int64_t>((2 * num + den) / (2 * static_cast<unsigned __int128>(den)));
}

/// Per-vertex value compared against the null for criterion γ: degree
/// counts as-is, strengths rescaled by the mean edge weight.
inline std::vector<std::int64_t> rescaled_values(const std::vector<DegreeStrength>& ds,
                                                 const NullModel& m, Criterion c) {
  if (!is_simple(c)) throw ContractError("rescaled_values needs a simple criterion");
  std::vector<std::int64_t> out;
  out.reserve(ds.size());
  for (const auto& d : ds) {
    switch (c) {
      case Criterion::k: out.push_back(static_cast<std::int64_t>(d.k)); break;
      case Criterion::k_in: out.push_back(static_cast<std::int64_t>(d.k_in)); break;
      case Criterion::k_out: out.push_back(static_cast<std::int64_t>(d.k_out)); break;
      case Criterion::s: out.push_back(rescale_strength(d.s, m)); break;
      case Criterion::s_in: out.push_back(rescale_strength(d.s_in, m)); break;
      case Criterion::s_out: out.push_back(rescale_strength(d.s_out, m)); break;
      default: break;
    }
  }
  return out;
}

inline std::vector<std::int64_t> rescaled_values(const InteractionNetwork& g, const NullModel& m,
                                                 Criterion c) {
  return rescaled_values(degrees_strengths(g), m, c);
}

struct Bin {
  std::int64_t k_min = 0;
  std::int64_t k_max = 0;
  std::size_t vertex_count = 0;
  double empirical_mass = 0;
  double null_mass = 0;

  /// Values in this bin are rarer in the network than under the null.
  bool intermediary() const { return empirical_mass < null_mass; }
};

struct BinnedDistribution {
  std::vector<Bin> bins;
  std::size_t eta = 1;
};

/// Greedy ascending bins over the values that occur, each closing as soon as
/// it holds at least `eta` vertices; leftover values form a final smaller
/// bin. A bin spans its smallest to its largest occurring value, so values
/// absent between two bins belong to neither. Each bin carries the empirical
/// and null probability mass over its span.
inline BinnedDistribution bin_and_compare(std::span<const std::int64_t> values,
                                          const std::function<double(std::int64_t)>& pmf,
                                          std::size_t eta) {
  if (eta < 1) throw ContractError("eta must be >= 1");
  BinnedDistribution out;
  out.eta = eta;
  if (values.empty()) return out;
  if (*std::min_element(values.begin(), values.end()) < 0)
    throw ContractError("bin_and_compare: negative value");
  std::map<std::int64_t, std::size_t> count;
  for (const auto v : values) ++count[v];

  const double total = static_cast<double>(values.size());
  std::optional<Bin> cur;
  for (auto it = count.begin(); it != count.end(); ++it) {
    if (!cur) {
      cur.emplace();
      cur->k_min = it->first;
    }
    cur->vertex_count += it->second;
    if (cur->vertex_count >= eta || std::next(it) == count.end()) {
      cur->k_max = it->first;
      cur->empirical_mass = static_cast<double>(cur->vertex_count) / total;
      for (auto k = cur->k_min; k <= cur->k_max; ++k) cur->null_mass += pmf(k);
      out.bins.push_back(*cur);
      cur.reset();
    }
  }
  return out;
}

struct Thresholds {
  std::int64_t k_left = 0;   ///< k_L: periphery iff value <= k_left
  std::int64_t k_right = 0;  ///< k_R: hub iff value > k_right
};

/// k_L is one below the first intermediary bin, k_R the top of the last;
/// empty when no bin is intermediary.
inline std::optional<Thresholds> thresholds(const BinnedDistribution& binned) {
  const auto first = std::find_if(binned.bins.begin(), binned.bins.end(),
                                  [](const Bin& b) { return b.intermediary(); });
  if (first == binned.bins.end()) return std::nullopt;
  const auto last = std::find_if(binned.bins.rbegin(), binned.bins.rend(),
                                 [](const Bin& b) { return b.intermediary(); });
  return Thresholds{first->k_min - 1, last->k_max};
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

enum class Degeneracy {
  none,
  no_edges,          ///< z = 0: everything is periphery
  no_intermediary,   ///< indistinguishable from the null: everything is intermediary
  too_few_vertices,  ///< N < 2: everything is periphery
};

inline std::string_view degeneracy_name(Degeneracy d) {
  switch (d) {
    case Degeneracy::none: return "none";
    case Degeneracy::no_edges: return "no_edges";
    case Degeneracy::no_intermediary: return "no_intermediary";
    case Degeneracy::too_few_vertices: return "too_few_vertices";
  }
  return "?";
}

struct SectioningOptions {
  std::size_t eta = 10;
  WeightRule weight_rule = WeightRule::average_edge_weight;
};

struct ErdosPartition {
  Criterion criterion = Criterion::k;
  std::optional<Thresholds> limits;  ///< simple criteria only
  std::vector<std::string> vertices;
  std::vector<SectorSet> sectors;
  Degeneracy degeneracy = Degeneracy::none;

  std::size_t size() const { return sectors.size(); }
  SectorLabel sector(std::size_t v) const { return label_of(sectors[v]); }
};

/// Sector of one value given thresholds: periphery iff value <= k_L,
/// intermediary iff k_L < value <= k_R, hub iff value > k_R.
inline SectorSet sector_for(std::int64_t value, const Thresholds& t) {
  if (value <= t.k_left) return kPeriphery;
  if (value <= t.k_right) return kIntermediary;
  return kHub;
}

inline ErdosPartition classify_simple(const InteractionNetwork& g, Criterion c,
                                      const SectioningOptions& opt = {}) {
  if (!is_simple(c)) throw ContractError("classify_simple needs a simple criterion");
  const auto model = null_model(g, opt.weight_rule);
  ErdosPartition p;
  p.criterion = c;
  p.vertices = g.vertices();
  const auto n = g.n_vertices();
  if (model.n_edges == 0) {
    p.degeneracy = Degeneracy::no_edges;
    p.sectors.assign(n, kPeriphery);
    return p;
  }
  const auto values = rescaled_values(g, model, c);
  const auto pmf = is_directional(c) ? null_pmf_directional(model) : null_pmf_total(model);
  const auto binned = bin_and_compare(values, std::cref(pmf), opt.eta);
  p.limits = thresholds(binned);
  if (!p.limits) {
    p.degeneracy = Degeneracy::no_intermediary;
    p.sectors.assign(n, kIntermediary);
    return p;
  }
  p.sectors.reserve(n);
  for (const auto v : values) p.sectors.push_back(sector_for(v, *p.limits));
  return p;
}

/// Combines the six simple partitions (any order) into compound criterion
/// C1..C6.
inline ErdosPartition classify_compound(std::span<const ErdosPartition> simple, Criterion c) {
  if (is_simple(c)) throw ContractError("classify_compound needs a compound criterion");
  if (simple.size() != 6) throw ContractError("classify_compound needs six simple partitions");
  for (const auto& p : simple) {
    if (!is_simple(p.criterion)) throw ContractError("compound input must be simple partitions");
    if (p.vertices != simple.front().vertices || p.size() != simple.front().size())
      throw ContractError("simple partitions cover different vertex sets");
  }
  ErdosPartition out;
  out.criterion = c;
  out.vertices = simple.front().vertices;
  out.sectors.resize(simple.front().size());
  for (std::size_t v = 0; v < out.sectors.size(); ++v) {
    SectorSet any = 0, all = kPeriphery | kIntermediary | kHub;
    for (const auto& p : simple) {
      any |= p.sectors[v];
      all &= p.sectors[v];
    }
    const bool all_hub = all == kHub;
    const bool none_periphery = !(any & kPeriphery);
    SectorSet s = 0;
    switch (c) {
      case Criterion::C1: s = all; break;
      case Criterion::C2: s = any; break;
      case Criterion::C3:
        s = all_hub ? kHub : none_periphery ? kIntermediary : kPeriphery;
        break;
      case Criterion::C4:
        s = (any & kHub) ? kHub : (any & kIntermediary) ? kIntermediary : kPeriphery;
        break;
      case Criterion::C5:
        s = all_hub ? kHub : (any & (kPeriphery | kHub)) ? kPeriphery : kIntermediary;
        break;
      case Criterion::C6:
        s = (any & kHub) ? kHub : (any & kPeriphery) ? kPeriphery : kIntermediary;
        break;
      default: break;
    }
    out.sectors[v] = s;
  }
  return out;
}

/// The six simple partitions in kSimpleCriteria order.
inline std::vector<ErdosPartition> classify_all_simple(const InteractionNetwork& g,
                                                       const SectioningOptions& opt = {}) {
  std::vector<ErdosPartition> out;
  out.reserve(6);
  for (const auto c : kSimpleCriteria) out.push_back(classify_simple(g, c, opt));
  return out;
}

/// Any criterion; compound ones are built from the six simple partitions.
inline ErdosPartition classify(const InteractionNetwork& g, Criterion c,
                               const SectioningOptions& opt = {}) {
  if (is_simple(c)) return classify_simple(g, c, opt);
  const auto simple = classify_all_simple(g, opt);
  auto out = classify_compound(simple, c);
  for (const auto& p : simple)
    if (p.degeneracy != Degeneracy::none) out.degeneracy = p.degeneracy;
  return out;
}

// ---------------------------------------------------------------------------
// Timelines
// ---------------------------------------------------------------------------

struct SectorFractions {
  std::size_t window_start = 0;
  double hub = 0;
  double intermediary = 0;
  double periphery = 0;
  /// C1: unclassified fraction; C2: fraction carrying more than one class.
  double extra = 0;
  Degeneracy degeneracy = Degeneracy::none;
};

inline SectorFractions fractions_of(const ErdosPartition& p) {
  SectorFractions f;
  f.degeneracy = p.degeneracy;
  if (p.size() == 0) return f;
  for (const auto s : p.sectors) {
    f.hub += (s & kHub) ? 1 : 0;
    f.intermediary += (s & kIntermediary) ? 1 : 0;
    f.periphery += (s & kPeriphery) ? 1 : 0;
    if (p.criterion == Criterion::C1) f.extra += s == 0 ? 1 : 0;
    if (p.criterion == Criterion::C2) f.extra += std::popcount(s) > 1 ? 1 : 0;
  }
  const double n = static_cast<double>(p.size());
  f.hub /= n;
  f.intermediary /= n;
  f.periphery /= n;
  f.extra /= n;
  return f;
}

struct SectorTimeline {
  Criterion criterion = Criterion::k;
  std::vector<SectorFractions> rows;
};

/// Per-snapshot sector fractions in window order. Snapshots with fewer than
/// two vertices are reported as all-periphery and flagged.
inline SectorTimeline sector_timeline(std::span<const Snapshot> snapshots, Criterion c,
                                      const SectioningOptions& opt = {}) {
  SectorTimeline t;
  t.criterion = c;
  t.rows.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    SectorFractions f;
    if (snap.network.n_vertices() < 2) {
      f.periphery = 1.0;
      f.degeneracy = Degeneracy::too_few_vertices;
    } else {
      f = fractions_of(classify(snap.network, c, opt));
    }
    f.window_start = snap.window_start;
    t.rows.push_back(f);
  }
  return t;
}

}  // namespace erdos
