#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "erdos/error.hpp"
#include "erdos/graph.hpp"
#include "erdos/ingest.hpp"

namespace erdos {

enum class Generator { erdos_renyi, preferential_attachment, reply_process };

inline std::string_view generator_name(Generator g) {
  switch (g) {
    case Generator::erdos_renyi: return "erdos_renyi";
    case Generator::preferential_attachment: return "preferential_attachment";
    case Generator::reply_process: return "reply_process";
  }
  return "?";
}

inline std::optional<Generator> parse_generator(std::string_view s) {
  for (auto g : {Generator::erdos_renyi, Generator::preferential_attachment, Generator::reply_process})
    if (generator_name(g) == s) return g;
  return std::nullopt;
}

struct SyntheticSpec {
  Generator generator = Generator::reply_process;
  std::size_t n_vertices = 1000;    ///< erdos_renyi, preferential_attachment
  double p = 0.01;                  ///< erdos_renyi edge probability
  std::size_t edges_per_vertex = 5; ///< preferential_attachment m
  double exponent = 1.0;            ///< preferential_attachment weight (degree + 1)^exponent
  std::size_t population = 700;     ///< reply_process: number of authors
  std::size_t n_messages = 20000;   ///< reply_process
  double reply_exponent = 0.5;      ///< reply_process: target weight (degree + 1)^reply_exponent
  double activity_tail = 3.0;       ///< reply_process: Pareto index of author activity
  double core_fraction = 0.03;      ///< reply_process: share of authors in the active core
  double core_weight = 30.0;        ///< reply_process: activity multiplier of core authors
  double p_root = 0.3;              ///< reply_process: mean chance a message starts a thread
  std::size_t horizon = 20;         ///< reply_process: recent messages open to replies
  double mean_gap_seconds = 1800;   ///< mean inter-message time
  std::int64_t start_time = 1072915200;  // 2004-01-01T00:00:00Z
  std::uint64_t seed = 1;

  void validate() const {
    const auto fail = [](const std::string& what) { throw ContractError("synthetic spec: " + what); };
    if (!(p >= 0.0 && p <= 1.0)) fail("p must lie in [0, 1]");
    if (!(activity_tail > 0.0) || !std::isfinite(activity_tail)) fail("activity_tail must be finite and > 0");
    if (!(p_root > 0.0 && p_root < 1.0)) fail("p_root must lie in (0, 1)");
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) fail("exponent must be finite and >= 0");
    if (!(reply_exponent >= 0.0) || !std::isfinite(reply_exponent))
      fail("reply_exponent must be finite and >= 0");
    if (!(core_fraction >= 0.0 && core_fraction <= 1.0)) fail("core_fraction must lie in [0, 1]");
    if (!(core_weight > 0.0) || !std::isfinite(core_weight)) fail("core_weight must be finite and > 0");
    if (!(mean_gap_seconds > 0.0)) fail("mean gap must be positive");
    if (generator == Generator::reply_process && n_messages < 1) fail("n_messages must be >= 1");
    if (generator == Generator::reply_process && horizon < 1) fail("horizon must be >= 1");
    if (generator == Generator::reply_process && population < 2) fail("population must be >= 2");
    if (generator != Generator::reply_process && n_vertices < 2) fail("n_vertices must be >= 2");
    if (generator == Generator::preferential_attachment && edges_per_vertex < 1)
      fail("edges_per_vertex must be >= 1");
  }
};

namespace detail {

inline std::string synth_author(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "p%06zu@synth.example", i);
  return buf;
}

inline std::string synth_id(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%07zu", prefix, i);
  return buf;
}

class Clock {
 public:
  Clock(std::int64_t start, double mean_gap) : t_(start), gap_(1.0 / mean_gap) {}
  template <class Rng>
  std::int64_t next(Rng& rng) {
    t_ += 1 + static_cast<std::int64_t>(gap_(rng));
    return t_;
  }

 private:
  std::int64_t t_;
  std::exponential_distribution<double> gap_;
};

/// Messages realizing a directed edge list: one thread root per vertex,
/// then for every edge a -> b a reply by b to a's root.
template <class Rng>
std::vector<Message> messages_from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                         const SyntheticSpec& spec, Rng& rng) {
  Clock clock(spec.start_time, spec.mean_gap_seconds);
  std::vector<Message> out;
  out.reserve(n + edges.size());
  for (std::size_t v = 0; v < n; ++v)
    out.push_back({synth_id('r', v), synth_author(v), clock.next(rng), std::nullopt, 0});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    out.push_back({synth_id('e', e), synth_author(b), clock.next(rng), synth_id('r', a), 0});
  }
  return out;
}

template <class Rng>
std::vector<std::pair<std::size_t, std::size_t>> erdos_renyi_edges(std::size_t n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && coin(rng)) edges.emplace_back(a, b);
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

/// Growth model: each new vertex links to min(m, v) distinct earlier
/// vertices drawn with weight (degree + 1)^exponent; each link points either
/// way with equal odds.
template <class Rng>
std::vector<std::pair<std::size_t, std::size_t>> preferential_edges(std::size_t n, std::size_t m,
                                                                    double exponent, Rng& rng) {
  std::vector<std::size_t> degree(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> weight;
  std::bernoulli_distribution flip(0.5);
  for (std::size_t v = 1; v < n; ++v) {
    weight.assign(v, 0.0);
    for (std::size_t u = 0; u < v; ++u) weight[u] = std::pow(static_cast<double>(degree[u] + 1), exponent);
    const auto links = std::min(m, v);
    for (std::size_t l = 0; l < links; ++l) {
      std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
      const auto u = pick(rng);
      weight[u] = 0.0;  // distinct targets
      if (flip(rng)) edges.emplace_back(u, v);
      else edges.emplace_back(v, u);
      ++degree[u];
      ++degree[v];
    }
  }
  return edges;
}

/// Message stream over a fixed population of authors. Senders are drawn by
/// a Pareto(activity_tail) activity weight, multiplied by core_weight for the
/// first core_fraction of authors. Each author starts a thread with its own
/// probability, drawn from a Beta law with mean p_root; otherwise the message
/// answers one of the last `horizon` messages by other authors, chosen with
/// weight (target author degree + 1)^reply_exponent.
template <class Rng>
std::vector<Message> reply_process_messages(const SyntheticSpec& spec, Rng& rng) {
  const auto n = spec.population;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> activity(n), root_prob(n);
  std::gamma_distribution<double> ga(2.0 * spec.p_root + 1e-9), gb(2.0 * (1.0 - spec.p_root) + 1e-9);
  for (std::size_t a = 0; a < n; ++a) {
    activity[a] = std::pow(1.0 - unit(rng), -1.0 / spec.activity_tail);
    if (static_cast<double>(a) < spec.core_fraction * static_cast<double>(n)) activity[a] *= spec.core_weight;
    const double x = ga(rng), y = gb(rng);
    root_prob[a] = x / (x + y);
  }
  std::discrete_distribution<std::size_t> sender(activity.begin(), activity.end());

  Clock clock(spec.start_time, spec.mean_gap_seconds);
  std::vector<Message> out;
  out.reserve(spec.n_messages);
  std::vector<std::size_t> sender_of;  // per message
  std::vector<std::unordered_set<std::size_t>> neighbors(n);
  std::vector<double> weight;
  std::vector<std::size_t> candidate;

  for (std::size_t i = 0; i < spec.n_messages; ++i) {
    const auto author = sender(rng);
    Message m{synth_id('m', i), synth_author(author), clock.next(rng), std::nullopt, 0};
    if (unit(rng) >= root_prob[author]) {
      weight.clear();
      candidate.clear();
      for (auto j = i > spec.horizon ? i - spec.horizon : 0; j < i; ++j) {
        if (sender_of[j] == author) continue;
        candidate.push_back(j);
        weight.push_back(std::pow(static_cast<double>(neighbors[sender_of[j]].size() + 1), spec.reply_exponent));
      }
      if (!candidate.empty()) {
        std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
        const auto target = candidate[pick(rng)];
        m.reply_to = out[target].id;
        neighbors[sender_of[target]].insert(author);
        neighbors[author].insert(sender_of[target]);
      }
    }
    sender_of.push_back(author);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace detail

/// Deterministic synthetic message stream for `spec` (same spec and seed,
/// same messages).
inline std::vector<Message> synthesize_messages(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  switch (spec.generator) {
    case Generator::erdos_renyi: {
      const auto edges = detail::erdos_renyi_edges(spec.n_vertices, spec.p, rng);
      return detail::messages_from_edges(spec.n_vertices, edges, spec, rng);
    }
    case Generator::preferential_attachment: {
      const auto edges =
          detail::preferential_edges(spec.n_vertices, spec.edges_per_vertex, spec.exponent, rng);
      return detail::messages_from_edges(spec.n_vertices, edges, spec, rng);
    }
    case Generator::reply_process: return detail::reply_process_messages(spec, rng);
  }
  return {};
}

inline Corpus synthesize_corpus(const SyntheticSpec& spec) {
  return build_corpus(synthesize_messages(spec));
}

/// The network of a generator's full message stream. Edge-list generators
/// skip the message detour.
inline InteractionNetwork synthesize_network(const SyntheticSpec& spec) {
  spec.validate();
  if (spec.generator == Generator::reply_process)
    return build_network(synthesize_corpus(spec).messages);
  std::mt19937_64 rng(spec.seed);
  const auto edges = spec.generator == Generator::erdos_renyi
                         ? detail::erdos_renyi_edges(spec.n_vertices, spec.p, rng)
                         : detail::preferential_edges(spec.n_vertices, spec.edges_per_vertex,
                                                      spec.exponent, rng);
  std::vector<std::string> keys;
  keys.reserve(spec.n_vertices);
  for (std::size_t v = 0; v < spec.n_vertices; ++v) keys.push_back(detail::synth_author(v));
  std::vector<std::tuple<std::string, std::string, std::uint64_t>> weighted;
  weighted.reserve(edges.size());
  for (const auto& [a, b] : edges) weighted.emplace_back(keys[a], keys[b], 1);
  return InteractionNetwork::from_edges(std::move(keys), weighted);
}

}  // namespace erdos
