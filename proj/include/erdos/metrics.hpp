#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <string_view>
#include <tuple>
#include <vector>

#include "erdos/format.hpp"
#include "erdos/graph.hpp"
#include "erdos/matrix.hpp"

namespace erdos {

struct DegreeStrength {
  std::uint64_t k = 0, k_in = 0, k_out = 0;
  std::uint64_t s = 0, s_in = 0, s_out = 0;
};

struct SymmetryMetrics {
  double asy = 0, mu_asy = 0, sigma_asy = 0;
  double dis = 0, mu_dis = 0, sigma_dis = 0;
};

/// All fourteen per-vertex measures.
struct VertexMetrics {
  DegreeStrength ds;
  double cc = 0;
  double bt = 0;
  SymmetryMetrics sym;
};

/// Column order of the metric matrix and of every metric CSV.
inline constexpr std::array<std::string_view, 14> kMetricNames = {
    "cc", "s", "s_in", "s_out", "k", "k_in", "k_out", "bt",
    "asy", "mu_asy", "sigma_asy", "dis", "mu_dis", "sigma_dis"};

namespace detail {

/// Undirected neighbor set of v (union of in- and out-neighbors), ascending.
inline std::vector<VertexId> neighbors(const InteractionNetwork& g, VertexId v) {
  std::vector<VertexId> out;
  const auto& o = g.out_edges(v);
  const auto& i = g.in_edges(v);
  out.reserve(o.size() + i.size());
  auto a = o.begin(), b = i.begin();
  while (a != o.end() || b != i.end()) {
    if (b == i.end() || (a != o.end() && a->first < b->first)) out.push_back((a++)->first);
    else if (a == o.end() || b->first < a->first) out.push_back((b++)->first);
    else {
      out.push_back(a->first);
      ++a;
      ++b;
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<DegreeStrength> degrees_strengths(const InteractionNetwork& g) {
  std::vector<DegreeStrength> out(g.n_vertices());
  for (VertexId v = 0; v < g.n_vertices(); ++v) {
    auto& d = out[v];
    d.k_out = g.out_edges(v).size();
    d.k_in = g.in_edges(v).size();
    d.k = detail::neighbors(g, v).size();
    for (const auto& [u, w] : g.out_edges(v)) d.s_out += w;
    for (const auto& [u, w] : g.in_edges(v)) d.s_in += w;
    d.s = d.s_in + d.s_out;
  }
  return out;
}

/// Undirected clustering coefficient: fraction of neighbor pairs that are
/// linked in either direction; 0 when k < 2.
inline std::vector<double> clustering(const InteractionNetwork& g) {
  const auto n = g.n_vertices();
  std::vector<std::vector<VertexId>> nb(n);
  for (VertexId v = 0; v < n; ++v) nb[v] = detail::neighbors(g, v);
  std::vector<double> out(n, 0.0);
  for (VertexId v = 0; v < n; ++v) {
    const auto& nv = nb[v];
    const auto k = nv.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const auto& na = nb[nv[a]];
      // Count neighbors of v after position a that are adjacent to nv[a].
      auto it = na.begin();
      for (std::size_t b = a + 1; b < k; ++b) {
        it = std::lower_bound(it, na.end(), nv[b]);
        if (it == na.end()) break;
        if (*it == nv[b]) ++links;
      }
    }
    out[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(k) * (k - 1));
  }
  return out;
}

/// Betweenness over weighted directed geodesics with edge length 1/weight,
/// accumulated with Brandes' dependency recursion and normalized by
/// (N-1)(N-2). Path lengths within a relative 1e-12 are treated as equal.
inline std::vector<double> betweenness(const InteractionNetwork& g) {
  const auto n = g.n_vertices();
  std::vector<double> bt(n, 0.0);
  if (n < 3) return bt;

  // Flattened adjacency with lengths, built once.
  std::vector<std::vector<std::pair<VertexId, double>>> adj(n);
  for (VertexId v = 0; v < n; ++v)
    for (const auto& [u, w] : g.out_edges(v)) adj[v].emplace_back(u, 1.0 / static_cast<double>(w));

  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto same = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };

  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<std::vector<VertexId>> pred(n);
  std::vector<VertexId> order;
  std::vector<char> settled(n);
  using Item = std::pair<double, VertexId>;

  for (VertexId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(settled.begin(), settled.end(), 0);
    for (auto& p : pred) p.clear();
    order.clear();

    dist[s] = 0.0;
    sigma[s] = 1.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (settled[v]) continue;
      settled[v] = 1;
      order.push_back(v);
      for (const auto& [u, len] : adj[v]) {
        if (settled[u]) continue;
        const double alt = dist[v] + len;
        if (dist[u] == inf || (alt < dist[u] && !same(alt, dist[u]))) {
          dist[u] = alt;
          sigma[u] = sigma[v];
          pred[u].assign(1, v);
          queue.emplace(alt, u);
        } else if (same(alt, dist[u])) {
          sigma[u] += sigma[v];
          pred[u].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = *it;
      for (const auto v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bt[w] += delta[w];
    }
  }
  const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (auto& b : bt) b /= norm;
  return bt;
}

/// Asymmetry and disequilibrium of each vertex and of its edges. Vertices
/// with k = 0 get zeros; the dis family is zero when s = 0.
inline std::vector<SymmetryMetrics> symmetry_metrics(const InteractionNetwork& g) {
  std::vector<SymmetryMetrics> out(g.n_vertices());
  for (VertexId v = 0; v < g.n_vertices(); ++v) {
    const auto nb = detail::neighbors(g, v);
    if (nb.empty()) continue;
    const double k = static_cast<double>(nb.size());
    std::vector<double> e_asy, e_dis;
    e_asy.reserve(nb.size());
    e_dis.reserve(nb.size());
    std::uint64_t s_in = 0, s_out = 0;
    for (const auto j : nb) {
      const auto w_in = g.weight(j, v);
      const auto w_out = g.weight(v, j);
      s_in += w_in;
      s_out += w_out;
      e_asy.push_back(static_cast<double>(w_in > 0) - static_cast<double>(w_out > 0));
      e_dis.push_back(static_cast<double>(w_in) - static_cast<double>(w_out));
    }
    const double s = static_cast<double>(s_in + s_out);
    auto& m = out[v];
    m.asy = (static_cast<double>(g.in_edges(v).size()) - static_cast<double>(g.out_edges(v).size())) / k;

    const auto mean_sd = [k](const std::vector<double>& xs) {
      double sum = 0;
      for (double x : xs) sum += x;
      const double mu = sum / k;
      double ss = 0;
      for (double x : xs) ss += (mu - x) * (mu - x);
      return std::pair{mu, std::sqrt(ss / k)};
    };
    std::tie(m.mu_asy, m.sigma_asy) = mean_sd(e_asy);
    if (s > 0) {
      for (auto& x : e_dis) x /= s;
      m.dis = (static_cast<double>(s_in) - static_cast<double>(s_out)) / s;
      std::tie(m.mu_dis, m.sigma_dis) = mean_sd(e_dis);
    }
  }
  return out;
}

inline std::vector<VertexMetrics> vertex_metrics(const InteractionNetwork& g) {
  const auto ds = degrees_strengths(g);
  const auto cc = clustering(g);
  const auto bt = betweenness(g);
  const auto sym = symmetry_metrics(g);
  std::vector<VertexMetrics> out(g.n_vertices());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {ds[i], cc[i], bt[i], sym[i]};
  return out;
}

inline std::array<double, 14> metric_row(const VertexMetrics& m) {
  const auto d = [](std::uint64_t x) { return static_cast<double>(x); };
  return {m.cc,           d(m.ds.s),     d(m.ds.s_in),   d(m.ds.s_out),    d(m.ds.k),
          d(m.ds.k_in),   d(m.ds.k_out), m.bt,           m.sym.asy,        m.sym.mu_asy,
          m.sym.sigma_asy, m.sym.dis,    m.sym.mu_dis,   m.sym.sigma_dis};
}

/// Vertices (lexicographic by key) × the fourteen metrics in kMetricNames order.
inline Matrix metrics_matrix(const InteractionNetwork& g) {
  const auto vm = vertex_metrics(g);
  Matrix x(vm.size(), kMetricNames.size());
  for (std::size_t i = 0; i < vm.size(); ++i) {
    const auto row = metric_row(vm[i]);
    for (std::size_t j = 0; j < row.size(); ++j) x(i, j) = row[j];
  }
  return x;
}

/// Per-vertex metric CSV; `x` must come from metrics_matrix(g).
inline void write_metrics_csv(const InteractionNetwork& g, const Matrix& x, std::ostream& out) {
  out << "vertex";
  for (const auto name : kMetricNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out << detail::csv_field(g.key(static_cast<VertexId>(i)));
    for (std::size_t j = 0; j < x.cols(); ++j) out << ',' << fmt_double(x(i, j));
    out << '\n';
  }
}

}  // namespace erdos
