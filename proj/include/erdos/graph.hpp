#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "erdos/error.hpp"
#include "erdos/ingest.hpp"

namespace erdos {

using VertexId = std::uint32_t;

/// Directed weighted interaction network. Vertices are identity keys kept in
/// lexicographic order; VertexId indexes that order. Self-loops never exist.
class InteractionNetwork {
 public:
  struct Edge {
    VertexId src;
    VertexId dst;
    std::uint64_t weight;
  };

  InteractionNetwork() = default;

  /// Builds from vertex keys (any order, duplicates merged) and weighted
  /// edges given by key. Edge weights for the same ordered pair accumulate;
  /// self-loops and zero weights are dropped.
  static InteractionNetwork from_edges(std::vector<std::string> vertices,
                                       const std::vector<std::tuple<std::string, std::string,
                                                                    std::uint64_t>>& edges) {
    InteractionNetwork g;
    for (const auto& [a, b, w] : edges) {
      vertices.push_back(a);
      vertices.push_back(b);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    g.init(std::move(vertices));
    for (const auto& [a, b, w] : edges) g.add_weight(*g.find(a), *g.find(b), w);
    return g;
  }

  std::size_t n_vertices() const { return keys_.size(); }
  std::size_t n_edges() const { return n_edges_; }
  std::uint64_t total_weight() const { return total_weight_; }

  const std::vector<std::string>& vertices() const { return keys_; }
  const std::string& key(VertexId v) const { return keys_[v]; }

  std::optional<VertexId> find(std::string_view key) const {
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return std::nullopt;
    return static_cast<VertexId>(it - keys_.begin());
  }

  /// Outgoing neighbors of `v` with weights, ascending by target.
  const std::map<VertexId, std::uint64_t>& out_edges(VertexId v) const { return out_[v]; }
  const std::map<VertexId, std::uint64_t>& in_edges(VertexId v) const { return in_[v]; }

  std::uint64_t weight(VertexId a, VertexId b) const {
    const auto it = out_[a].find(b);
    return it == out_[a].end() ? 0 : it->second;
  }

  bool has_edge(VertexId a, VertexId b) const { return out_[a].contains(b); }

  /// Edges in lexicographic (src, dst) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(n_edges_);
    for (VertexId a = 0; a < out_.size(); ++a)
      for (const auto& [b, w] : out_[a]) out.push_back({a, b, w});
    return out;
  }

  void add_weight(VertexId a, VertexId b, std::uint64_t w = 1) {
    if (a == b || w == 0) return;
    auto& slot = out_[a][b];
    if (slot == 0) ++n_edges_;
    slot += w;
    in_[b][a] += w;
    total_weight_ += w;
  }

  /// Sorted, deduplicated keys only.
  void init(std::vector<std::string> sorted_keys) {
    keys_ = std::move(sorted_keys);
    out_.assign(keys_.size(), {});
    in_.assign(keys_.size(), {});
    n_edges_ = 0;
    total_weight_ = 0;
  }

 private:
  std::vector<std::string> keys_;
  std::vector<std::map<VertexId, std::uint64_t>> out_;
  std::vector<std::map<VertexId, std::uint64_t>> in_;
  std::size_t n_edges_ = 0;
  std::uint64_t total_weight_ = 0;
};

/// A reply by B to a message authored by A adds one to weight(A, B). Reply
/// targets outside `messages` contribute nothing; every author in the slice
/// is a vertex.
inline InteractionNetwork build_network(std::span<const Message> messages) {
  std::vector<std::string> keys;
  keys.reserve(messages.size());
  std::unordered_map<std::string_view, std::string_view> author_of;
  author_of.reserve(messages.size());
  for (const auto& m : messages) {
    keys.push_back(m.author);
    author_of.emplace(m.id, m.author);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  InteractionNetwork g;
  g.init(std::move(keys));
  for (const auto& m : messages) {
    if (!m.reply_to) continue;
    const auto it = author_of.find(*m.reply_to);
    if (it == author_of.end()) continue;
    g.add_weight(*g.find(it->second), *g.find(m.author));
  }
  return g;
}

struct WindowSpec {
  std::size_t ws = 1;
  std::size_t step = 1;

  /// Start ordinals 0, step, 2·step, ... with offset + ws ≤ n_messages.
  std::vector<std::size_t> offsets(std::size_t n_messages) const {
    if (ws < 1 || step < 1) throw WindowError("window size and step must be >= 1");
    if (ws > n_messages)
      throw WindowError("window size " + std::to_string(ws) + " exceeds message count " +
                        std::to_string(n_messages));
    std::vector<std::size_t> out;
    for (std::size_t off = 0; off + ws <= n_messages; off += step) out.push_back(off);
    return out;
  }
};

struct Snapshot {
  std::size_t window_start = 0;
  std::size_t window_end = 0;
  InteractionNetwork network;
};

inline std::vector<Snapshot> window_snapshots(const Corpus& corpus, const WindowSpec& spec) {
  std::vector<Snapshot> out;
  const std::span<const Message> all(corpus.messages);
  for (const auto off : spec.offsets(all.size()))
    out.push_back({off, off + spec.ws, build_network(all.subspan(off, spec.ws))});
  return out;
}

/// Size of the largest weakly connected component over N; 0 when empty.
inline double giant_component_fraction(const InteractionNetwork& g) {
  const auto n = g.n_vertices();
  if (n == 0) return 0.0;
  std::vector<VertexId> parent(n);
  std::iota(parent.begin(), parent.end(), VertexId{0});
  const auto find = [&](VertexId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) {
    const auto a = find(e.src), b = find(e.dst);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> size(n, 0);
  for (VertexId v = 0; v < n; ++v) ++size[find(v)];
  return static_cast<double>(*std::max_element(size.begin(), size.end())) /
         static_cast<double>(n);
}

// CSV export. Keys containing CSV metacharacters are quoted.
namespace detail {
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}
}  // namespace detail

inline void write_edge_csv(const InteractionNetwork& g, std::ostream& out) {
  out << "src,dst,weight\n";
  for (const auto& e : g.edges())
    out << detail::csv_field(g.key(e.src)) << ',' << detail::csv_field(g.key(e.dst)) << ','
        << e.weight << '\n';
}

inline void write_vertex_csv(const InteractionNetwork& g, std::ostream& out) {
  out << "vertex\n";
  for (const auto& k : g.vertices()) out << detail::csv_field(k) << '\n';
}

}  // namespace erdos
