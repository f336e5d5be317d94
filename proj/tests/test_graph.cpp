#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "erdos/graph.hpp"
#include "erdos/ingest.hpp"

using namespace erdos;

namespace {

Message msg(std::string id, std::string author, std::int64_t t,
            std::optional<std::string> reply_to = std::nullopt) {
  return {std::move(id), std::move(author), t, std::move(reply_to), 0};
}

Corpus corpus_of_size(std::size_t m) {
  std::vector<Message> msgs;
  for (std::size_t i = 0; i < m; ++i)
    msgs.push_back(msg("m" + std::to_string(i), "a" + std::to_string(i % 7), static_cast<std::int64_t>(i),
                       i > 0 ? std::optional<std::string>("m" + std::to_string(i - 1)) : std::nullopt));
  return build_corpus(std::move(msgs));
}

}  // namespace

TEST(BuildNetwork, ReplyMakesEdgeFromTargetToReplier) {
  const std::vector<Message> m = {msg("m0", "A", 0), msg("m1", "B", 1, "m0")};
  const auto g = build_network(m);
  EXPECT_EQ(g.n_vertices(), 2u);
  EXPECT_EQ(g.n_edges(), 1u);
  EXPECT_EQ(g.weight(*g.find("A"), *g.find("B")), 1u);
  EXPECT_EQ(g.weight(*g.find("B"), *g.find("A")), 0u);
}

TEST(BuildNetwork, SelfReplyDiscarded) {
  const std::vector<Message> m = {msg("m0", "A", 0), msg("m1", "A", 1, "m0")};
  const auto g = build_network(m);
  EXPECT_EQ(g.n_vertices(), 1u);
  EXPECT_EQ(g.n_edges(), 0u);
}

TEST(BuildNetwork, RepeatedRepliesAddWeight) {
  const std::vector<Message> m = {msg("m0", "A", 0), msg("m1", "B", 1, "m0"), msg("m2", "B", 2, "m0")};
  const auto g = build_network(m);
  EXPECT_EQ(g.n_edges(), 1u);
  EXPECT_EQ(g.weight(*g.find("A"), *g.find("B")), 2u);
  EXPECT_EQ(g.total_weight(), 2u);
}

TEST(BuildNetwork, TargetOutsideSliceAddsNothing) {
  const std::vector<Message> m = {msg("m1", "B", 1, "gone"), msg("m2", "C", 2)};
  const auto g = build_network(m);
  EXPECT_EQ(g.n_vertices(), 2u);
  EXPECT_EQ(g.n_edges(), 0u);
}

TEST(BuildNetwork, EmptySlice) {
  const auto g = build_network({});
  EXPECT_EQ(g.n_vertices(), 0u);
  EXPECT_EQ(giant_component_fraction(g), 0.0);
}

TEST(BuildNetwork, PermutationInvariant) {
  auto c = corpus_of_size(200);
  auto shuffled = c.messages;
  std::mt19937 rng(3);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto c2 = build_corpus(shuffled);
  const auto a = build_network(c.messages);
  const auto b = build_network(c2.messages);
  EXPECT_EQ(a.vertices(), b.vertices());
  const auto ea = a.edges(), eb = b.edges();
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    EXPECT_EQ(ea[i].src, eb[i].src);
    EXPECT_EQ(ea[i].dst, eb[i].dst);
    EXPECT_EQ(ea[i].weight, eb[i].weight);
  }
}

TEST(FromEdges, MergesAndDropsSelfLoops) {
  const auto g = InteractionNetwork::from_edges({"c"}, {{"a", "b", 2}, {"a", "b", 3}, {"b", "b", 4}, {"b", "a", 0}});
  EXPECT_EQ(g.n_vertices(), 3u);
  EXPECT_EQ(g.n_edges(), 1u);
  EXPECT_EQ(g.weight(0, 1), 5u);
  EXPECT_FALSE(g.find("d"));
}

TEST(WindowSpec, Offsets) {
  EXPECT_EQ((WindowSpec{1000, 1000}.offsets(20000).size()), 20u);
  EXPECT_EQ((WindowSpec{100, 1}.offsets(100)), (std::vector<std::size_t>{0}));
  EXPECT_EQ((WindowSpec{100, 50}.offsets(150)), (std::vector<std::size_t>{0, 50}));
  EXPECT_EQ((WindowSpec{1000, 500}.offsets(2000)), (std::vector<std::size_t>{0, 500, 1000}));
}

TEST(WindowSpec, TooLargeNamesBothValues) {
  try {
    WindowSpec{101, 1}.offsets(100);
    FAIL() << "expected WindowError";
  } catch (const WindowError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("101"), std::string::npos);
    EXPECT_NE(what.find("100"), std::string::npos);
  }
  EXPECT_THROW((WindowSpec{0, 1}.offsets(10)), WindowError);
  EXPECT_THROW((WindowSpec{1, 0}.offsets(10)), WindowError);
}

TEST(WindowSnapshots, DisjointWindowsPartitionMessages) {
  const auto c = corpus_of_size(250);
  const auto snaps = window_snapshots(c, {50, 50});
  ASSERT_EQ(snaps.size(), 5u);
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    EXPECT_EQ(snaps[i].window_start, 50 * i);
    EXPECT_EQ(snaps[i].window_end - snaps[i].window_start, 50u);
  }
  // Each window's network only sees its own slice: the first message of
  // every window replies outside it, so 49 reply edges remain in weight.
  for (const auto& s : snaps) EXPECT_EQ(s.network.total_weight(), 49u);
}

TEST(GiantComponent, Fractions) {
  EXPECT_DOUBLE_EQ(giant_component_fraction(InteractionNetwork::from_edges({"C"}, {{"A", "B", 1}})), 2.0 / 3.0);
  std::vector<std::tuple<std::string, std::string, std::uint64_t>> full;
  for (char a = 'a'; a < 'f'; ++a)
    for (char b = 'a'; b < 'f'; ++b)
      if (a != b) full.emplace_back(std::string(1, a), std::string(1, b), 1);
  EXPECT_EQ(giant_component_fraction(InteractionNetwork::from_edges({}, full)), 1.0);
  // Direction is ignored: a -> b <- c is one weak component.
  EXPECT_EQ(giant_component_fraction(InteractionNetwork::from_edges({}, {{"a", "b", 1}, {"c", "b", 1}})), 1.0);
}

TEST(ExportCsv, EdgeAndVertexLists) {
  const auto g = InteractionNetwork::from_edges({"z"}, {{"b", "a", 2}, {"a", "b,c", 1}});
  std::ostringstream e, v;
  write_edge_csv(g, e);
  write_vertex_csv(g, v);
  EXPECT_EQ(e.str(), "src,dst,weight\na,\"b,c\",1\nb,a,2\n");
  EXPECT_EQ(v.str(), "vertex\na\nb\n\"b,c\"\nz\n");
}
