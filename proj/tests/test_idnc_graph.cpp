#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "idnc/errors.hpp"
#include "idnc/idnc_graph.hpp"

using namespace idnc;

namespace {

Clique clique(std::vector<Vertex> v) { return Clique(std::move(v)); }

// C1/C2 straight from the state feedback matrix.
bool predicate_adjacent(const StateFeedbackMatrix& f, const Vertex& a, const Vertex& b) {
  if (a.receiver == b.receiver) return false;
  if (a.packet == b.packet) return true;
  return f.has(b.receiver, a.packet) && f.has(a.receiver, b.packet);
}

// Every subset of vertices that is a clique and has no clique superset.
std::set<std::vector<Vertex>> brute_force_maximal(const IdncGraph& g) {
  const std::size_t n = g.size();
  std::vector<bool> is_clique(std::size_t{1} << n, false);
  for (std::size_t mask = 0; mask < is_clique.size(); ++mask) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      for (std::size_t b = a + 1; b < n && ok; ++b)
        if ((mask >> a & 1) && (mask >> b & 1) && !g.adjacent(a, b)) ok = false;
    is_clique[mask] = ok;
  }
  std::set<std::vector<Vertex>> out;
  for (std::size_t mask = 1; mask < is_clique.size(); ++mask) {
    if (!is_clique[mask]) continue;
    bool maximal = true;
    for (std::size_t v = 0; v < n && maximal; ++v)
      if (!(mask >> v & 1) && is_clique[mask | (std::size_t{1} << v)]) maximal = false;
    if (!maximal) continue;
    std::vector<Vertex> vs;
    for (std::size_t v = 0; v < n; ++v)
      if (mask >> v & 1) vs.push_back(g.vertex(v));
    std::sort(vs.begin(), vs.end());
    out.insert(vs);
  }
  return out;
}

}  // namespace

TEST_SUITE("idnc_graph") {

TEST_CASE("graph of the small example over all layers") {
  const auto g = IdncGraph::build(fixtures::example_small(), fixtures::example_small_gop(), 3);
  const std::vector<Vertex> expected{{0, 0}, {0, 2}, {0, 3}, {0, 4}, {1, 1}, {1, 2}};
  CHECK(g.vertices() == expected);
  CHECK(g.edge_count() == 4);
  auto edge = [&](Vertex a, Vertex b) { return g.adjacent(*g.index_of(a), *g.index_of(b)); };
  CHECK(edge({0, 2}, {1, 2}));
  CHECK(edge({0, 0}, {1, 1}));
  CHECK(edge({0, 3}, {1, 1}));
  CHECK(edge({0, 4}, {1, 1}));
  CHECK_FALSE(edge({0, 0}, {1, 2}));
}

TEST_CASE("windowed graph of the feasible-window example") {
  const auto g = IdncGraph::build(fixtures::example_windows(), fixtures::example_windows_gop(), 2);
  CHECK(g.vertices() == std::vector<Vertex>{{0, 2}, {0, 3}, {1, 2}});
  CHECK(g.edge_count() == 1);
  CHECK(g.adjacent(0, 2));
}

TEST_CASE("single receiver graphs are edgeless") {
  const auto f = StateFeedbackMatrix::from_rows({{1, 0, 1, 1}});
  const auto g = IdncGraph::build(f, LayeredGop({4}), 1);
  CHECK(g.size() == 3);
  CHECK(g.edge_count() == 0);
  CHECK(enumerate_maximal_cliques(g).size() == 3);
}

TEST_CASE("maximal clique enumeration") {
  const auto g = IdncGraph::build(fixtures::example_small(), fixtures::example_small_gop(), 3);
  const auto cliques = enumerate_maximal_cliques(g);
  const std::vector<Clique> expected{clique({{0, 0}, {1, 1}}), clique({{0, 2}, {1, 2}}),
                                     clique({{0, 3}, {1, 1}}), clique({{0, 4}, {1, 1}})};
  CHECK(cliques == expected);

  SUBCASE("one packet missing everywhere is a single complete clique") {
    const auto f = StateFeedbackMatrix::from_rows({{1, 0}, {1, 0}, {1, 0}, {1, 1}});
    const auto all = enumerate_maximal_cliques(IdncGraph::build(f, LayeredGop({1, 1}), 1));
    REQUIRE(all.size() == 1);
    CHECK(all[0].targeted() == std::vector<std::size_t>{0, 1, 2, 3});
  }
  SUBCASE("vertex budget") {
    CHECK_THROWS_AS(enumerate_maximal_cliques(g, 5), OracleUnavailable);
  }
}

TEST_CASE("adjacent subgraph") {
  const auto g = IdncGraph::build(fixtures::example_small(), fixtures::example_small_gop(), 3);
  const auto sub = adjacent_subgraph(g, clique({{1, 1}}));
  CHECK(sub.vertices() == std::vector<Vertex>{{0, 0}, {0, 3}, {0, 4}});
  CHECK(sub.edge_count() == 0);
  CHECK(adjacent_subgraph(g, clique({{0, 0}, {1, 1}})).empty());
  CHECK(adjacent_subgraph(g, Clique{}).vertices() == g.vertices());
}

TEST_CASE("instant decoding") {
  const std::vector<std::size_t> p12{0, 1};
  CHECK(decode_attempt(p12, std::set<std::size_t>{1}) == 0u);
  CHECK_FALSE(decode_attempt(p12, std::set<std::size_t>{}).has_value());
  CHECK_FALSE(decode_attempt(p12, std::set<std::size_t>{0, 1}).has_value());
  // Trade-off example: after the first slot sends P2 and only receiver 2 gets
  // it, P1 xor P2 serves both receivers.
  auto f = fixtures::example_tradeoff();
  f.mark_received(1, 1);
  CHECK(decode_attempt(p12, f, 1) == 0u);
  CHECK(decode_attempt(p12, f, 0) == 1u);
}

TEST_CASE("maximum clique search") {
  const auto g = IdncGraph::build(fixtures::example_small(), fixtures::example_small_gop(), 3);
  const auto best = maximum_clique(g, 1000);
  REQUIRE(best.has_value());
  CHECK(*best == clique({{0, 0}, {1, 1}}));
  const auto greedy = greedy_max_degree_clique(g);
  CHECK(g.is_maximal_clique(greedy));
}

TEST_CASE("properties over random states") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = fixtures::random_instance(rng);
    const std::size_t w = std::uniform_int_distribution<std::size_t>(1, inst.gop.layer_count())(rng);
    const auto g = IdncGraph::build(inst.sfm, inst.gop, w);
    const std::size_t width = inst.gop.prefix_size(w);
    std::size_t expected_vertices = 0;
    for (std::size_t i = 0; i < inst.sfm.receivers(); ++i)
      for (std::size_t j = 0; j < width; ++j) expected_vertices += inst.sfm.missing(i, j);
    REQUIRE(g.size() == expected_vertices);
    for (std::size_t a = 0; a < g.size(); ++a) {
      REQUIRE_FALSE(g.adjacent(a, a));
      for (std::size_t b = 0; b < g.size(); ++b)
        REQUIRE(g.adjacent(a, b) == (a != b && predicate_adjacent(inst.sfm, g.vertex(a), g.vertex(b))));
    }

    const auto cliques = enumerate_maximal_cliques(g, 64);
    const std::set<std::vector<Vertex>> found = [&] {
      std::set<std::vector<Vertex>> s;
      for (const auto& c : cliques) s.insert(c.vertices());
      return s;
    }();
    REQUIRE(found.size() == cliques.size());
    if (g.size() <= 16) {
      REQUIRE(found == brute_force_maximal(g));
    } else {
      // Too many subsets to list; check each clique against every extension.
      for (const auto& c : cliques) {
        REQUIRE(g.is_clique(c));
        const auto members = g.members(c);
        for (std::size_t v = 0; v < g.size(); ++v) {
          if (members.test(v)) continue;
          bool extends = true;
          for (auto k = members.find_first(); k != VertexSet::npos; k = members.find_next(k))
            extends = extends && g.adjacent(v, k);
          REQUIRE_FALSE(extends);
        }
      }
    }

    for (const auto& c : cliques) {
      const auto targeted = c.targeted();
      REQUIRE(targeted.size() == c.size());
      // Every targeted receiver that hears the XOR decodes its own packet.
      const auto packets = c.packets();
      for (const auto& v : c.vertices()) REQUIRE(decode_attempt(packets, inst.sfm, v.receiver) == v.packet);
    }
  }
}

}  // TEST_SUITE
