#pragma once

// IDNC conflict graph over a window of the state feedback matrix.
//
// One vertex per (receiver, missing packet). Two vertices are adjacent when
// they want the same packet at different receivers (C1), or when each wants
// a packet the other's receiver already holds (C2). A clique is a set of
// packets whose XOR every owning receiver can decode instantly.

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "idnc/video_model.hpp"

namespace idnc {

inline constexpr std::size_t kDefaultVertexBudget = 30;

struct Vertex {
  std::size_t receiver;
  std::size_t packet;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

// Vertex set kept sorted receiver-major, then by packet.
class Clique {
 public:
  Clique() = default;
  explicit Clique(std::vector<Vertex> vertices);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }
  std::size_t size() const { return vertices_.size(); }

  // X(kappa): receivers owning a vertex, ascending.
  std::vector<std::size_t> targeted() const;
  // Distinct packets XORed into the transmission, ascending.
  std::vector<std::size_t> packets() const;
  bool targets(std::size_t receiver) const;
  std::size_t packet_index_sum() const;

  Clique united(const Clique& other) const;

  friend auto operator<=>(const Clique&, const Clique&) = default;

 private:
  std::vector<Vertex> vertices_;
};

using VertexSet = boost::dynamic_bitset<std::uint64_t>;

class IdncGraph {
 public:
  IdncGraph() = default;

  static IdncGraph build(const StateFeedbackMatrix& sfm, const LayeredGop& gop, std::size_t window);

  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t k) const { return vertices_[k]; }
  const VertexSet& neighbours(std::size_t k) const { return adjacency_[k]; }
  bool adjacent(std::size_t a, std::size_t b) const { return adjacency_[a].test(b); }
  std::optional<std::size_t> index_of(const Vertex& v) const;
  std::size_t edge_count() const;

  VertexSet all() const { return VertexSet(size()).set(); }
  VertexSet none() const { return VertexSet(size()); }
  VertexSet members(const Clique& clique) const;
  // Vertices adjacent to every vertex of `clique` (and not in it).
  VertexSet common_neighbours(const Clique& clique) const;

  bool is_clique(const Clique& clique) const;
  bool is_maximal_clique(const Clique& clique) const;
  Clique clique_of(const VertexSet& set) const;

  // Induced subgraph, vertex order preserved.
  IdncGraph induced(const VertexSet& keep) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<VertexSet> adjacency_;
};

IdncGraph adjacent_subgraph(const IdncGraph& graph, const Clique& clique);

// Every maximal clique, sorted lexicographically. Throws OracleUnavailable when
// the graph has more than `vertex_budget` vertices.
std::vector<Clique> enumerate_maximal_cliques(const IdncGraph& graph,
                                              std::size_t vertex_budget = kDefaultVertexBudget);

// Largest clique; ties go to the lowest packet-index sum, then to the
// lexicographically smallest vertex list. Returns nullopt when the branch and
// bound search exceeds `node_budget` expansions.
std::optional<Clique> maximum_clique(const IdncGraph& graph, std::size_t node_budget);

// Repeatedly takes the candidate with most candidate neighbours.
Clique greedy_max_degree_clique(const IdncGraph& graph);

// The packet a receiver recovers from the XOR of `coded_packets`, if exactly
// one of them is unknown to it; nullopt otherwise (the reception is dropped).
std::optional<std::size_t> decode_attempt(std::span<const std::size_t> coded_packets,
                                          const std::set<std::size_t>& has);
std::optional<std::size_t> decode_attempt(std::span<const std::size_t> coded_packets,
                                          const StateFeedbackMatrix& sfm, std::size_t receiver);

}  // namespace idnc
