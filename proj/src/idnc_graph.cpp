#include "idnc/idnc_graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "idnc/errors.hpp"

namespace idnc {

Clique::Clique(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
}

std::vector<std::size_t> Clique::targeted() const {
  std::vector<std::size_t> out;
  for (const auto& v : vertices_)
    if (out.empty() || out.back() != v.receiver) out.push_back(v.receiver);
  return out;
}

std::vector<std::size_t> Clique::packets() const {
  std::vector<std::size_t> out;
  out.reserve(vertices_.size());
  for (const auto& v : vertices_) out.push_back(v.packet);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Clique::targets(std::size_t receiver) const {
  return std::any_of(vertices_.begin(), vertices_.end(),
                     [&](const Vertex& v) { return v.receiver == receiver; });
}

std::size_t Clique::packet_index_sum() const {
  std::size_t sum = 0;
  for (const auto& v : vertices_) sum += v.packet;
  return sum;
}

Clique Clique::united(const Clique& other) const {
  std::vector<Vertex> all = vertices_;
  all.insert(all.end(), other.vertices_.begin(), other.vertices_.end());
  return Clique(std::move(all));
}

IdncGraph IdncGraph::build(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                           std::size_t window) {
  if (sfm.packets() != gop.packet_count())
    throw std::invalid_argument("state feedback width does not match the GOP");
  if (window < 1 || window > gop.layer_count())
    throw std::invalid_argument("window must lie in [1, L]");
  const std::size_t receivers = sfm.receivers();
  const std::size_t width = gop.prefix_size(window);

  IdncGraph g;
  for (std::size_t i = 0; i < receivers; ++i)
    for (std::size_t j = 0; j < width; ++j)
      if (sfm.missing(i, j)) g.vertices_.push_back({i, j});
  const std::size_t n = g.vertices_.size();

  // Per packet j: vertices wanting j, and vertices whose receiver holds j.
  // Per receiver i: vertices whose packet i holds.
  std::vector<VertexSet> wanting(width, VertexSet(n));
  std::vector<VertexSet> owner_holds(width, VertexSet(n));
  std::vector<VertexSet> packet_held_by(receivers, VertexSet(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto [m, p] = g.vertices_[k];
    wanting[p].set(k);
    for (std::size_t j = 0; j < width; ++j)
      if (sfm.has(m, j)) owner_holds[j].set(k);
    for (std::size_t i = 0; i < receivers; ++i)
      if (sfm.has(i, p)) packet_held_by[i].set(k);
  }

  g.adjacency_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [i, j] = g.vertices_[k];
    VertexSet row = owner_holds[j];  // C2, first half: the other receiver holds P_j
    row &= packet_held_by[i];        // C2, second half: R_i holds the other packet
    row |= wanting[j];               // C1
    row.reset(k);
    g.adjacency_.push_back(std::move(row));
  }
  return g;
}

std::optional<std::size_t> IdncGraph::index_of(const Vertex& v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::size_t IdncGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& row : adjacency_) twice += row.count();
  return twice / 2;
}

VertexSet IdncGraph::members(const Clique& clique) const {
  VertexSet set(size());
  for (const auto& v : clique.vertices()) {
    auto k = index_of(v);
    if (!k) throw std::invalid_argument("clique vertex is not in the graph");
    set.set(*k);
  }
  return set;
}

VertexSet IdncGraph::common_neighbours(const Clique& clique) const {
  VertexSet set = all();
  for (const auto& v : clique.vertices()) {
    auto k = index_of(v);
    if (!k) throw std::invalid_argument("clique vertex is not in the graph");
    set &= adjacency_[*k];
  }
  return set;
}

bool IdncGraph::is_clique(const Clique& clique) const {
  std::vector<std::size_t> idx;
  for (const auto& v : clique.vertices()) {
    auto k = index_of(v);
    if (!k) return false;
    idx.push_back(*k);
  }
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (!adjacent(idx[a], idx[b])) return false;
  return true;
}

bool IdncGraph::is_maximal_clique(const Clique& clique) const {
  return is_clique(clique) && common_neighbours(clique).none();
}

Clique IdncGraph::clique_of(const VertexSet& set) const {
  std::vector<Vertex> out;
  for (auto k = set.find_first(); k != VertexSet::npos; k = set.find_next(k))
    out.push_back(vertices_[k]);
  return Clique(std::move(out));
}

IdncGraph IdncGraph::induced(const VertexSet& keep) const {
  std::vector<std::size_t> old;
  for (auto k = keep.find_first(); k != VertexSet::npos; k = keep.find_next(k)) old.push_back(k);
  IdncGraph sub;
  sub.vertices_.reserve(old.size());
  sub.adjacency_.assign(old.size(), VertexSet(old.size()));
  for (std::size_t a = 0; a < old.size(); ++a) {
    sub.vertices_.push_back(vertices_[old[a]]);
    for (std::size_t b = a + 1; b < old.size(); ++b)
      if (adjacency_[old[a]].test(old[b])) {
        sub.adjacency_[a].set(b);
        sub.adjacency_[b].set(a);
      }
  }
  return sub;
}

IdncGraph adjacent_subgraph(const IdncGraph& graph, const Clique& clique) {
  if (!graph.is_clique(clique)) throw std::invalid_argument("adjacent_subgraph needs a clique of the graph");
  return graph.induced(graph.common_neighbours(clique));
}

namespace {

// Bron-Kerbosch with Tomita pivoting.
void bron_kerbosch(const IdncGraph& g, VertexSet& r, VertexSet p, VertexSet x,
                   std::vector<Clique>& out) {
  if (p.none()) {
    if (x.none()) out.push_back(g.clique_of(r));
    return;
  }
  std::size_t pivot = VertexSet::npos;
  std::size_t best = 0;
  const VertexSet px = p | x;
  for (auto u = px.find_first(); u != VertexSet::npos; u = px.find_next(u)) {
    const std::size_t c = (p & g.neighbours(u)).count();
    if (pivot == VertexSet::npos || c > best) {
      pivot = u;
      best = c;
    }
  }
  const VertexSet branch = p - g.neighbours(pivot);
  for (auto v = branch.find_first(); v != VertexSet::npos; v = branch.find_next(v)) {
    r.set(v);
    bron_kerbosch(g, r, p & g.neighbours(v), x & g.neighbours(v), out);
    r.reset(v);
    p.reset(v);
    x.set(v);
  }
}

}  // namespace

std::vector<Clique> enumerate_maximal_cliques(const IdncGraph& graph, std::size_t vertex_budget) {
  if (graph.size() > vertex_budget)
    throw OracleUnavailable("clique enumeration refused: " + std::to_string(graph.size()) +
                            " vertices exceed the budget of " + std::to_string(vertex_budget));
  std::vector<Clique> out;
  if (graph.empty()) return out;
  VertexSet r = graph.none();
  bron_kerbosch(graph, r, graph.all(), graph.none(), out);
  std::sort(out.begin(), out.end());
  return out;
}

Clique greedy_max_degree_clique(const IdncGraph& graph) {
  VertexSet cand = graph.all();
  VertexSet chosen = graph.none();
  while (cand.any()) {
    std::size_t pick = VertexSet::npos;
    std::size_t best = 0;
    for (auto v = cand.find_first(); v != VertexSet::npos; v = cand.find_next(v)) {
      const std::size_t d = (cand & graph.neighbours(v)).count();
      if (pick == VertexSet::npos || d > best) {
        pick = v;
        best = d;
      }
    }
    chosen.set(pick);
    cand &= graph.neighbours(pick);
  }
  return graph.clique_of(chosen);
}

namespace {

class MaxCliqueSearch {
 public:
  MaxCliqueSearch(const IdncGraph& g, std::size_t budget) : g_(g), budget_(budget) {}

  std::optional<Clique> run() {
    const Clique seed = greedy_max_degree_clique(g_);
    best_ = g_.members(seed);
    best_size_ = seed.size();
    best_sum_ = seed.packet_index_sum();
    VertexSet r = g_.none();
    expand(r, 0, 0, g_.all());
    if (aborted_) return std::nullopt;
    return g_.clique_of(best_);
  }

 private:
  void expand(VertexSet& r, std::size_t r_size, std::size_t r_sum, VertexSet p) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    if (p.none()) {
      if (r_size > best_size_ || (r_size == best_size_ && r_sum < best_sum_) ||
          (r_size == best_size_ && r_sum == best_sum_ && lex_less(r, best_))) {
        best_ = r;
        best_size_ = r_size;
        best_sum_ = r_sum;
      }
      return;
    }
    // Greedy colouring of p: colour c class members are pairwise non-adjacent,
    // so at most `colour` more vertices can join from the prefix up to v.
    std::vector<std::size_t> order;
    std::vector<std::size_t> colour;
    VertexSet uncoloured = p;
    std::size_t c = 0;
    while (uncoloured.any()) {
      ++c;
      VertexSet q = uncoloured;
      for (auto v = q.find_first(); v != VertexSet::npos; v = q.find_next(v)) {
        uncoloured.reset(v);
        q -= g_.neighbours(v);
        order.push_back(v);
        colour.push_back(c);
      }
    }
    for (std::size_t k = order.size(); k-- > 0;) {
      if (r_size + colour[k] < best_size_) return;
      if (r_size + colour[k] == best_size_ &&
          r_sum + smallest_packets(p, best_size_ - r_size) > best_sum_)
        return;
      const std::size_t v = order[k];
      r.set(v);
      expand(r, r_size + 1, r_sum + g_.vertex(v).packet, p & g_.neighbours(v));
      r.reset(v);
      p.reset(v);
      if (aborted_) return;
    }
  }

  // Vertex indices follow the Vertex order, so comparing the ascending index
  // lists compares the cliques.
  static bool lex_less(const VertexSet& a, const VertexSet& b) {
    auto x = a.find_first(), y = b.find_first();
    for (; x != VertexSet::npos && y != VertexSet::npos; x = a.find_next(x), y = b.find_next(y))
      if (x != y) return x < y;
    return x == VertexSet::npos && y != VertexSet::npos;
  }

  // Lower bound on the packet-index sum of `count` vertices drawn from p.
  std::size_t smallest_packets(const VertexSet& p, std::size_t count) const {
    std::vector<std::size_t> packets;
    for (auto v = p.find_first(); v != VertexSet::npos; v = p.find_next(v))
      packets.push_back(g_.vertex(v).packet);
    if (packets.size() < count) return std::numeric_limits<std::size_t>::max() / 2;
    std::partial_sort(packets.begin(), packets.begin() + static_cast<long>(count), packets.end());
    std::size_t sum = 0;
    for (std::size_t k = 0; k < count; ++k) sum += packets[k];
    return sum;
  }

  const IdncGraph& g_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool aborted_ = false;
  VertexSet best_;
  std::size_t best_size_ = 0;
  std::size_t best_sum_ = 0;
};

}  // namespace

std::optional<Clique> maximum_clique(const IdncGraph& graph, std::size_t node_budget) {
  if (graph.empty()) return Clique{};
  return MaxCliqueSearch(graph, node_budget).run();
}

std::optional<std::size_t> decode_attempt(std::span<const std::size_t> coded_packets,
                                          const std::set<std::size_t>& has) {
  std::optional<std::size_t> unknown;
  for (std::size_t p : coded_packets) {
    if (has.contains(p)) continue;
    if (unknown && *unknown != p) return std::nullopt;
    unknown = p;
  }
  return unknown;
}

std::optional<std::size_t> decode_attempt(std::span<const std::size_t> coded_packets,
                                          const StateFeedbackMatrix& sfm, std::size_t receiver) {
  std::optional<std::size_t> unknown;
  for (std::size_t p : coded_packets) {
    if (sfm.has(receiver, p)) continue;
    if (unknown && *unknown != p) return std::nullopt;
    unknown = p;
  }
  return unknown;
}

}  // namespace idnc
