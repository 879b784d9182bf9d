#pragma once

// Maximal matching LCA: a maximal independent set of the line graph, where an
// all-neighbors probe on the line graph costs two probes on the base graph.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "mis.hpp"
#include "random_tape.hpp"

namespace poset_lca {

using Edge = std::pair<Vertex, Vertex>;

/// Lexicographic (min, max) edge IDs: key = min * bound + max, where every
/// vertex ID is < bound. The MIS tie-break order on line-graph vertices is
/// the order of these keys.
class EdgeKeys {
 public:
  explicit EdgeKeys(std::uint64_t vertex_bound) : bound_(std::max<std::uint64_t>(vertex_bound, 1)) {}

  std::uint64_t key(Vertex u, Vertex v) const {
    if (u > v) std::swap(u, v);
    return u * bound_ + v;
  }
  Edge edge(std::uint64_t key) const { return {key / bound_, key % bound_}; }
  std::uint64_t bound() const { return bound_; }

 private:
  std::uint64_t bound_;
};

namespace detail {

template <WorkGraph G>
std::vector<Vertex> sorted_neighbors(const G& g, Vertex v) {
  const auto& range = g.neighbors(v);
  std::vector<Vertex> out(std::ranges::begin(range), std::ranges::end(range));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Edges sharing an endpoint with (u, v). Throws UnknownEdge if (u, v) is not
/// an edge of g.
template <WorkGraph G>
std::vector<Edge> line_graph_neighbors(const G& g, Vertex u, Vertex v) {
  const auto nu = detail::sorted_neighbors(g, u);
  if (!std::binary_search(nu.begin(), nu.end(), v))
    throw UnknownEdge("(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
  const auto nv = detail::sorted_neighbors(g, v);
  std::vector<Edge> out;
  for (Vertex w : nu)
    if (w != v) out.emplace_back(std::min(u, w), std::max(u, w));
  for (Vertex w : nv)
    if (w != u) out.emplace_back(std::min(v, w), std::max(v, w));
  std::sort(out.begin(), out.end());
  return out;
}

/// Line graph of g as a WorkGraph over edge keys.
template <WorkGraph G>
class LineGraph {
 public:
  LineGraph(const G& g, std::uint64_t vertex_bound) : g_(&g), keys_(vertex_bound) {}

  std::vector<Vertex> neighbors(Vertex key) const {
    const auto [u, v] = keys_.edge(key);
    std::vector<Vertex> out;
    for (auto [a, b] : line_graph_neighbors(*g_, u, v)) out.push_back(keys_.key(a, b));
    std::sort(out.begin(), out.end());
    return out;
  }
  std::size_t degree_bound() const {
    const std::size_t d = g_->degree_bound();
    return d == 0 ? 0 : 2 * d - 2;
  }
  std::size_t vertex_count() const { return g_->vertex_count() * g_->degree_bound() / 2; }
  const EdgeKeys& keys() const { return keys_; }

 private:
  const G* g_;
  EdgeKeys keys_;
};

/// MIS configuration for the line graph of a graph with the given size and
/// degree bound.
inline MisConfig line_graph_mis_config(std::size_t vertex_count, std::size_t degree_bound,
                                       double delta, double c_tau = 2.0, double c_cap = 1.0) {
  const std::size_t line_degree = degree_bound == 0 ? 0 : 2 * degree_bound - 2;
  const std::size_t line_vertices = std::max<std::size_t>(1, vertex_count * degree_bound / 2);
  return MisConfig{default_tau(line_degree, c_tau),
                   default_component_cap(line_vertices, line_degree, delta, c_cap)};
}

/// The MIS LCA run on the line graph of g, specialized so that a round costs
/// O(incident edges) per endpoint instead of O(line-graph degree^2): each
/// base vertex keeps the desire sum and marked count of its live incident
/// edges. Produces exactly the outcomes MisLca<LineGraph<G>> produces for
/// the same tape and config.
template <WorkGraph G>
class LineGraphMis {
 public:
  LineGraphMis(const G& g, std::uint64_t vertex_bound, RandomTape tape, MisConfig config)
      : g_(&g), keys_(vertex_bound), tape_(std::move(tape)), config_(config) {
    if (config_.tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (config_.tau > DesireSum::kMaxRound) throw std::out_of_range("tau too large");
  }

  const EdgeKeys& keys() const { return keys_; }
  const MisConfig& config() const { return config_; }

  Outcome simulate(Vertex u, Vertex v) {
    require_edge(u, v);
    return simulate_key(keys_.key(u, v));
  }

  /// Undecided line-graph component around edge (u, v), as sorted keys.
  std::vector<std::uint64_t> undecided_component(Vertex u, Vertex v) {
    require_edge(u, v);
    return component(keys_.key(u, v));
  }

  /// Whether (u, v) belongs to the matching.
  bool in_matching(Vertex u, Vertex v) {
    require_edge(u, v);
    return member_key(keys_.key(u, v));
  }

  /// Matched partner of x, or x itself.
  Vertex partner(Vertex x) {
    const auto nbrs = incident(x);
    for (Vertex y : nbrs)
      if (member_key(keys_.key(x, y))) return y;
    return x;
  }

  MisStats stats() const {
    MisStats s = stats_;
    s.tape_bits = tape_.bits_read();
    s.simulated_vertices = edges_.size();
    return s;
  }

 private:
  struct EdgeRound {
    DesireLevel level = 1;
    bool alive = true;
    std::int8_t marked = -1;
  };
  struct EdgeTrack {
    std::vector<EdgeRound> rounds{EdgeRound{}};
    Fate fate = Fate::undecided;
    unsigned decided_round = 0;
  };
  struct Aggregate {
    DesireSum::Value sum = 0;      // saturated, at scale round + 1
    std::uint32_t marked = 0;      // live marked incident edges, saturating at 2
    Vertex marked_other = 0;       // other endpoint of the unique marked edge
  };
  struct VertexTrack {
    std::optional<std::vector<Vertex>> incident;
    std::vector<Aggregate> rounds;
    std::optional<unsigned> quiet_from;  // no live incident edge from this round on
  };

  void require_edge(Vertex u, Vertex v) {
    const auto& nu = incident(u);
    if (!std::binary_search(nu.begin(), nu.end(), v))
      throw UnknownEdge("(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
  }

  const std::vector<Vertex>& incident(Vertex u) {
    VertexTrack& vt = vertices_[u];
    if (!vt.incident) {
      ++stats_.neighbor_reads;
      vt.incident = detail::sorted_neighbors(*g_, u);
    }
    return *vt.incident;
  }

  EdgeRound& edge_state(std::uint64_t key, unsigned t) {
    EdgeTrack& et = edges_[key];
    return t < et.rounds.size() ? et.rounds[t] : et.rounds.back();
  }

  bool edge_marked(std::uint64_t key, unsigned t) {
    EdgeRound& s = edge_state(key, t);
    if (!s.alive) return false;
    if (s.marked < 0) s.marked = tape_.all_zero(t, key, s.level) ? 1 : 0;
    return s.marked == 1;
  }

  Aggregate aggregate(Vertex u, unsigned t) {
    ensure_vertex(u, t);
    const VertexTrack& vt = vertices_[u];
    return t < vt.rounds.size() ? vt.rounds[t] : Aggregate{};
  }

  void ensure_vertex(Vertex u, unsigned t) {
    VertexTrack& vt = vertices_[u];
    const auto& inc = incident(u);
    while (vt.rounds.size() <= t && !vt.quiet_from) {
      const auto r = static_cast<unsigned>(vt.rounds.size());
      DesireSum sum(r);
      Aggregate agg;
      bool any_alive = false;
      for (Vertex w : inc) {
        const auto key = keys_.key(u, w);
        ensure_edge(key, r);
        if (!edge_state(key, r).alive) continue;
        any_alive = true;
        sum.add(edge_state(key, r).level);
        if (edge_marked(key, r)) {
          agg.marked = std::min<std::uint32_t>(agg.marked + 1, 2);
          agg.marked_other = w;
        }
      }
      if (!any_alive) {
        vt.quiet_from = r;
        break;
      }
      agg.sum = sum.value();
      vt.rounds.push_back(agg);
    }
  }

  void ensure_edge(std::uint64_t key, unsigned t) {
    EdgeTrack& et = edges_[key];
    while (et.rounds.size() <= t && et.rounds.back().alive) advance_edge(key, et);
  }

  // Whether some edge at x joins in round t.
  bool vertex_has_join(const Aggregate& ax, unsigned t) {
    return ax.marked == 1 && aggregate(ax.marked_other, t).marked == 1;
  }

  void advance_edge(std::uint64_t key, EdgeTrack& et) {
    const auto t = static_cast<unsigned>(et.rounds.size() - 1);
    const auto [u, v] = keys_.edge(key);
    const Aggregate au = aggregate(u, t);
    const Aggregate av = aggregate(v, t);
    const DesireLevel level = et.rounds[t].level;
    const bool joined = edge_marked(key, t) && au.marked == 1 && av.marked == 1;
    const bool killed = !joined && (vertex_has_join(au, t) || vertex_has_join(av, t));

    EdgeRound next;
    next.level = level;
    if (joined || killed) {
      next.alive = false;
      et.fate = joined ? Fate::in : Fate::out;
      et.decided_round = t + 1;
    } else {
      DesireSum sum(t);
      // both endpoint sums include this edge's own term
      const auto value = au.sum + av.sum - 2 * sum.term(level);
      next.level = next_desire_level(level, sum.pressure(value));
    }
    et.rounds.push_back(next);
  }

  Outcome simulate_key(std::uint64_t key) {
    ensure_edge(key, config_.tau);
    const EdgeTrack& et = edges_[key];
    return et.rounds.back().alive ? Outcome{} : Outcome{et.fate, et.decided_round};
  }

  std::vector<std::uint64_t> line_neighbors(std::uint64_t key) {
    const auto [u, v] = keys_.edge(key);
    std::vector<std::uint64_t> out;
    for (Vertex w : incident(u))
      if (w != v) out.push_back(keys_.key(u, w));
    for (Vertex w : incident(v))
      if (w != u) out.push_back(keys_.key(v, w));
    return out;
  }

  std::vector<std::uint64_t> component(std::uint64_t key) {
    if (simulate_key(key).decided())
      throw std::logic_error("undecided_component called on a decided edge");
    std::vector<std::uint64_t> comp{key};
    std::unordered_set<std::uint64_t> seen{key};
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (auto n : line_neighbors(comp[head])) {
        if (seen.contains(n) || simulate_key(n).decided()) continue;
        seen.insert(n);
        comp.push_back(n);
        if (comp.size() > config_.component_cap)
          throw ComponentTooLarge(comp.size(), config_.component_cap);
      }
    std::sort(comp.begin(), comp.end());
    stats_.max_component = std::max(stats_.max_component, comp.size());
    return comp;
  }

  bool member_key(std::uint64_t key) {
    if (auto it = greedy_.find(key); it != greedy_.end()) return it->second;
    const Outcome o = simulate_key(key);
    if (o.decided()) return o.fate == Fate::in;
    const auto comp = component(key);
    std::unordered_set<std::uint64_t> joined;
    for (auto e : comp) {
      bool free = true;
      for (auto n : line_neighbors(e))
        if (joined.contains(n) || simulate_key(n).fate == Fate::in) {
          free = false;
          break;
        }
      if (free) joined.insert(e);
    }
    for (auto e : comp) greedy_[e] = joined.contains(e);
    return greedy_.at(key);
  }

  const G* g_;
  EdgeKeys keys_;
  RandomTape tape_;
  MisConfig config_;
  std::unordered_map<std::uint64_t, EdgeTrack> edges_;
  std::unordered_map<Vertex, VertexTrack> vertices_;
  std::unordered_map<std::uint64_t, bool> greedy_;
  MisStats stats_;
};

/// Partner oracle lambda(x) for one fixed maximal matching of g.
template <WorkGraph G>
class MatchingLca {
 public:
  MatchingLca(const G& g, std::uint64_t vertex_bound, RandomTape tape, MisConfig config)
      : engine_(g, vertex_bound, std::move(tape), config) {}

  Vertex partner(Vertex x) { return engine_.partner(x); }
  bool in_matching(Vertex u, Vertex v) { return engine_.in_matching(u, v); }
  MisStats stats() const { return engine_.stats(); }

 private:
  LineGraphMis<G> engine_;
};

/// Sequential greedy matching over the given edge order.
inline std::vector<Edge> greedy_matching_reference(std::span<const Edge> order) {
  std::unordered_set<Vertex> used;
  std::vector<Edge> out;
  for (auto [u, v] : order) {
    if (u == v || used.contains(u) || used.contains(v)) continue;
    used.insert(u);
    used.insert(v);
    out.emplace_back(std::min(u, v), std::max(u, v));
  }
  return out;
}

inline std::vector<Edge> greedy_matching_reference(const std::vector<Edge>& order) {
  return greedy_matching_reference(std::span<const Edge>(order));
}

/// partner[x] describes a valid maximal matching of g: an involution whose
/// non-fixed pairs are edges, and no edge has both endpoints unmatched.
template <WorkGraph G>
bool is_maximal_matching(const G& g, std::span<const Vertex> partner,
                         std::span<const Vertex> vertices) {
  for (Vertex x : vertices) {
    const Vertex y = partner[x];
    if (partner[y] != x) return false;
    if (y != x) {
      const auto nbrs = detail::sorted_neighbors(g, x);
      if (!std::binary_search(nbrs.begin(), nbrs.end(), y)) return false;
    }
  }
  for (Vertex x : vertices)
    if (partner[x] == x)
      for (Vertex y : g.neighbors(x))
        if (partner[y] == y) return false;
  return true;
}

}  // namespace poset_lca
