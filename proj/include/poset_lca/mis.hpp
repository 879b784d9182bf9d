#pragma once

// Maximal independent set LCA driven by the desire-level marking dynamics:
// replay tau rounds around the queried vertex, then settle the component of
// still-undecided vertices greedily by ID.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <ranges>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random_tape.hpp"

namespace poset_lca {

using Vertex = std::uint64_t;

/// Undirected graph behind an all-neighbors oracle.
template <class G>
concept WorkGraph = requires(const G& g, Vertex v) {
  { g.neighbors(v) } -> std::ranges::range;
  { g.degree_bound() } -> std::convertible_to<std::size_t>;
  { g.vertex_count() } -> std::convertible_to<std::size_t>;
};

/// Adjacency-list graph on vertices 0..N-1.
class ExplicitGraph {
 public:
  ExplicitGraph() = default;
  explicit ExplicitGraph(std::size_t n) : adj_(n) {}

  static ExplicitGraph from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
    ExplicitGraph g(n);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::invalid_argument("edge references a vertex outside 0..N-1");
      if (u == v) throw std::invalid_argument("self loops are not allowed");
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    for (auto& l : g.adj_) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    return g;
  }

  static ExplicitGraph from_edges(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& e) {
    return from_edges(n, std::span<const std::pair<Vertex, Vertex>>(e));
  }

  /// Takes sorted, symmetric adjacency lists as-is.
  static ExplicitGraph from_adjacency(std::vector<std::vector<Vertex>> adj) {
    ExplicitGraph g;
    g.adj_ = std::move(adj);
    return g;
  }

  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t degree_bound() const {
    std::size_t d = 0;
    for (const auto& l : adj_) d = std::max(d, l.size());
    return d;
  }
  bool adjacent(Vertex u, Vertex v) const {
    return u < adj_.size() && std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

  /// Edges as (min, max) pairs in lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < adj_.size(); ++u)
      for (Vertex v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

 private:
  std::vector<std::vector<Vertex>> adj_;
};

/// Random graph with maximum degree <= max_degree: candidate pairs are drawn
/// uniformly and kept while both endpoints have spare degree.
inline ExplicitGraph random_bounded_degree_graph(std::size_t n, std::size_t max_degree,
                                                 double mean_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> pick(0, n == 0 ? 0 : n - 1);
  const auto target = static_cast<std::size_t>(mean_degree * double(n) / 2.0);
  std::vector<std::size_t> degree(n, 0);
  std::unordered_set<std::uint64_t> present;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t attempt = 0; attempt < 20 * target + 20 && edges.size() < target; ++attempt) {
    Vertex u = pick(rng), v = pick(rng);
    if (u == v || degree[u] >= max_degree || degree[v] >= max_degree) continue;
    if (u > v) std::swap(u, v);
    if (!present.insert(u * n + v).second) continue;
    ++degree[u];
    ++degree[v];
    edges.emplace_back(u, v);
  }
  return ExplicitGraph::from_edges(n, edges);
}

// Graph file: line 1 `N`, then one `u v` line per undirected edge.

inline ExplicitGraph read_graph(std::istream& in) {
  std::size_t n = 0;
  if (!(in >> n)) throw std::invalid_argument("graph file: missing vertex count");
  std::vector<std::pair<Vertex, Vertex>> edges;
  long long u = 0, v = 0;
  while (in >> u >> v) {
    if (u < 0 || v < 0) throw std::invalid_argument("graph file: negative vertex id");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (!in.eof()) throw std::invalid_argument("graph file: malformed edge line");
  return ExplicitGraph::from_edges(n, edges);
}

inline void write_graph(std::ostream& out, const ExplicitGraph& g) {
  out << g.vertex_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

/// Sequential greedy MIS in the given order.
template <WorkGraph G>
std::vector<Vertex> greedy_mis_reference(const G& g, std::span<const Vertex> order) {
  std::unordered_set<Vertex> chosen, blocked;
  std::vector<Vertex> out;
  for (Vertex v : order) {
    if (blocked.contains(v)) continue;
    chosen.insert(v);
    out.push_back(v);
    blocked.insert(v);
    for (Vertex w : g.neighbors(v)) blocked.insert(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Desire-level dynamics

/// Desire level p = 2^-level, level >= 1.
using DesireLevel = std::uint16_t;

/// Exact sum of dyadic desire levels at a given round. Levels at round t are
/// at most t + 1, so terms are integers at scale 2^(t+1). The sum saturates
/// at 3 * 2^scale, which keeps "sum minus one own term >= 2" exact.
class DesireSum {
 public:
  using Value = unsigned __int128;
  static constexpr unsigned kMaxRound = 120;

  explicit DesireSum(unsigned round) : scale_(round + 1) {
    if (round > kMaxRound) throw std::out_of_range("desire arithmetic supports tau <= 120");
  }

  Value term(DesireLevel level) const { return Value{1} << (scale_ - level); }
  Value cap() const { return Value{3} << scale_; }

  void add(DesireLevel level) { sum_ = std::min(cap(), sum_ + term(level)); }
  Value value() const { return sum_; }
  void set(Value v) { sum_ = v; }

  /// Neighborhood desire sum >= 2.
  bool pressure(Value v) const { return v >= (Value{2} << scale_); }
  bool pressure() const { return pressure(sum_); }

 private:
  unsigned scale_;
  Value sum_ = 0;
};

/// Halve under pressure, otherwise double capped at 1/2.
constexpr DesireLevel next_desire_level(DesireLevel level, bool pressure) {
  return pressure ? static_cast<DesireLevel>(level + 1)
                  : static_cast<DesireLevel>(level > 1 ? level - 1 : 1);
}

enum class Fate : std::uint8_t { undecided, in, out };

struct Outcome {
  Fate fate = Fate::undecided;
  unsigned round = 0;  ///< 1-based round in which the fate was fixed; 0 if undecided

  bool decided() const { return fate != Fate::undecided; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct MisConfig {
  unsigned tau = 16;
  std::size_t component_cap = std::numeric_limits<std::size_t>::max();
};

/// tau = ceil(4 C log2(degree + 2)).
inline unsigned default_tau(std::size_t degree_bound, double c = 2.0) {
  return static_cast<unsigned>(std::ceil(4.0 * c * std::log2(double(degree_bound) + 2.0)));
}

/// cap = ceil(c log2(N / delta) * degree^4), saturating.
inline std::size_t default_component_cap(std::size_t vertex_count, std::size_t degree_bound,
                                         double delta, double c = 1.0) {
  const double d = std::max<double>(2.0, double(degree_bound));
  const double cap =
      c * std::log2(std::max(2.0, double(vertex_count) / std::max(delta, 1e-300))) * d * d * d * d;
  if (!(cap < 1.8e19)) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::ceil(cap));
}

struct MisStats {
  std::uint64_t neighbor_reads = 0;  ///< distinct all-neighbor probes
  std::uint64_t tape_bits = 0;
  std::uint64_t simulated_vertices = 0;
  std::size_t max_component = 0;
};

/// Membership LCA for one fixed maximal independent set of `graph`,
/// determined by (graph, tape, config). Queries are memoized; answers do not
/// depend on query order. Not safe for concurrent use.
template <WorkGraph G>
class MisLca {
 public:
  MisLca(const G& graph, RandomTape tape, MisConfig config)
      : graph_(&graph), tape_(std::move(tape)), config_(config) {
    if (config_.tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (config_.tau > DesireSum::kMaxRound) throw std::out_of_range("tau too large");
  }

  const MisConfig& config() const { return config_; }

  /// Replays rounds 1..tau around v.
  Outcome simulate(Vertex v) {
    ensure(v, config_.tau);
    const Track& t = track(v);
    return t.rounds.back().alive ? Outcome{} : Outcome{t.fate, t.decided_round};
  }

  /// Connected component of tau-undecided vertices containing v (sorted).
  std::vector<Vertex> undecided_component(Vertex v) {
    if (simulate(v).decided())
      throw std::logic_error("undecided_component called on a decided vertex");
    std::vector<Vertex> comp{v};
    std::unordered_set<Vertex> seen{v};
    for (std::size_t head = 0; head < comp.size(); ++head) {
      const auto nbrs = neighbors(comp[head]);
      for (Vertex w : nbrs) {
        if (seen.contains(w) || simulate(w).decided()) continue;
        seen.insert(w);
        comp.push_back(w);
        if (comp.size() > config_.component_cap)
          throw ComponentTooLarge(comp.size(), config_.component_cap);
      }
    }
    std::sort(comp.begin(), comp.end());
    stats_.max_component = std::max(stats_.max_component, comp.size());
    return comp;
  }

  bool member(Vertex v) {
    if (auto it = greedy_.find(v); it != greedy_.end()) return it->second;
    const Outcome o = simulate(v);
    if (o.decided()) return o.fate == Fate::in;
    const auto comp = undecided_component(v);
    std::unordered_set<Vertex> joined;
    for (Vertex u : comp) {
      bool free = true;
      for (Vertex w : neighbors(u))
        if (joined.contains(w) || simulate(w).fate == Fate::in) {
          free = false;
          break;
        }
      if (free) joined.insert(u);
    }
    for (Vertex u : comp) greedy_[u] = joined.contains(u);
    return greedy_.at(v);
  }

  MisStats stats() const {
    MisStats s = stats_;
    s.tape_bits = tape_.bits_read();
    s.simulated_vertices = tracks_.size();
    return s;
  }

 private:
  struct RoundState {
    DesireLevel level = 1;
    bool alive = true;
    std::int8_t marked = -1;  // memo: -1 unknown
    std::int8_t joins = -1;
  };

  struct Track {
    std::vector<RoundState> rounds{RoundState{}};
    std::optional<std::vector<Vertex>> nbrs;
    Fate fate = Fate::undecided;
    unsigned decided_round = 0;
  };

  Track& track(Vertex v) { return tracks_[v]; }

  const std::vector<Vertex>& neighbors(Vertex v) {
    Track& t = track(v);
    if (!t.nbrs) {
      ++stats_.neighbor_reads;
      const auto& range = graph_->neighbors(v);
      t.nbrs.emplace(std::ranges::begin(range), std::ranges::end(range));
    }
    return *t.nbrs;
  }

  /// State at the start of round t (0-based). Dead vertices stay frozen.
  RoundState& state(Vertex v, unsigned t) {
    Track& tr = track(v);
    return t < tr.rounds.size() ? tr.rounds[t] : tr.rounds.back();
  }

  void ensure(Vertex v, unsigned t) {
    Track& tr = track(v);
    while (tr.rounds.size() <= t && tr.rounds.back().alive) advance(v, tr);
  }

  bool marked(Vertex v, unsigned t) {
    RoundState& s = state(v, t);
    if (!s.alive) return false;
    if (s.marked < 0) s.marked = tape_.all_zero(t, v, s.level) ? 1 : 0;
    return s.marked == 1;
  }

  bool joins(Vertex v, unsigned t) {
    if (!state(v, t).alive) return false;
    if (state(v, t).joins >= 0) return state(v, t).joins == 1;
    bool result = marked(v, t);
    if (result) {
      const auto& nbrs = neighbors(v);
      for (Vertex w : nbrs) ensure(w, t);
      for (Vertex w : nbrs)
        if (state(w, t).alive && marked(w, t)) {
          result = false;
          break;
        }
    }
    state(v, t).joins = result ? 1 : 0;
    return result;
  }

  void advance(Vertex v, Track& tr) {
    const auto t = static_cast<unsigned>(tr.rounds.size() - 1);
    const auto& nbrs = neighbors(v);
    for (Vertex w : nbrs) ensure(w, t);

    const bool v_joins = joins(v, t);
    bool removed = false;
    if (!v_joins)
      for (Vertex w : nbrs)
        if (joins(w, t)) {
          removed = true;
          break;
        }

    RoundState next;
    if (v_joins || removed) {
      next.alive = false;
      next.level = tr.rounds[t].level;
      tr.fate = v_joins ? Fate::in : Fate::out;
      tr.decided_round = t + 1;
    } else {
      DesireSum sum(t);
      for (Vertex w : nbrs)
        if (state(w, t).alive) sum.add(state(w, t).level);
      next.level = next_desire_level(tr.rounds[t].level, sum.pressure());
    }
    tr.rounds.push_back(next);
  }

  const G* graph_;
  RandomTape tape_;
  MisConfig config_;
  std::unordered_map<Vertex, Track> tracks_;
  std::unordered_map<Vertex, bool> greedy_;
  MisStats stats_;
};

/// Independence and maximality of a vertex set over an explicit graph.
inline bool is_maximal_independent_set(const ExplicitGraph& g, const std::vector<bool>& in_set) {
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    bool has_in_neighbor = false;
    for (Vertex v : g.neighbors(u)) {
      if (in_set[u] && in_set[v]) return false;
      has_in_neighbor = has_in_neighbor || in_set[v];
    }
    if (!in_set[u] && !has_in_neighbor) return false;
  }
  return true;
}

}  // namespace poset_lca
