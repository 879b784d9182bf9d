#pragma once

// Finite posets given by their Hasse diagrams, the Boolean hypercube family,
// and longest-path distances.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <ranges>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace poset_lca {

using Element = std::uint32_t;
using HasseEdge = std::pair<Element, Element>;

enum class Direction { up, down };

/// Read-only structural access shared by materialized and implicit posets.
/// `up(x)` / `down(x)` are the immediate successors / predecessors (one
/// poset probe each). Element IDs are < id_bound() but need not be dense.
template <class P>
concept PosetLike = requires(const P& p, Element x) {
  { p.size() } -> std::convertible_to<std::size_t>;
  { p.id_bound() } -> std::convertible_to<std::uint64_t>;
  { p.height() } -> std::convertible_to<std::size_t>;
  { p.degree_bound() } -> std::convertible_to<std::size_t>;
  { p.contains(x) } -> std::convertible_to<bool>;
  { p.rank(x) } -> std::convertible_to<unsigned>;
  { p.elements() } -> std::ranges::range;
  { p.up(x) } -> std::ranges::range;
  { p.down(x) } -> std::ranges::range;
};

namespace detail {

inline std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Weight band of the truncated hypercube: |w - n/2| <= sqrt((n/2) ln(2/eps)).
struct WeightBand {
  unsigned lo = 0;
  unsigned hi = 0;
  double threshold = 0.0;

  bool contains(unsigned w) const { return w >= lo && w <= hi; }
};

inline WeightBand truncation_band(unsigned n, double eps) {
  if (!(eps > 0.0 && eps < 2.0)) throw std::invalid_argument("truncation eps must lie in (0, 2)");
  const double half = n / 2.0;
  const double t = std::sqrt(half * std::log(2.0 / eps));
  WeightBand band{n + 1, 0, t};
  for (unsigned w = 0; w <= n; ++w) {
    if (std::abs(double(w) - half) <= t) {
      band.lo = std::min(band.lo, w);
      band.hi = std::max(band.hi, w);
    }
  }
  if (band.lo > band.hi) throw std::invalid_argument("truncation band is empty");
  return band;
}

/// Largest number of comparable elements above or below any element of the
/// band [lo, hi] in {0,1}^n.
inline std::size_t band_degree_bound(unsigned n, unsigned lo, unsigned hi) {
  std::uint64_t best = 0;
  for (unsigned w = lo; w <= hi; ++w) {
    std::uint64_t above = 0, below = 0;
    for (unsigned v = w + 1; v <= hi; ++v) above += detail::binomial(n - w, v - w);
    for (unsigned v = lo; v < w; ++v) below += detail::binomial(w, w - v);
    best = std::max({best, above, below});
  }
  return static_cast<std::size_t>(best);
}

/// Materialized poset in CSR form. Immutable after construction.
class Poset {
 public:
  Poset() = default;

  std::size_t size() const { return up_offsets_.empty() ? 0 : up_offsets_.size() - 1; }
  std::uint64_t id_bound() const { return size(); }
  bool contains(Element x) const { return x < size(); }

  std::span<const Element> up(Element x) const {
    return {up_targets_.data() + up_offsets_[x], up_targets_.data() + up_offsets_[x + 1]};
  }
  std::span<const Element> down(Element x) const {
    return {down_targets_.data() + down_offsets_[x], down_targets_.data() + down_offsets_[x + 1]};
  }

  auto elements() const { return std::views::iota(Element{0}, static_cast<Element>(size())); }

  /// Edge count of the longest chain.
  std::size_t height() const { return height_; }
  /// Max over elements of max(#all successors, #all predecessors).
  std::size_t degree_bound() const { return degree_bound_; }
  std::size_t edge_count() const { return up_targets_.size(); }

  /// Hamming weight for hypercube families; otherwise the length of the
  /// longest chain ending at x.
  unsigned rank(Element x) const { return rank_[x]; }

  /// Cube coordinates when this poset is (a band of) the hypercube.
  std::optional<unsigned> dimension() const { return dimension_; }
  std::uint64_t point(Element x) const { return points_.empty() ? x : points_[x]; }

  std::vector<HasseEdge> edges() const {
    std::vector<HasseEdge> out;
    out.reserve(edge_count());
    for (Element u = 0; u < size(); ++u)
      for (Element v : up(u)) out.emplace_back(u, v);
    return out;
  }

 private:
  friend Poset build_poset(std::size_t, std::span<const HasseEdge>);
  friend Poset hypercube(unsigned, unsigned);
  friend Poset truncated_hypercube(unsigned, double, unsigned);

  static Poset from_sorted_adjacency(const std::vector<std::vector<Element>>& up_lists);
  void compute_ranks_and_height();

  std::vector<std::size_t> up_offsets_, down_offsets_;
  std::vector<Element> up_targets_, down_targets_;
  std::vector<unsigned> rank_;
  std::vector<std::uint64_t> points_;
  std::optional<unsigned> dimension_;
  std::size_t height_ = 0;
  std::size_t degree_bound_ = 0;
};

inline Poset Poset::from_sorted_adjacency(const std::vector<std::vector<Element>>& up_lists) {
  Poset p;
  const std::size_t n = up_lists.size();
  std::vector<std::vector<Element>> down_lists(n);
  p.up_offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    p.up_offsets_[u + 1] = p.up_offsets_[u] + up_lists[u].size();
    for (Element v : up_lists[u]) down_lists[v].push_back(static_cast<Element>(u));
  }
  p.up_targets_.reserve(p.up_offsets_[n]);
  for (const auto& l : up_lists) p.up_targets_.insert(p.up_targets_.end(), l.begin(), l.end());
  p.down_offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    p.down_offsets_[v + 1] = p.down_offsets_[v] + down_lists[v].size();
    // built in increasing u, so already sorted
    p.down_targets_.insert(p.down_targets_.end(), down_lists[v].begin(), down_lists[v].end());
  }
  return p;
}

/// Topological order of a DAG given as adjacency lists; nullopt on a cycle.
inline std::optional<std::vector<Element>> topological_order(
    const std::vector<std::vector<Element>>& up_lists) {
  const std::size_t n = up_lists.size();
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& l : up_lists)
    for (Element v : l) ++indeg[v];
  std::vector<Element> order;
  order.reserve(n);
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) order.push_back(static_cast<Element>(v));
  for (std::size_t head = 0; head < order.size(); ++head)
    for (Element v : up_lists[order[head]])
      if (--indeg[v] == 0) order.push_back(v);
  if (order.size() != n) return std::nullopt;
  return order;
}

inline void Poset::compute_ranks_and_height() {
  rank_.assign(size(), 0);
  std::vector<std::vector<Element>> lists(size());
  for (Element u = 0; u < size(); ++u) lists[u].assign(up(u).begin(), up(u).end());
  const auto order = topological_order(lists);
  height_ = 0;
  for (Element u : *order) {
    for (Element v : up(u)) rank_[v] = std::max(rank_[v], rank_[u] + 1);
    height_ = std::max<std::size_t>(height_, rank_[u]);
  }
}

/// Validated constructor from Hasse edges over elements 0..n-1.
/// Throws CycleError, RedundantEdgeError (transitively implied or duplicate
/// edge) or std::invalid_argument (bad IDs, self loops).
inline Poset build_poset(std::size_t n, std::span<const HasseEdge> hasse_edges) {
  std::vector<std::vector<Element>> up_lists(n);
  for (auto [u, v] : hasse_edges) {
    if (u >= n || v >= n) throw std::invalid_argument("edge references an element outside 0..N-1");
    if (u == v) throw CycleError("self loop on element " + std::to_string(u));
    up_lists[u].push_back(v);
  }
  for (std::size_t u = 0; u < n; ++u) {
    auto& l = up_lists[u];
    std::sort(l.begin(), l.end());
    if (std::adjacent_find(l.begin(), l.end()) != l.end())
      throw RedundantEdgeError("duplicate Hasse edge out of element " + std::to_string(u));
  }
  const auto order = topological_order(up_lists);
  if (!order) throw CycleError("Hasse edge set contains a directed cycle");

  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[(*order)[i]] = i;

  // Single-source longest paths from every element: an edge (u,v) is
  // redundant iff the longest u->v path has length >= 2.
  std::vector<unsigned> longest(n, 0);
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<std::size_t> pred_count(n, 0);
  std::size_t degree = 0;
  std::vector<Element> reach;
  for (std::size_t src = 0; src < n; ++src) {
    const auto tag = static_cast<std::uint32_t>(src + 1);
    reach.clear();
    reach.push_back(static_cast<Element>(src));
    stamp[src] = tag;
    longest[src] = 0;
    for (std::size_t head = 0; head < reach.size(); ++head)
      for (Element v : up_lists[reach[head]])
        if (stamp[v] != tag) {
          stamp[v] = tag;
          longest[v] = 0;
          reach.push_back(v);
        }
    std::sort(reach.begin(), reach.end(),
              [&](Element a, Element b) { return position[a] < position[b]; });
    for (Element u : reach)
      for (Element v : up_lists[u]) longest[v] = std::max(longest[v], longest[u] + 1);
    for (Element v : up_lists[src])
      if (longest[v] >= 2)
        throw RedundantEdgeError("Hasse edge (" + std::to_string(src) + "," + std::to_string(v) +
                                 ") is implied by a longer path");
    degree = std::max(degree, reach.size() - 1);
    for (std::size_t i = 1; i < reach.size(); ++i) ++pred_count[reach[i]];
  }
  for (auto c : pred_count) degree = std::max(degree, c);

  Poset p = Poset::from_sorted_adjacency(up_lists);
  p.degree_bound_ = degree;
  p.compute_ranks_and_height();
  return p;
}

inline Poset build_poset(std::size_t n, const std::vector<HasseEdge>& hasse_edges) {
  return build_poset(n, std::span<const HasseEdge>(hasse_edges));
}

/// Removes every edge implied by a longer path (and duplicates). Throws
/// CycleError on cyclic input.
inline std::vector<HasseEdge> transitive_reduce(std::size_t n, std::span<const HasseEdge> edges) {
  std::vector<std::vector<Element>> up_lists(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("edge references an element outside 0..N-1");
    if (u == v) throw CycleError("self loop on element " + std::to_string(u));
    up_lists[u].push_back(v);
  }
  for (auto& l : up_lists) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  const auto order = topological_order(up_lists);
  if (!order) throw CycleError("edge set contains a directed cycle");
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[(*order)[i]] = i;

  std::vector<HasseEdge> kept;
  std::vector<unsigned> longest(n, 0);
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<Element> reach;
  for (std::size_t src = 0; src < n; ++src) {
    const auto tag = static_cast<std::uint32_t>(src + 1);
    reach.assign(1, static_cast<Element>(src));
    stamp[src] = tag;
    longest[src] = 0;
    for (std::size_t head = 0; head < reach.size(); ++head)
      for (Element v : up_lists[reach[head]])
        if (stamp[v] != tag) {
          stamp[v] = tag;
          longest[v] = 0;
          reach.push_back(v);
        }
    std::sort(reach.begin(), reach.end(),
              [&](Element a, Element b) { return position[a] < position[b]; });
    for (Element u : reach)
      for (Element v : up_lists[u]) longest[v] = std::max(longest[v], longest[u] + 1);
    for (Element v : up_lists[src])
      if (longest[v] == 1) kept.emplace_back(static_cast<Element>(src), v);
  }
  return kept;
}

inline std::vector<HasseEdge> transitive_reduce(std::size_t n, const std::vector<HasseEdge>& edges) {
  return transitive_reduce(n, std::span<const HasseEdge>(edges));
}

/// Largest cube dimension materialized by default.
inline constexpr unsigned kMaxMaterializedDimension = 20;
/// Largest dimension served by ImplicitCube.
inline constexpr unsigned kMaxImplicitDimension = 24;

inline Poset hypercube(unsigned n, unsigned max_dimension = kMaxMaterializedDimension) {
  if (n < 1) throw std::invalid_argument("hypercube dimension must be >= 1");
  if (n > max_dimension)
    throw SizeError("hypercube(" + std::to_string(n) + ") exceeds the materialization budget");
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::vector<Element>> up_lists(count);
  for (std::size_t x = 0; x < count; ++x)
    for (unsigned b = 0; b < n; ++b)
      if (!(x >> b & 1u)) up_lists[x].push_back(static_cast<Element>(x | (std::size_t{1} << b)));
  Poset p = Poset::from_sorted_adjacency(up_lists);
  p.dimension_ = n;
  p.height_ = n;
  p.degree_bound_ = count - 1;
  p.rank_.resize(count);
  for (std::size_t x = 0; x < count; ++x) p.rank_[x] = static_cast<unsigned>(std::popcount(x));
  return p;
}

/// Induced subposet of hypercube(n) on the middle weight band H^n_eps. IDs
/// are dense and follow increasing cube points.
inline Poset truncated_hypercube(unsigned n, double eps,
                                 unsigned max_dimension = kMaxMaterializedDimension) {
  if (n < 1) throw std::invalid_argument("hypercube dimension must be >= 1");
  if (n > max_dimension)
    throw SizeError("truncated_hypercube(" + std::to_string(n) +
                    ") exceeds the materialization budget");
  const WeightBand band = truncation_band(n, eps);
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::int64_t> index(count, -1);
  std::vector<std::uint64_t> points;
  for (std::size_t x = 0; x < count; ++x)
    if (band.contains(static_cast<unsigned>(std::popcount(x)))) {
      index[x] = static_cast<std::int64_t>(points.size());
      points.push_back(x);
    }
  std::vector<std::vector<Element>> up_lists(points.size());
  for (std::size_t id = 0; id < points.size(); ++id)
    for (unsigned b = 0; b < n; ++b) {
      const std::uint64_t y = points[id] | (std::uint64_t{1} << b);
      if (y != points[id] && index[y] >= 0) up_lists[id].push_back(static_cast<Element>(index[y]));
    }
  for (auto& l : up_lists) std::sort(l.begin(), l.end());
  Poset p = Poset::from_sorted_adjacency(up_lists);
  p.dimension_ = n;
  p.points_ = std::move(points);
  p.height_ = band.hi - band.lo;
  p.degree_bound_ = band_degree_bound(n, band.lo, band.hi);
  p.rank_.resize(p.size());
  for (std::size_t id = 0; id < p.size(); ++id)
    p.rank_[id] = static_cast<unsigned>(std::popcount(p.points_[id]));
  return p;
}

/// Hypercube band served without materialization: element IDs are the cube
/// points themselves.
class ImplicitCube {
 public:
  /// Full cube {0,1}^n.
  explicit ImplicitCube(unsigned n) : n_(n), band_{0, n, double(n)} { validate(); }
  /// Truncated cube H^n_eps.
  ImplicitCube(unsigned n, double eps) : n_(n), band_(truncation_band(n, eps)) { validate(); }

  unsigned dimension() const { return n_; }
  const WeightBand& band() const { return band_; }

  std::size_t size() const {
    std::uint64_t s = 0;
    for (unsigned w = band_.lo; w <= band_.hi; ++w) s += detail::binomial(n_, w);
    return static_cast<std::size_t>(s);
  }
  std::uint64_t id_bound() const { return std::uint64_t{1} << n_; }
  std::size_t height() const { return band_.hi - band_.lo; }
  std::size_t degree_bound() const { return band_degree_bound(n_, band_.lo, band_.hi); }
  bool contains(Element x) const {
    return x < id_bound() && band_.contains(static_cast<unsigned>(std::popcount(x)));
  }
  unsigned rank(Element x) const { return static_cast<unsigned>(std::popcount(x)); }
  std::uint64_t point(Element x) const { return x; }

  auto elements() const {
    return std::views::iota(Element{0}, static_cast<Element>(id_bound())) |
           std::views::filter([this](Element x) { return contains(x); });
  }

  std::vector<Element> up(Element x) const {
    std::vector<Element> out;
    if (rank(x) >= band_.hi) return out;
    for (unsigned b = 0; b < n_; ++b)
      if (!(x >> b & 1u)) out.push_back(x | (Element{1} << b));
    return out;
  }
  std::vector<Element> down(Element x) const {
    std::vector<Element> out;
    if (rank(x) <= band_.lo) return out;
    for (unsigned b = n_; b-- > 0;)
      if (x >> b & 1u) out.push_back(x & ~(Element{1} << b));
    return out;
  }

 private:
  void validate() const {
    if (n_ < 1) throw std::invalid_argument("hypercube dimension must be >= 1");
    if (n_ > kMaxImplicitDimension)
      throw SizeError("implicit cube supports n <= " + std::to_string(kMaxImplicitDimension));
  }

  unsigned n_;
  WeightBand band_;
};

/// Longest-path distances from x to every element of its up-set (or
/// down-set), x itself included at distance 0. `on_read(u)` fires once per
/// element whose Hasse list is read.
template <PosetLike P, class OnRead>
std::vector<std::pair<Element, unsigned>> longest_paths(const P& poset, Element x, Direction dir,
                                                        OnRead&& on_read) {
  auto next = [&](Element u) { return dir == Direction::up ? poset.up(u) : poset.down(u); };
  // Iterative DFS; reverse post-order is a topological order of the cone.
  std::unordered_map<Element, unsigned> dist;
  std::vector<Element> post;
  std::vector<std::pair<Element, std::size_t>> stack;
  std::unordered_set<Element> seen{x};
  stack.emplace_back(x, 0);
  on_read(x);
  while (!stack.empty()) {
    auto& [u, i] = stack.back();
    const auto nbrs = next(u);
    auto it = std::ranges::begin(nbrs);
    std::advance(it, static_cast<std::ptrdiff_t>(i));
    if (it == std::ranges::end(nbrs)) {
      post.push_back(u);
      stack.pop_back();
      continue;
    }
    ++i;
    const Element v = *it;
    if (seen.insert(v).second) {
      on_read(v);
      stack.emplace_back(v, 0);
    }
  }
  dist.reserve(post.size());
  dist[x] = 0;
  for (auto it = post.rbegin(); it != post.rend(); ++it) {
    const unsigned d = dist[*it];
    for (Element v : next(*it)) {
      auto [slot, fresh] = dist.try_emplace(v, d + 1);
      if (!fresh) slot->second = std::max(slot->second, d + 1);
    }
  }
  std::vector<std::pair<Element, unsigned>> out(dist.begin(), dist.end());
  std::sort(out.begin(), out.end());
  return out;
}

template <PosetLike P>
std::vector<std::pair<Element, unsigned>> longest_paths(const P& poset, Element x, Direction dir) {
  return longest_paths(poset, x, dir, [](Element) {});
}

/// Longest directed path length between comparable x and y (either
/// direction); nullopt when incomparable.
template <PosetLike P>
std::optional<unsigned> longest_path_dist(const P& poset, Element x, Element y) {
  if (x == y) return 0u;
  for (Direction dir : {Direction::up, Direction::down}) {
    const auto cone = longest_paths(poset, x, dir);
    auto it = std::lower_bound(cone.begin(), cone.end(), std::pair<Element, unsigned>{y, 0});
    if (it != cone.end() && it->first == y) return it->second;
  }
  return std::nullopt;
}

template <PosetLike P>
std::vector<Element> all_successors(const P& poset, Element x) {
  std::vector<Element> out;
  for (auto [y, d] : longest_paths(poset, x, Direction::up))
    if (y != x) out.push_back(y);
  return out;
}

template <PosetLike P>
std::vector<Element> all_predecessors(const P& poset, Element x) {
  std::vector<Element> out;
  for (auto [y, d] : longest_paths(poset, x, Direction::down))
    if (y != x) out.push_back(y);
  return out;
}

/// Random poset on n elements: each pair (u<v) gets an edge with probability
/// edge_prob, then the edge set is transitively reduced.
inline Poset random_dag(std::size_t n, double edge_prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  std::vector<HasseEdge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(static_cast<Element>(u), static_cast<Element>(v));
  return build_poset(n, transitive_reduce(n, edges));
}

// Poset file: line 1 `N`, then one `u v` line per Hasse edge, ascending u.

inline Poset read_poset(std::istream& in) {
  std::size_t n = 0;
  if (!(in >> n)) throw std::invalid_argument("poset file: missing element count");
  std::vector<HasseEdge> edges;
  long long u = 0, v = 0;
  while (in >> u >> v) {
    if (u < 0 || v < 0) throw std::invalid_argument("poset file: negative element id");
    edges.emplace_back(static_cast<Element>(u), static_cast<Element>(v));
  }
  if (!in.eof()) throw std::invalid_argument("poset file: malformed edge line");
  return build_poset(n, edges);
}

inline void write_poset(std::ostream& out, const Poset& poset) {
  out << poset.size() << '\n';
  for (auto [u, v] : poset.edges()) out << u << ' ' << v << '\n';
}

}  // namespace poset_lca
