#pragma once

// Binary labelings over posets: probe-counted oracles, violation structure,
// function distances and the exact distance to monotonicity.

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "poset.hpp"

namespace poset_lca {

/// Stored labeling indexed by element ID (size = id_bound of the poset).
using Labels = std::vector<std::uint8_t>;

template <class F>
concept LabelFunction = std::invocable<F&, Element> &&
                        std::convertible_to<std::invoke_result_t<F&, Element>, bool>;

enum class ProbeCounting {
  distinct,    ///< repeated evaluations at a memoized element cost 0
  every_call,  ///< every evaluation counts
};

/// Point-queryable labeling with a probe counter. Evaluation is thread safe.
class LabelOracle {
 public:
  using Fn = std::function<bool(Element)>;

  LabelOracle(Fn fn, std::string descriptor, ProbeCounting counting = ProbeCounting::distinct)
      : state_(std::make_unique<State>()) {
    state_->fn = std::move(fn);
    state_->descriptor = std::move(descriptor);
    state_->counting = counting;
  }

  static LabelOracle stored(Labels labels, ProbeCounting counting = ProbeCounting::distinct) {
    auto shared = std::make_shared<const Labels>(std::move(labels));
    return LabelOracle([shared](Element x) { return (*shared)[x] != 0; }, "stored-array",
                       counting);
  }

  bool operator()(Element x) const {
    State& s = *state_;
    if (s.counting == ProbeCounting::every_call) {
      s.probes.fetch_add(1, std::memory_order_relaxed);
      return s.fn(x);
    }
    {
      std::lock_guard lock(s.mu);
      if (auto it = s.memo.find(x); it != s.memo.end()) return it->second;
    }
    const bool value = s.fn(x);
    std::lock_guard lock(s.mu);
    if (s.memo.emplace(x, value).second) s.probes.fetch_add(1, std::memory_order_relaxed);
    return value;
  }

  std::uint64_t probes() const { return state_->probes.load(); }
  void reset_probes() {
    std::lock_guard lock(state_->mu);
    state_->memo.clear();
    state_->probes = 0;
  }
  const std::string& descriptor() const { return state_->descriptor; }
  ProbeCounting counting() const { return state_->counting; }

 private:
  struct State {
    Fn fn;
    std::string descriptor;
    ProbeCounting counting = ProbeCounting::distinct;
    std::mutex mu;
    std::unordered_map<Element, bool> memo;
    std::atomic<std::uint64_t> probes{0};
  };
  std::unique_ptr<State> state_;
};

/// Comparable pair v > w with f(v) = 0 and f(w) = 1.
struct ViolationPair {
  Element upper;
  Element lower;

  friend bool operator==(const ViolationPair&, const ViolationPair&) = default;
  friend auto operator<=>(const ViolationPair&, const ViolationPair&) = default;
};

template <PosetLike P, LabelFunction F>
std::vector<ViolationPair> violation_pairs(const P& poset, F&& f) {
  std::vector<ViolationPair> out;
  for (Element w : poset.elements()) {
    if (!f(w)) continue;
    for (auto [v, d] : longest_paths(poset, w, Direction::up))
      if (v != w && !f(v)) out.push_back({v, w});
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Neighbors of x in the k-violation graph B_k of f: comparable elements at
/// longest-path distance >= k carrying the opposite, violating label.
template <PosetLike P, LabelFunction F>
std::vector<Element> k_violation_neighbors(Element x, const P& poset, F&& f, unsigned k) {
  const bool fx = f(x);
  std::vector<Element> out;
  for (auto [y, d] : longest_paths(poset, x, fx ? Direction::up : Direction::down))
    if (y != x && d >= k && bool(f(y)) != fx) out.push_back(y);
  return out;
}

template <PosetLike P, LabelFunction F>
bool is_monotone(const P& poset, F&& f) {
  for (Element x : poset.elements())
    if (f(x))
      for (Element y : poset.up(x))
        if (!f(y)) return false;
  return true;
}

/// Fraction of elements where f and g disagree.
template <PosetLike P, LabelFunction F, LabelFunction G>
double labeling_distance(const P& poset, F&& f, G&& g) {
  std::size_t differ = 0, total = 0;
  for (Element x : poset.elements()) {
    ++total;
    if (bool(f(x)) != bool(g(x))) ++differ;
  }
  return total == 0 ? 0.0 : double(differ) / double(total);
}

namespace detail {

/// Hopcroft-Karp on a bipartite graph with left vertices 0..L-1.
inline std::size_t max_bipartite_matching(const std::vector<std::vector<std::uint32_t>>& adj,
                                          std::size_t right_count) {
  constexpr std::uint32_t kFree = std::numeric_limits<std::uint32_t>::max();
  constexpr unsigned kInf = std::numeric_limits<unsigned>::max();
  const std::size_t left_count = adj.size();
  std::vector<std::uint32_t> match_left(left_count, kFree), match_right(right_count, kFree);
  std::vector<unsigned> layer(left_count);
  std::vector<std::uint32_t> queue;
  std::size_t matched = 0;

  auto bfs = [&] {
    queue.clear();
    bool reachable_free = false;
    for (std::uint32_t u = 0; u < left_count; ++u) {
      layer[u] = match_left[u] == kFree ? 0 : kInf;
      if (match_left[u] == kFree) queue.push_back(u);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (auto v : adj[u]) {
        const auto w = match_right[v];
        if (w == kFree) {
          reachable_free = true;
        } else if (layer[w] == kInf) {
          layer[w] = layer[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return reachable_free;
  };

  std::vector<std::size_t> cursor(left_count);
  // Iterative augmenting-path DFS along BFS layers.
  auto dfs = [&](std::uint32_t root) {
    std::vector<std::uint32_t> path{root};
    while (!path.empty()) {
      const auto u = path.back();
      if (cursor[u] == adj[u].size()) {
        layer[u] = kInf;
        path.pop_back();
        continue;
      }
      const auto v = adj[u][cursor[u]++];
      const auto w = match_right[v];
      if (w == kFree) {
        // augment along path; each path vertex's last tried edge is the one taken
        for (std::size_t i = path.size(); i-- > 0;) {
          const auto a = path[i];
          const auto b = adj[a][cursor[a] - 1];
          match_right[b] = a;
          match_left[a] = b;
        }
        return true;
      }
      if (layer[w] == layer[u] + 1) path.push_back(w);
    }
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (std::uint32_t u = 0; u < left_count; ++u)
      if (match_left[u] == kFree && dfs(u)) ++matched;
  }
  return matched;
}

}  // namespace detail

inline constexpr std::size_t kMaxExactDistanceSize = std::size_t{1} << 16;

/// Minimum number of label changes that make f monotone: the minimum vertex
/// cover of the (bipartite) violation graph, via König's theorem.
template <PosetLike P, LabelFunction F>
std::size_t min_monotone_repairs(const P& poset, F&& f,
                                 std::size_t max_size = kMaxExactDistanceSize) {
  if (poset.size() > max_size)
    throw SizeError("exact distance to monotonicity limited to " + std::to_string(max_size) +
                    " elements");
  std::unordered_map<Element, std::uint32_t> ones, zeros;
  for (Element x : poset.elements()) {
    auto& side = f(x) ? ones : zeros;
    side.emplace(x, static_cast<std::uint32_t>(side.size()));
  }
  std::vector<std::vector<std::uint32_t>> adj(ones.size());
  for (auto [w, li] : ones)
    for (auto [v, d] : longest_paths(poset, w, Direction::up))
      if (auto it = zeros.find(v); it != zeros.end()) adj[li].push_back(it->second);
  return detail::max_bipartite_matching(adj, zeros.size());
}

template <PosetLike P, LabelFunction F>
double distance_to_monotone_exact(const P& poset, F&& f,
                                  std::size_t max_size = kMaxExactDistanceSize) {
  if (poset.size() == 0) return 0.0;
  return double(min_monotone_repairs(poset, f, max_size)) / double(poset.size());
}

template <PosetLike P, LabelFunction F>
Labels materialize(const P& poset, F&& f) {
  Labels out(static_cast<std::size_t>(poset.id_bound()), 0);
  for (Element x : poset.elements()) out[x] = f(x) ? 1 : 0;
  return out;
}

/// Callable view over a stored labeling.
struct LabelsView {
  const Labels* labels;
  bool operator()(Element x) const { return (*labels)[x] != 0; }
};

// Labeling file: one `element_id bit` line per element.

inline Labels read_labels(std::istream& in, std::size_t id_bound) {
  Labels out(id_bound, 0);
  long long id = 0;
  int bit = 0;
  while (in >> id >> bit) {
    if (id < 0 || static_cast<std::size_t>(id) >= id_bound)
      throw std::invalid_argument("labels file: element id out of range");
    if (bit != 0 && bit != 1) throw std::invalid_argument("labels file: label must be 0 or 1");
    out[id] = static_cast<std::uint8_t>(bit);
  }
  if (!in.eof()) throw std::invalid_argument("labels file: malformed line");
  return out;
}

template <PosetLike P>
void write_labels(std::ostream& out, const P& poset, const Labels& labels) {
  for (Element x : poset.elements()) out << x << ' ' << int(labels[x]) << '\n';
}

}  // namespace poset_lca
