#pragma once

// Sorting binary labels on a poset. Stage i matches the violation pairs at
// longest-path distance >= k_i = ceil(h / 2^(i+1)) and swaps each matched
// pair: f_{i+1}(x) = f_i(lambda_i(x)). The global version materializes every
// stage; LocalSorter answers f_final(x) by recursing through the stages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "labeling.hpp"
#include "matching.hpp"
#include "mis.hpp"
#include "poset.hpp"
#include "random_tape.hpp"

namespace poset_lca {

struct SorterConfig {
  double delta = 0.1;     // overall failure budget, split evenly across stages
  double c_tau = 2.0;
  double c_cap = 1.0;
  std::optional<unsigned> tau;
  std::optional<std::size_t> component_cap;
  bool extra_stage = false;  // one more stage; a no-op on already sorted labels
  TapeMode tape_mode = TapeMode::prf;
  unsigned kwise = 16;
};

inline unsigned ceil_log2(std::size_t h) {
  unsigned l = 0;
  while ((std::size_t{1} << l) < h) ++l;
  return l;
}

struct StagePlan {
  std::vector<unsigned> cutoffs;  // k_i per stage
  MisConfig mis;
  double stage_delta = 0;

  std::size_t stage_count() const { return cutoffs.size(); }
};

/// Stages 0..ceil(log2 h) with k_i = ceil(h / 2^(i+1)); none when h = 0.
/// The matching LCA is configured for the line graph of a graph with the
/// poset's size and degree bound.
inline StagePlan plan_stages(std::size_t size, std::size_t height, std::size_t degree_bound,
                             const SorterConfig& cfg = {}) {
  StagePlan plan;
  if (height > 0) {
    const unsigned base = ceil_log2(height) + 1;
    const unsigned count = base + (cfg.extra_stage ? 1 : 0);
    for (unsigned i = 0; i < count; ++i) {
      const std::size_t div = i + 1 < 64 ? std::size_t{1} << (i + 1) : 0;
      const std::size_t k = div == 0 ? 1 : (height + div - 1) / div;
      plan.cutoffs.push_back(static_cast<unsigned>(std::max<std::size_t>(1, k)));
    }
    plan.stage_delta = cfg.delta / double(base);
  } else {
    plan.stage_delta = cfg.delta;
  }
  plan.mis = line_graph_mis_config(size, degree_bound, std::max(plan.stage_delta, 1e-300),
                                   cfg.c_tau, cfg.c_cap);
  plan.mis.tau = std::min(plan.mis.tau, DesireSum::kMaxRound);
  if (cfg.tau) plan.mis.tau = *cfg.tau;
  if (cfg.component_cap) plan.mis.component_cap = *cfg.component_cap;
  return plan;
}

template <PosetLike P>
StagePlan plan_stages(const P& poset, const SorterConfig& cfg = {}) {
  return plan_stages(poset.size(), poset.height(), poset.degree_bound(), cfg);
}

/// Max longest-path distance over the violation pairs of f; 0 if monotone.
template <PosetLike P, LabelFunction F>
unsigned stage_max_violation_dist(const P& poset, F&& f) {
  unsigned best = 0;
  for (Element w : poset.elements()) {
    if (!f(w)) continue;
    for (auto [v, d] : longest_paths(poset, w, Direction::up))
      if (!f(v)) best = std::max(best, d);
  }
  return best;
}

/// B_k of one stage, materialized.
struct ViolationGraph {
  unsigned stage = 0;
  unsigned k = 1;
  ExplicitGraph graph;
  std::vector<std::tuple<Vertex, Vertex, unsigned>> edges;  // (min, max, dist), lexicographic
};

template <PosetLike P, LabelFunction F>
ViolationGraph build_violation_graph(const P& poset, F&& f, unsigned k, unsigned stage = 0) {
  ViolationGraph vg;
  vg.stage = stage;
  vg.k = k;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Element w : poset.elements()) {
    if (!f(w)) continue;
    for (auto [v, d] : longest_paths(poset, w, Direction::up))
      if (d >= k && !f(v)) {
        vg.edges.emplace_back(std::min<Vertex>(v, w), std::max<Vertex>(v, w), d);
        pairs.emplace_back(v, w);
      }
  }
  std::sort(vg.edges.begin(), vg.edges.end());
  vg.graph = ExplicitGraph::from_edges(static_cast<std::size_t>(poset.id_bound()), pairs);
  return vg;
}

/// A maximal matching of a stage's violation graph, as a partner vector
/// (partner[x] == x for unmatched x).
using Matcher = std::function<std::vector<Vertex>(const ViolationGraph&)>;

inline std::vector<Vertex> partners_from_matching(std::size_t n, std::span<const Edge> matching) {
  std::vector<Vertex> partner(n);
  for (std::size_t x = 0; x < n; ++x) partner[x] = x;
  for (auto [u, v] : matching) {
    partner[u] = v;
    partner[v] = u;
  }
  return partner;
}

namespace detail {

inline std::vector<Vertex> greedy_partners(const ViolationGraph& vg, std::vector<Edge> order) {
  const auto m = greedy_matching_reference(order);
  return partners_from_matching(vg.graph.vertex_count(), m);
}

}  // namespace detail

/// Sequential greedy over lexicographic edge order.
inline Matcher greedy_matcher() {
  return [](const ViolationGraph& vg) {
    std::vector<Edge> order;
    for (auto [u, v, d] : vg.edges) order.emplace_back(u, v);
    return detail::greedy_partners(vg, std::move(order));
  };
}

/// Greedy that prefers the shortest violations, leaving long ones for later
/// stages whenever it can.
inline Matcher adversarial_matcher() {
  return [](const ViolationGraph& vg) {
    auto edges = vg.edges;
    std::stable_sort(edges.begin(), edges.end(),
                     [](const auto& a, const auto& b) { return std::get<2>(a) < std::get<2>(b); });
    std::vector<Edge> order;
    for (auto [u, v, d] : edges) order.emplace_back(u, v);
    return detail::greedy_partners(vg, std::move(order));
  };
}

inline Matcher random_order_matcher(std::uint64_t seed) {
  return [seed](const ViolationGraph& vg) {
    std::vector<Edge> order;
    for (auto [u, v, d] : vg.edges) order.emplace_back(u, v);
    std::mt19937_64 rng(derive_seed(seed, vg.stage));
    std::shuffle(order.begin(), order.end(), rng);
    return detail::greedy_partners(vg, std::move(order));
  };
}

/// The matchings the local sorter uses for `master_seed`, extracted over the
/// whole violation graph. `vertex_bound` must be the poset's id_bound.
inline Matcher lca_matcher(std::uint64_t master_seed, StagePlan plan, std::uint64_t vertex_bound,
                           TapeMode mode = TapeMode::prf, unsigned kwise = 16) {
  return [=](const ViolationGraph& vg) {
    const auto master = RandomTape::make(mode, master_seed, kwise);
    MatchingLca<ExplicitGraph> lca(vg.graph, vertex_bound, master.for_stage(vg.stage), plan.mis);
    std::vector<Vertex> partner(vg.graph.vertex_count());
    try {
      for (Vertex x = 0; x < partner.size(); ++x) partner[x] = lca.partner(x);
    } catch (const ComponentTooLarge& e) {
      throw StageFailure(vg.stage, e.what());
    }
    return partner;
  };
}

template <PosetLike P>
Matcher lca_matcher(const P& poset, std::uint64_t master_seed, const SorterConfig& cfg = {}) {
  return lca_matcher(master_seed, plan_stages(poset, cfg), poset.id_bound(), cfg.tape_mode,
                     cfg.kwise);
}

struct GlobalSortResult {
  std::vector<Labels> stages;                 // f_0 .. f_S
  std::vector<std::vector<Vertex>> partners;  // lambda_0 .. lambda_{S-1}
  std::vector<unsigned> cutoffs;

  const Labels& output() const { return stages.back(); }
};

template <PosetLike P, LabelFunction F>
GlobalSortResult global_sort(const P& poset, F&& f, const Matcher& matcher,
                             const SorterConfig& cfg = {}) {
  const StagePlan plan = plan_stages(poset, cfg);
  GlobalSortResult out;
  out.cutoffs = plan.cutoffs;
  out.stages.push_back(materialize(poset, f));
  for (unsigned i = 0; i < plan.stage_count(); ++i) {
    const Labels& cur = out.stages.back();
    const auto vg = build_violation_graph(poset, LabelsView{&cur}, plan.cutoffs[i], i);
    auto partner = matcher(vg);
    Labels next(cur.size(), 0);
    for (Element x : poset.elements()) next[x] = cur[partner[x]];
    out.partners.push_back(std::move(partner));
    out.stages.push_back(std::move(next));
  }
  return out;
}

struct StageProbes {
  unsigned stage = 0;
  unsigned k = 0;
  std::uint64_t label_evals = 0;     // distinct f_i evaluations
  std::uint64_t b_neighborhoods = 0; // distinct B_i neighbor lists computed
  std::uint64_t partner_queries = 0; // distinct lambda_i queries
  std::uint64_t tape_bits = 0;
  std::uint64_t simulated_edges = 0;
  std::size_t max_component = 0;
};

struct ProbeReport {
  std::uint64_t poset_probes = 0;  // distinct elements whose Hasse lists were read
  std::uint64_t label_probes = 0;  // distinct evaluations of the input labeling
  std::uint64_t tape_bits = 0;
  std::uint64_t queries = 0;
  std::vector<StageProbes> stages;

  std::uint64_t total() const { return poset_probes + label_probes; }
};

/// LCA for f_final. Every answer agrees with global_sort run with
/// lca_matcher(master_seed): the matchings are pure functions of the seed.
/// Caches are per instance; public calls are serialized internally.
template <PosetLike P>
class LocalSorter {
 public:
  LocalSorter(const P& poset, std::function<bool(Element)> f, std::uint64_t master_seed,
              const SorterConfig& cfg = {})
      : poset_(&poset),
        f_(std::move(f)),
        seed_(master_seed),
        cfg_(cfg),
        plan_(plan_stages(poset, cfg)),
        master_(RandomTape::make(cfg.tape_mode, master_seed, cfg.kwise)),
        stages_(plan_.stage_count() + 1) {
    for (unsigned i = 0; i < plan_.stage_count(); ++i) {
      stages_[i].graph = BGraph{this, i};
      stages_[i].engine = std::make_unique<LineGraphMis<BGraph>>(
          stages_[i].graph, poset.id_bound(), master_.for_stage(i), plan_.mis);
    }
  }

  LocalSorter(const LocalSorter&) = delete;
  LocalSorter& operator=(const LocalSorter&) = delete;

  const StagePlan& plan() const { return plan_; }
  std::uint64_t seed() const { return seed_; }

  /// f_final(x).
  bool query(Element x) {
    std::lock_guard lock(mu_);
    ++queries_;
    return label(static_cast<unsigned>(plan_.stage_count()), x);
  }

  bool stage_label(unsigned i, Element x) {
    std::lock_guard lock(mu_);
    return label(i, x);
  }

  Element stage_partner(unsigned i, Element x) {
    std::lock_guard lock(mu_);
    return partner(i, x);
  }

  std::vector<Element> stage_neighbors(unsigned i, Element x) {
    std::lock_guard lock(mu_);
    const auto& n = b_neighbors(i, x);
    return {n.begin(), n.end()};
  }

  ProbeReport report() const {
    std::lock_guard lock(mu_);
    ProbeReport r;
    r.poset_probes = poset_reads_.size();
    r.label_probes = stages_[0].labels.size();
    r.queries = queries_;
    for (unsigned i = 0; i < plan_.stage_count(); ++i) {
      const Stage& s = stages_[i];
      const MisStats ms = s.engine->stats();
      StageProbes sp;
      sp.stage = i;
      sp.k = plan_.cutoffs[i];
      sp.label_evals = s.labels.size();
      sp.b_neighborhoods = s.neighbors.size();
      sp.partner_queries = s.partners.size();
      sp.tape_bits = ms.tape_bits;
      sp.simulated_edges = ms.simulated_vertices;
      sp.max_component = ms.max_component;
      r.tape_bits += ms.tape_bits;
      r.stages.push_back(sp);
    }
    return r;
  }

 private:
  struct BGraph {
    LocalSorter* sorter = nullptr;
    unsigned stage = 0;

    const std::vector<Vertex>& neighbors(Vertex v) const {
      return sorter->b_neighbors(stage, static_cast<Element>(v));
    }
    std::size_t degree_bound() const { return sorter->poset_->degree_bound(); }
    std::size_t vertex_count() const { return sorter->poset_->size(); }
  };

  struct Stage {
    std::unordered_map<Element, bool> labels;
    std::unordered_map<Element, std::vector<Vertex>> neighbors;
    std::unordered_map<Element, Element> partners;
    BGraph graph;
    std::unique_ptr<LineGraphMis<BGraph>> engine;
  };

  void check_failed() const {
    if (failed_) throw StageFailure(failed_->first, failed_->second);
  }

  bool label(unsigned i, Element x) {
    check_failed();
    Stage& s = stages_[i];
    if (auto it = s.labels.find(x); it != s.labels.end()) return it->second;
    const bool value = i == 0 ? f_(x) : label(i - 1, partner(i - 1, x));
    s.labels.emplace(x, value);
    return value;
  }

  const std::vector<Vertex>& b_neighbors(unsigned i, Element x) {
    Stage& s = stages_[i];
    if (auto it = s.neighbors.find(x); it != s.neighbors.end()) return it->second;
    const bool fx = label(i, x);
    std::vector<Vertex> out;
    const auto cone = longest_paths(*poset_, x, fx ? Direction::up : Direction::down,
                                    [this](Element u) { poset_reads_.insert(u); });
    for (auto [y, d] : cone)
      if (d >= plan_.cutoffs[i] && label(i, y) != fx) out.push_back(y);
    return s.neighbors.emplace(x, std::move(out)).first->second;
  }

  Element partner(unsigned i, Element x) {
    check_failed();
    Stage& s = stages_[i];
    if (auto it = s.partners.find(x); it != s.partners.end()) return it->second;
    Element y;
    try {
      y = static_cast<Element>(s.engine->partner(x));
    } catch (const ComponentTooLarge& e) {
      failed_.emplace(i, e.what());
      throw StageFailure(i, e.what());
    }
    s.partners.emplace(x, y);
    return y;
  }

  const P* poset_;
  std::function<bool(Element)> f_;
  std::uint64_t seed_;
  SorterConfig cfg_;
  StagePlan plan_;
  RandomTape master_;
  std::vector<Stage> stages_;  // stages_[S] only holds f_final labels
  std::unordered_set<Element> poset_reads_;
  std::uint64_t queries_ = 0;
  std::optional<std::pair<unsigned, std::string>> failed_;
  mutable std::recursive_mutex mu_;
};

/// One-shot query: a fresh sorter, so the probe counts are cold.
template <PosetLike P>
bool local_sort_query(const P& poset, std::function<bool(Element)> f, Element x,
                      std::uint64_t master_seed, const SorterConfig& cfg = {}) {
  LocalSorter<P> sorter(poset, std::move(f), master_seed, cfg);
  return sorter.query(x);
}

}  // namespace poset_lca
