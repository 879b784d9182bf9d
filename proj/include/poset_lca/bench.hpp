#pragma once

// Probe-count sweeps over truncated hypercubes: every query runs on a fresh
// sorter, so its counts are cold.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "poset.hpp"
#include "random_tape.hpp"
#include "sorter.hpp"

namespace poset_lca {

struct BenchStage {
  unsigned stage = 0;
  unsigned k = 0;
  double mean_label_evals = 0;  // distinct f_i evaluations per query
  double mean_b_neighborhoods = 0;
  double mean_partner_queries = 0;
  double mean_tape_bits = 0;
  double blowup = 0;            // f_i evaluations per f_{i+1} evaluation
};

struct BenchRow {
  unsigned n = 0;
  double eps = 0;
  double noise = 0;
  std::size_t size = 0;
  std::size_t height = 0;
  std::size_t degree_bound = 0;
  unsigned tau = 0;
  std::size_t queries = 0;
  std::size_t failed_queries = 0;
  std::uint64_t max_probes = 0;
  double mean_probes = 0;
  std::uint64_t max_poset_probes = 0;
  std::uint64_t max_label_probes = 0;
  std::uint64_t max_tape_bits = 0;
  std::vector<std::uint64_t> per_query;  // poset + label probes, in query order
  std::vector<BenchStage> stages;
};

/// Majority by weight with each point flipped independently w.p. noise.
inline std::function<bool(std::uint64_t)> noisy_majority(unsigned n, double noise,
                                                         std::uint64_t seed) {
  return [n, noise, seed](std::uint64_t x) {
    const bool maj = 2 * unsigned(std::popcount(x)) > n;
    const bool flip = double(hash_combine(seed, x) >> 11) * 0x1.0p-53 < noise;
    return maj != flip;
  };
}

inline BenchRow probe_bench(unsigned n, double eps, double noise, std::size_t queries,
                            std::uint64_t seed, const SorterConfig& cfg = {}) {
  const Poset poset = truncated_hypercube(n, eps);
  const auto g = noisy_majority(n, noise, derive_seed(seed, 1));
  const auto f = [&poset, &g](Element x) { return g(poset.point(x)); };

  BenchRow row;
  row.n = n;
  row.eps = eps;
  row.noise = noise;
  row.size = poset.size();
  row.height = poset.height();
  row.degree_bound = poset.degree_bound();
  const StagePlan plan = plan_stages(poset, cfg);
  row.tau = plan.mis.tau;

  std::vector<Element> picks;
  if (queries >= poset.size()) {
    for (Element x : poset.elements()) picks.push_back(x);
  } else {
    std::mt19937_64 rng(derive_seed(seed, 2));
    std::uniform_int_distribution<Element> pick(0, static_cast<Element>(poset.size() - 1));
    for (std::size_t i = 0; i < queries; ++i) picks.push_back(pick(rng));
  }

  std::vector<double> evals(plan.stage_count() + 1, 0), nbhd(plan.stage_count(), 0),
      partners(plan.stage_count(), 0), bits(plan.stage_count(), 0);
  std::uint64_t sum = 0;
  for (Element x : picks) {
    LocalSorter<Poset> sorter(poset, f, seed, cfg);
    try {
      sorter.query(x);
    } catch (const StageFailure&) {
      ++row.failed_queries;
      continue;
    }
    const ProbeReport r = sorter.report();
    ++row.queries;
    row.per_query.push_back(r.total());
    sum += r.total();
    row.max_probes = std::max(row.max_probes, r.total());
    row.max_poset_probes = std::max(row.max_poset_probes, r.poset_probes);
    row.max_label_probes = std::max(row.max_label_probes, r.label_probes);
    row.max_tape_bits = std::max(row.max_tape_bits, r.tape_bits);
    for (const auto& s : r.stages) {
      evals[s.stage] += double(s.label_evals);
      nbhd[s.stage] += double(s.b_neighborhoods);
      partners[s.stage] += double(s.partner_queries);
      bits[s.stage] += double(s.tape_bits);
    }
    evals[plan.stage_count()] += 1;
  }
  const double q = row.queries == 0 ? 1.0 : double(row.queries);
  row.mean_probes = double(sum) / q;
  for (unsigned i = 0; i < plan.stage_count(); ++i) {
    BenchStage s;
    s.stage = i;
    s.k = plan.cutoffs[i];
    s.mean_label_evals = evals[i] / q;
    s.mean_b_neighborhoods = nbhd[i] / q;
    s.mean_partner_queries = partners[i] / q;
    s.mean_tape_bits = bits[i] / q;
    s.blowup = evals[i + 1] > 0 ? evals[i] / evals[i + 1] : 0;
    row.stages.push_back(s);
  }
  return row;
}

}  // namespace poset_lca
