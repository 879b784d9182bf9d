#include <gtest/gtest.h>

#include <bit>
#include <numeric>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "poset_lca/functions.hpp"
#include "poset_lca/sorter.hpp"

using namespace poset_lca;

namespace {

Poset chain(std::size_t n) {
  std::vector<HasseEdge> e;
  for (Element i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return build_poset(n, e);
}

Labels bits(std::initializer_list<int> b) { return Labels(b.begin(), b.end()); }

std::size_t ones(const Labels& l) { return std::accumulate(l.begin(), l.end(), std::size_t{0}); }

std::vector<Matcher> matchers(const Poset& p) {
  return {greedy_matcher(), adversarial_matcher(), random_order_matcher(3), lca_matcher(p, 0),
          lca_matcher(p, 1)};
}

Labels random_labels(std::size_t n, std::uint64_t seed, double p = 0.5) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(p);
  Labels l(n);
  for (auto& x : l) x = b(rng);
  return l;
}

Labels read_out(LocalSorter<Poset>& s, const Poset& p) {
  Labels out(p.size());
  for (Element x : p.elements()) out[x] = s.query(x);
  return out;
}

}  // namespace

TEST(StagePlan, CutoffsAndCounts) {
  SorterConfig cfg;
  const auto p0 = plan_stages(5, 0, 0, cfg);
  EXPECT_EQ(p0.stage_count(), 0u);
  const auto p1 = plan_stages(2, 1, 1, cfg);
  EXPECT_EQ(p1.cutoffs, (std::vector<unsigned>{1}));
  const auto p4 = plan_stages(16, 4, 15, cfg);
  EXPECT_EQ(p4.cutoffs, (std::vector<unsigned>{2, 1, 1}));
  EXPECT_DOUBLE_EQ(p4.stage_delta, 0.1 / 3);
  const auto p5 = plan_stages(100, 5, 10, cfg);
  EXPECT_EQ(p5.cutoffs, (std::vector<unsigned>{3, 2, 1, 1}));
  cfg.extra_stage = true;
  EXPECT_EQ(plan_stages(16, 4, 15, cfg).cutoffs, (std::vector<unsigned>{2, 1, 1, 1}));
  EXPECT_LE(p4.mis.tau, DesireSum::kMaxRound);
}

TEST(GlobalSort, Examples) {
  const auto c2 = chain(2);
  const auto l = bits({1, 0});
  for (const auto& m : matchers(c2))
    EXPECT_EQ(global_sort(c2, LabelsView{&l}, m).output(), bits({0, 1}));

  const auto cube = hypercube(3);
  const auto parity = [](Element x) { return std::popcount(x) % 2 == 1; };
  const double opt = distance_to_monotone_exact(cube, parity);
  EXPECT_DOUBLE_EQ(opt, 0.375);
  for (const auto& m : matchers(cube)) {
    const auto out = global_sort(cube, parity, m).output();
    EXPECT_TRUE(is_monotone(cube, LabelsView{&out}));
    EXPECT_EQ(ones(out), 4u);
    EXPECT_LE(labeling_distance(cube, parity, LabelsView{&out}), 2 * opt);
  }
}

TEST(GlobalSort, MonotoneInputUnchanged) {
  const auto cube = hypercube(4);
  const auto maj = [](Element x) { return std::popcount(x) >= 2; };
  for (const auto& m : matchers(cube)) {
    const auto r = global_sort(cube, maj, m);
    EXPECT_EQ(r.output(), materialize(cube, maj));
    for (const auto& partner : r.partners)
      for (Element x : cube.elements()) EXPECT_EQ(partner[x], x);
  }
}

TEST(StageMaxViolationDist, Examples) {
  const auto c5 = chain(5);
  const auto l = bits({1, 0, 0, 0, 0});
  EXPECT_EQ(stage_max_violation_dist(c5, LabelsView{&l}), 4u);
  const auto m = bits({0, 0, 1, 1, 1});
  EXPECT_EQ(stage_max_violation_dist(c5, LabelsView{&m}), 0u);
}

// Exhaustive over all posets on <= 4 elements (5 is covered by acceptance).
TEST(GlobalSort, ExhaustiveSmallPosets) {
  for (std::size_t n = 1; n <= 4; ++n)
    for (const auto& edges : oracle::ordered_posets(n)) {
      const auto p = build_poset(n, edges);
      const auto mono = oracle::monotone_masks(p);
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Labels f(n);
        for (Element x = 0; x < n; ++x) f[x] = mask >> x & 1u;
        const double opt = double(oracle::brute_repairs(mono, mask)) / double(n);
        ASSERT_DOUBLE_EQ(distance_to_monotone_exact(p, LabelsView{&f}), opt);
        for (const auto& m : matchers(p)) {
          const auto r = global_sort(p, LabelsView{&f}, m);
          const auto& out = r.output();
          ASSERT_TRUE(is_monotone(p, LabelsView{&out}));
          ASSERT_EQ(ones(out), ones(f));
          ASSERT_LE(labeling_distance(p, LabelsView{&f}, LabelsView{&out}), 2 * opt + 1e-12);
          for (std::size_t i = 0; i < r.cutoffs.size(); ++i) {
            const unsigned bound = (unsigned(p.height()) + (2u << i) - 1) / (2u << i);
            ASSERT_LE(stage_max_violation_dist(p, LabelsView{&r.stages[i + 1]}), bound);
          }
        }
      }
    }
}

TEST(GlobalSort, MonotoneAnchorContraction) {
  const auto cube = hypercube(4);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_labels(16, trial);
    const auto out = global_sort(cube, LabelsView{&f}, lca_matcher(cube, trial)).output();
    for (int a = 0; a < 5; ++a) {
      // up-closure of a random set is monotone
      Labels q(16, 0);
      for (Element x = 0; x < 16; ++x)
        if (rng() % 6 == 0)
          for (Element y = 0; y < 16; ++y)
            if ((x & y) == x) q[y] = 1;
      ASSERT_TRUE(is_monotone(cube, LabelsView{&q}));
      EXPECT_LE(labeling_distance(cube, LabelsView{&out}, LabelsView{&q}),
                labeling_distance(cube, LabelsView{&f}, LabelsView{&q}) + 1e-12);
    }
  }
}

TEST(GlobalSort, DistanceShorteningOnHypercube) {
  const auto cube = hypercube(4);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto f = random_labels(16, s + 100);
    for (const auto& m : {adversarial_matcher(), lca_matcher(cube, s)}) {
      const auto r = global_sort(cube, LabelsView{&f}, m);
      ASSERT_EQ(r.cutoffs, (std::vector<unsigned>{2, 1, 1}));
      EXPECT_LE(stage_max_violation_dist(cube, LabelsView{&r.stages[1]}), 2u);
      EXPECT_LE(stage_max_violation_dist(cube, LabelsView{&r.stages[2]}), 1u);
      EXPECT_EQ(stage_max_violation_dist(cube, LabelsView{&r.stages[3]}), 0u);
    }
  }
}

TEST(GlobalSort, ExtraStageIsIdempotent) {
  const auto cube = hypercube(4);
  SorterConfig extra;
  extra.extra_stage = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_labels(16, s);
    const auto a = global_sort(cube, LabelsView{&f}, lca_matcher(cube, s)).output();
    const auto b = global_sort(cube, LabelsView{&f}, lca_matcher(cube, s, extra), extra);
    EXPECT_EQ(b.stages.size(), 5u);
    EXPECT_EQ(b.output(), a);
  }
}

TEST(ViolationGraphs, MatchKNeighbors) {
  const auto cube = hypercube(3);
  const auto low = [](Element x) { return std::popcount(x) <= 1; };
  const auto vg = build_violation_graph(cube, low, 2);
  std::vector<Vertex> n0(vg.graph.neighbors(0).begin(), vg.graph.neighbors(0).end());
  std::sort(n0.begin(), n0.end());
  EXPECT_EQ(n0, (std::vector<Vertex>{3, 5, 6, 7}));
  for (auto [u, v, d] : vg.edges) EXPECT_GE(d, 2u);
}

TEST(LocalSorter, ChainOfTwo) {
  const auto c2 = chain(2);
  const auto l = bits({1, 0});
  for (std::uint64_t s = 0; s < 50; ++s) {
    LocalSorter<Poset> sorter(c2, LabelsView{&l}, s);
    EXPECT_FALSE(sorter.query(0));
    EXPECT_TRUE(sorter.query(1));
  }
}

TEST(LocalSorter, MonotoneInputHasNoMatchingWork) {
  const auto cube = hypercube(4);
  const auto maj = [](Element x) { return std::popcount(x) >= 2; };
  LocalSorter<Poset> sorter(cube, maj, 5);
  for (Element x : cube.elements()) EXPECT_EQ(sorter.query(x), maj(x));
  for (const auto& st : sorter.report().stages) EXPECT_EQ(st.simulated_edges, 0u);
}

TEST(LocalSorter, EqualsGlobalWithSameSeed) {
  const auto cube = hypercube(4);
  const auto parity = [](Element x) { return std::popcount(x) % 2 == 1; };
  for (std::uint64_t s = 0; s < 10; ++s) {
    LocalSorter<Poset> sorter(cube, parity, s);
    const auto local = read_out(sorter, cube);
    EXPECT_EQ(local, global_sort(cube, parity, lca_matcher(cube, s)).output());
    EXPECT_TRUE(is_monotone(cube, LabelsView{&local}));
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = random_dag(40, 0.1, s);
    const auto f = random_labels(40, s * 3);
    LocalSorter<Poset> sorter(p, LabelsView{&f}, s);
    const auto global = global_sort(p, LabelsView{&f}, lca_matcher(p, s));
    EXPECT_EQ(read_out(sorter, p), global.output());
    for (unsigned i = 0; i < global.partners.size(); ++i)
      for (Element x : p.elements()) EXPECT_EQ(sorter.stage_partner(i, x), global.partners[i][x]);
  }
}

TEST(LocalSorter, ExactTapeEqualsGlobal) {
  const auto cube = hypercube(4);
  SorterConfig cfg;
  cfg.tape_mode = TapeMode::exact_kwise;
  cfg.kwise = 8;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f = random_labels(16, s);
    LocalSorter<Poset> sorter(cube, LabelsView{&f}, s, cfg);
    EXPECT_EQ(read_out(sorter, cube),
              global_sort(cube, LabelsView{&f}, lca_matcher(cube, s, cfg), cfg).output());
  }
}

TEST(LocalSorter, QueryOrderIndependence) {
  const auto p = random_dag(50, 0.08, 4);
  const auto f = random_labels(50, 8);
  LocalSorter<Poset> a(p, LabelsView{&f}, 9);
  const auto forward = read_out(a, p);
  std::vector<Element> order(50);
  std::iota(order.begin(), order.end(), 0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    std::shuffle(order.begin(), order.end(), std::mt19937_64(s));
    LocalSorter<Poset> b(p, LabelsView{&f}, 9);
    for (Element x : order) EXPECT_EQ(b.query(x), forward[x]);
    for (Element x : order) EXPECT_EQ(b.query(x), forward[x]);  // repeats
    EXPECT_EQ(local_sort_query(p, LabelsView{&f}, order[0], 9), forward[order[0]]);
  }
}

// Element IDs differ between the two representations, so their edge keys and
// matchings differ too; both outputs must still be valid sorts of f.
TEST(LocalSorter, ImplicitCubeSortsLikeMaterialized) {
  const auto spec = parse_function_spec("random:0.5");
  const auto mat = truncated_hypercube(8, 0.3);
  const ImplicitCube imp(8, 0.3);
  const auto fm = poset_function(mat, spec, 4);
  const auto fc = cube_function(8, spec, 4);
  ASSERT_EQ(mat.size(), imp.size());
  EXPECT_EQ(mat.height(), imp.height());
  EXPECT_EQ(mat.degree_bound(), imp.degree_bound());
  LocalSorter<Poset> a(mat, fm, 2);
  LocalSorter<ImplicitCube> b(imp, [&](Element x) { return fc(x); }, 2);
  Labels la(mat.size()), lb(mat.size()), f(mat.size());
  for (Element x : mat.elements()) {
    la[x] = a.query(x);
    lb[x] = b.query(static_cast<Element>(mat.point(x)));
    f[x] = fm(x);
  }
  EXPECT_TRUE(is_monotone(mat, LabelsView{&la}));
  EXPECT_TRUE(is_monotone(mat, LabelsView{&lb}));
  EXPECT_EQ(ones(la), ones(f));
  EXPECT_EQ(ones(lb), ones(f));
}

TEST(LocalSorter, TinyCapRaisesStageFailure) {
  const auto cube = hypercube(5);
  const auto parity = [](Element x) { return std::popcount(x) % 2 == 1; };
  SorterConfig cfg;
  cfg.tau = 1;
  cfg.component_cap = 1;
  bool failed = false;
  for (std::uint64_t s = 0; s < 10 && !failed; ++s) {
    LocalSorter<Poset> sorter(cube, parity, s, cfg);
    try {
      read_out(sorter, cube);
    } catch (const StageFailure& e) {
      failed = true;
      EXPECT_LT(e.stage(), sorter.plan().stage_count());
      // the latch keeps failing
      EXPECT_THROW(sorter.query(0), StageFailure);
    }
  }
  EXPECT_TRUE(failed);
  EXPECT_THROW(global_sort(cube, parity, lca_matcher(cube, 0, cfg), cfg), StageFailure);
}

TEST(LocalSorter, ProbeReportAccounting) {
  const auto p = random_dag(60, 0.08, 1);
  const auto f = random_labels(60, 2);
  LocalSorter<Poset> sorter(p, LabelsView{&f}, 3);
  sorter.query(10);
  const auto r = sorter.report();
  EXPECT_EQ(r.queries, 1u);
  EXPECT_LE(r.poset_probes, p.size());
  EXPECT_LE(r.label_probes, p.size());
  EXPECT_GE(r.label_probes, 1u);
  EXPECT_EQ(r.stages.size(), sorter.plan().stage_count());
  EXPECT_LE(r.total(), 2 * p.size() * (sorter.plan().stage_count() + 1));
}

TEST(LocalSorter, ConcurrentQueriesAgree) {
  const auto p = random_dag(60, 0.1, 5);
  const auto f = random_labels(60, 6);
  LocalSorter<Poset> ref(p, LabelsView{&f}, 7);
  const auto want = read_out(ref, p);
  LocalSorter<Poset> shared(p, LabelsView{&f}, 7);
  std::vector<std::thread> threads;
  std::vector<Labels> got(4, Labels(60));
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (Element x = 0; x < 60; ++x) {
        const Element y = (x * 7 + t * 13) % 60;
        got[t][y] = shared.query(y);
      }
    });
  for (auto& th : threads) th.join();
  for (const auto& g : got) EXPECT_EQ(g, want);
}
