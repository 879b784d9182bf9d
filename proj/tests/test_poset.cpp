#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "poset_lca/poset.hpp"

using namespace poset_lca;

namespace {

Poset chain(std::size_t n) {
  std::vector<HasseEdge> e;
  for (Element i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return build_poset(n, e);
}

std::vector<Element> sorted(std::vector<Element> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(BuildPoset, ChainOfThree) {
  const Poset p = build_poset(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.height(), 2u);
  EXPECT_EQ(p.degree_bound(), 2u);
}

TEST(BuildPoset, Antichain) {
  const Poset p = build_poset(5, std::vector<HasseEdge>{});
  EXPECT_EQ(p.size(), 5u);
  EXPECT_EQ(p.height(), 0u);
  EXPECT_EQ(p.degree_bound(), 0u);
}

TEST(BuildPoset, RejectsImpliedEdge) {
  EXPECT_THROW(build_poset(3, {{0, 1}, {1, 2}, {0, 2}}), RedundantEdgeError);
  // implied through a longer detour, not just a triangle
  EXPECT_THROW(build_poset(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), RedundantEdgeError);
  EXPECT_THROW(build_poset(2, {{0, 1}, {0, 1}}), RedundantEdgeError);
}

TEST(BuildPoset, RejectsCycles) {
  EXPECT_THROW(build_poset(3, {{0, 1}, {1, 2}, {2, 0}}), CycleError);
  EXPECT_THROW(build_poset(2, {{1, 1}}), CycleError);
}

TEST(BuildPoset, RejectsBadIds) { EXPECT_THROW(build_poset(2, {{0, 2}}), std::invalid_argument); }

TEST(BuildPoset, CachesMatchDefinitions) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Poset p = random_dag(14, 0.25, seed);
    const auto up = oracle::up_lists(p);
    int height = 0;
    std::size_t degree = 0;
    for (Element x = 0; x < p.size(); ++x) {
      std::size_t above = 0, below = 0;
      for (Element y = 0; y < p.size(); ++y) {
        height = std::max(height, oracle::longest_path(up, x, y));
        if (x != y && oracle::longest_path(up, x, y) > 0) ++above;
        if (x != y && oracle::longest_path(up, y, x) > 0) ++below;
      }
      degree = std::max({degree, above, below});
    }
    EXPECT_EQ(p.height(), std::size_t(height));
    EXPECT_EQ(p.degree_bound(), degree);
  }
}

TEST(BuildPoset, TransposeConsistency) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Poset p = random_dag(30, 0.15, seed);
    for (Element x = 0; x < p.size(); ++x) {
      for (Element y : p.up(x)) {
        auto d = p.down(y);
        EXPECT_TRUE(std::find(d.begin(), d.end(), x) != d.end());
      }
      for (Element y : p.down(x)) {
        auto u = p.up(y);
        EXPECT_TRUE(std::find(u.begin(), u.end(), x) != u.end());
      }
      EXPECT_TRUE(std::is_sorted(p.up(x).begin(), p.up(x).end()));
      EXPECT_TRUE(std::is_sorted(p.down(x).begin(), p.down(x).end()));
    }
  }
}

TEST(BuildPoset, NoEdgeImpliedByLongerPath) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Poset p = random_dag(25, 0.2, seed);
    const auto up = oracle::up_lists(p);
    for (auto [u, v] : p.edges()) EXPECT_EQ(oracle::longest_path(up, u, v), 1);
  }
}

TEST(TransitiveReduce, MatchesClosureReduction) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<HasseEdge> e;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e2;
    for (Element u = 0; u < 12; ++u)
      for (Element v = u + 1; v < 12; ++v)
        if (rng() % 3 == 0) {
          e.emplace_back(u, v);
          e2.emplace_back(u, v);
        }
    auto got = transitive_reduce(12, e);
    std::sort(got.begin(), got.end());
    auto want = oracle::hasse(12, e2);
    std::sort(want.begin(), want.end());
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].first, want[i].first);
      EXPECT_EQ(got[i].second, want[i].second);
    }
  }
}

TEST(Hypercube, DimensionThree) {
  const Poset p = hypercube(3);
  EXPECT_EQ(p.size(), 8u);
  EXPECT_EQ(p.height(), 3u);
  EXPECT_EQ(p.degree_bound(), 7u);
  EXPECT_EQ(all_successors(p, 0).size(), 7u);
}

TEST(Hypercube, DimensionOne) {
  const Poset p = hypercube(1);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.edge_count(), 1u);
}

TEST(Hypercube, SuccessorsFlipOneZeroBit) {
  const Poset p = hypercube(5);
  for (Element x = 0; x < 32; ++x) {
    std::vector<Element> want;
    for (unsigned b = 0; b < 5; ++b)
      if (!(x >> b & 1u)) want.push_back(x | (1u << b));
    EXPECT_EQ(sorted({p.up(x).begin(), p.up(x).end()}), sorted(want));
  }
}

TEST(Hypercube, LongestPathIsWeightDifference) {
  const Poset p = hypercube(4);
  EXPECT_EQ(p.height(), 4u);
  EXPECT_EQ(longest_path_dist(p, 0b0000, 0b1111), 4u);
  for (Element x = 0; x < 16; ++x)
    for (Element y = 0; y < 16; ++y) {
      const auto d = longest_path_dist(p, x, y);
      const bool comparable = (x & y) == x || (x & y) == y;
      ASSERT_EQ(d.has_value(), comparable);
      if (comparable)
        EXPECT_EQ(*d, unsigned(std::abs(std::popcount(x) - std::popcount(y))));
    }
}

TEST(Hypercube, BudgetEnforced) {
  EXPECT_THROW(hypercube(21), SizeError);
  EXPECT_THROW(hypercube(8, 6), SizeError);
  EXPECT_THROW(hypercube(0), std::invalid_argument);
}

TEST(TruncatedHypercube, SixteenAtPointTwo) {
  const WeightBand b = truncation_band(16, 0.2);
  EXPECT_NEAR(b.threshold, 4.2919, 1e-4);
  EXPECT_EQ(b.lo, 4u);
  EXPECT_EQ(b.hi, 12u);
  const Poset p = truncated_hypercube(16, 0.2);
  EXPECT_EQ(p.height(), 8u);
  for (Element x = 0; x < p.size(); ++x) {
    const auto w = std::popcount(p.point(x));
    EXPECT_GE(w, 4);
    EXPECT_LE(w, 12);
  }
  const double excluded = oracle::excluded_fraction(16, 4, 12);
  EXPECT_NEAR(excluded, 0.0213, 1e-4);
  EXPECT_LE(excluded, 0.2);
  EXPECT_NEAR(1.0 - double(p.size()) / 65536.0, excluded, 1e-12);
}

TEST(TruncatedHypercube, NarrowBandIsAntichain) {
  const WeightBand b = truncation_band(4, 1.99);
  EXPECT_NEAR(b.threshold, 0.1, 1e-3);
  const Poset p = truncated_hypercube(4, 1.99);
  EXPECT_EQ(p.size(), 6u);
  EXPECT_EQ(p.height(), 0u);
  EXPECT_EQ(p.edge_count(), 0u);
}

TEST(TruncatedHypercube, ExcludedMassAtMostEps) {
  for (unsigned n : {4u, 8u, 12u, 16u})
    for (double eps : {0.01, 0.1, 0.2, 0.5, 0.9}) {
      const WeightBand b = truncation_band(n, eps);
      EXPECT_LE(oracle::excluded_fraction(n, b.lo, b.hi), eps) << n << ' ' << eps;
    }
}

TEST(TruncatedHypercube, HasseEdgesAreCubeEdgesInsideBand) {
  const Poset p = truncated_hypercube(10, 0.3);
  const Poset full = hypercube(10);
  for (auto [u, v] : p.edges()) {
    const auto a = p.point(u), b = p.point(v);
    EXPECT_EQ(std::popcount(a ^ b), 1);
    EXPECT_EQ(a & b, a);
  }
  // every cube edge with both endpoints in the band is present
  std::size_t inside = 0;
  const WeightBand b = truncation_band(10, 0.3);
  for (auto [u, v] : full.edges())
    if (b.contains(std::popcount(u)) && b.contains(std::popcount(v))) ++inside;
  EXPECT_EQ(p.edge_count(), inside);
}

TEST(TruncatedHypercube, RejectsBadEps) {
  EXPECT_THROW(truncation_band(8, 0.0), std::invalid_argument);
  EXPECT_THROW(truncation_band(8, 2.0), std::invalid_argument);
}

TEST(ImplicitCube, AgreesWithMaterialized) {
  const unsigned n = 9;
  const Poset p = truncated_hypercube(n, 0.25);
  const ImplicitCube c(n, 0.25);
  EXPECT_EQ(c.size(), p.size());
  EXPECT_EQ(c.height(), p.height());
  EXPECT_EQ(c.degree_bound(), p.degree_bound());
  std::vector<std::uint64_t> to_point(p.size());
  for (Element x = 0; x < p.size(); ++x) to_point[x] = p.point(x);
  for (Element x = 0; x < p.size(); ++x) {
    std::vector<Element> up;
    for (Element y : p.up(x)) up.push_back(static_cast<Element>(to_point[y]));
    EXPECT_EQ(sorted(up), sorted(c.up(static_cast<Element>(p.point(x)))));
    std::vector<Element> down;
    for (Element y : p.down(x)) down.push_back(static_cast<Element>(to_point[y]));
    EXPECT_EQ(sorted(down), sorted(c.down(static_cast<Element>(p.point(x)))));
  }
  std::size_t count = 0;
  for (Element x : c.elements()) {
    (void)x;
    ++count;
  }
  EXPECT_EQ(count, c.size());
}

TEST(ImplicitCube, FullCubeDegree) {
  const ImplicitCube c(6);
  EXPECT_EQ(c.size(), 64u);
  EXPECT_EQ(c.degree_bound(), 63u);
  EXPECT_EQ(c.height(), 6u);
  EXPECT_THROW(ImplicitCube(25), SizeError);
}

TEST(LongestPath, UnequalBranches) {
  // a=0, b=1, c=2, x=3, y=4: a<b<c and a<x<y<c
  const Poset p = build_poset(5, {{0, 1}, {1, 2}, {0, 3}, {3, 4}, {4, 2}});
  EXPECT_EQ(longest_path_dist(p, 0, 2), 3u);
  EXPECT_EQ(longest_path_dist(p, 2, 0), 3u);
  EXPECT_EQ(longest_path_dist(p, 1, 3), std::nullopt);
  EXPECT_EQ(longest_path_dist(p, 4, 4), 0u);
}

TEST(LongestPath, IncomparableCubePoints) {
  const Poset p = hypercube(3);
  EXPECT_EQ(longest_path_dist(p, 0b000, 0b111), 3u);
  EXPECT_EQ(longest_path_dist(p, 0b001, 0b010), std::nullopt);
}

TEST(LongestPath, AgreesWithPathEnumeration) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Poset p = random_dag(16, 0.3, seed);
    const auto up = oracle::up_lists(p);
    for (Element x = 0; x < p.size(); ++x)
      for (Element y = 0; y < p.size(); ++y) {
        const int fwd = oracle::longest_path(up, x, y), back = oracle::longest_path(up, y, x);
        const auto d = longest_path_dist(p, x, y);
        if (fwd < 0 && back < 0) {
          EXPECT_FALSE(d.has_value());
        } else {
          ASSERT_TRUE(d.has_value());
          EXPECT_EQ(int(*d), std::max(fwd, back));
        }
      }
  }
}

TEST(LongestPath, DefinedIffComparable) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Poset p = random_dag(20, 0.2, seed);
    for (Element x = 0; x < p.size(); ++x) {
      const auto succ = all_successors(p, x), pred = all_predecessors(p, x);
      for (Element y = 0; y < p.size(); ++y) {
        const bool related = y == x || std::binary_search(succ.begin(), succ.end(), y) ||
                             std::binary_search(pred.begin(), pred.end(), y);
        EXPECT_EQ(longest_path_dist(p, x, y).has_value(), related);
      }
    }
  }
}

TEST(LongestPath, Superadditive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Poset p = random_dag(18, 0.25, seed);
    for (Element c = 0; c < p.size(); ++c)
      for (Element b : all_successors(p, c))
        for (Element a : all_successors(p, b))
          EXPECT_GE(*longest_path_dist(p, a, c),
                    *longest_path_dist(p, a, b) + *longest_path_dist(p, b, c));
  }
}

TEST(LongestPath, HeightIsMaxDistance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Poset p = random_dag(20, 0.2, seed);
    unsigned best = 0;
    for (Element x = 0; x < p.size(); ++x)
      for (auto [y, d] : longest_paths(p, x, Direction::up)) best = std::max(best, d);
    EXPECT_EQ(best, p.height());
  }
  EXPECT_EQ(hypercube(6).height(), 6u);
}

TEST(Reachability, Examples) {
  const Poset cube = hypercube(2);
  EXPECT_EQ(all_successors(cube, 0b00), (std::vector<Element>{0b01, 0b10, 0b11}));
  const Poset anti = build_poset(4, std::vector<HasseEdge>{});
  EXPECT_TRUE(all_successors(anti, 2).empty());
  EXPECT_TRUE(all_predecessors(anti, 2).empty());
  const Poset c4 = chain(4);
  EXPECT_EQ(all_successors(c4, 1).size(), 2u);
  EXPECT_EQ(all_predecessors(c4, 1).size(), 1u);
}

TEST(Reachability, BoundedByDegree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Poset p = random_dag(30, 0.1, seed);
    for (Element x = 0; x < p.size(); ++x) {
      EXPECT_LE(all_successors(p, x).size(), p.degree_bound());
      EXPECT_LE(all_predecessors(p, x).size(), p.degree_bound());
    }
  }
}

TEST(RandomDag, EdgesGoUpInId) {
  const Poset p = random_dag(50, 0.1, 1);
  EXPECT_EQ(p.size(), 50u);
  for (auto [u, v] : p.edges()) EXPECT_LT(u, v);
}

TEST(PosetFile, RoundTrip) {
  const Poset p = random_dag(30, 0.15, 4);
  std::stringstream s;
  write_poset(s, p);
  const Poset q = read_poset(s);
  EXPECT_EQ(q.edges(), p.edges());
  EXPECT_EQ(q.size(), p.size());
  std::stringstream bad("3\n0 1\n1 x\n");
  EXPECT_THROW(read_poset(bad), std::invalid_argument);
}
