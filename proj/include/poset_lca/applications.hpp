#pragma once

// Built on the sorter: a local monotonicity corrector, tolerant monotonicity
// testers (general poset, Boolean cube) and a proper learner for monotone
// functions over {0,1}^n.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "labeling.hpp"
#include "poset.hpp"
#include "random_tape.hpp"
#include "sorter.hpp"

namespace poset_lca {

/// f_mon(x) for the corrector fixed by master_seed.
template <PosetLike P>
bool correct(const P& poset, std::function<bool(Element)> f, Element x, std::uint64_t master_seed,
             const SorterConfig& cfg = {}) {
  return local_sort_query(poset, std::move(f), x, master_seed, cfg);
}

inline constexpr unsigned kMaxSeedRetries = 3;

/// Runs body(seed) with master seeds derived from `seed`, moving to a fresh
/// seed on StageFailure, at most kMaxSeedRetries times. Returns the result
/// and the number of failed attempts.
template <class Body>
auto with_seed_retries(std::uint64_t seed, Body&& body) {
  for (unsigned attempt = 0;; ++attempt) {
    try {
      return std::pair{body(attempt == 0 ? seed : derive_seed(seed, 0x7e7a11ULL + attempt)),
                       attempt};
    } catch (const StageFailure&) {
      if (attempt >= kMaxSeedRetries) throw;
    }
  }
}

struct TestVerdict {
  bool accept = true;
  double estimate = 0;      // median over runs
  double threshold = 0;
  std::size_t samples_used = 0;  // per run
  unsigned runs = 1;
  unsigned stage_retries = 0;
};

struct TesterConfig {
  double error_factor = 0.005;      // additive estimation error, as a multiple of eps
  double estimate_failure = 0.1;    // per-run failure of the Chernoff estimate
  SorterConfig sorter;
};

/// ceil(ln(2/q) / (2 (c eps)^2)): Hoeffding sample count for additive error
/// c*eps with failure probability q.
inline std::size_t tester_samples(double eps, const TesterConfig& cfg = {}) {
  const double err = cfg.error_factor * eps;
  return static_cast<std::size_t>(std::ceil(std::log(2.0 / cfg.estimate_failure) / (2 * err * err)));
}

/// 1 when trials_delta >= 1/3 (a single run already succeeds w.p. 2/3),
/// else 2t+1 with t = ceil(18 ln(1/trials_delta)).
inline unsigned tester_runs(double trials_delta) {
  if (!(trials_delta > 0)) throw std::invalid_argument("trials_delta must be > 0");
  if (trials_delta >= 1.0 / 3.0) return 1;
  return 2 * static_cast<unsigned>(std::ceil(18.0 * std::log(1.0 / trials_delta))) + 1;
}

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
}

/// Median-of-runs wrapper; run(seed) returns (estimate, retries).
template <class Run>
TestVerdict repeat_test(double threshold, std::size_t samples, double trials_delta,
                        std::uint64_t seed, Run&& run) {
  TestVerdict v;
  v.threshold = threshold;
  v.samples_used = samples;
  v.runs = tester_runs(trials_delta);
  std::vector<double> estimates;
  unsigned rejects = 0;
  for (unsigned r = 0; r < v.runs; ++r) {
    auto [estimate, retries] = run(v.runs == 1 ? seed : derive_seed(seed, r));
    v.stage_retries += retries;
    estimates.push_back(estimate);
    if (estimate > threshold) ++rejects;
  }
  std::sort(estimates.begin(), estimates.end());
  v.estimate = estimates[estimates.size() / 2];
  v.accept = 2 * rejects < v.runs;
  return v;
}

}  // namespace detail

/// Uniform sampler over a materialized poset's elements.
inline std::function<Element(std::mt19937_64&)> uniform_sampler(const Poset& poset) {
  const auto n = poset.size();
  if (n == 0) throw std::invalid_argument("cannot sample from an empty poset");
  return [n](std::mt19937_64& rng) {
    return static_cast<Element>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  };
}

/// Accept iff the estimated distance between f and its correction is at
/// most 0.99 eps. Separates 0.49eps-close from eps-far.
template <PosetLike P>
TestVerdict tolerant_test_poset(const P& poset, std::function<bool(Element)> f, double eps,
                                std::function<Element(std::mt19937_64&)> sampler,
                                double trials_delta, std::uint64_t seed,
                                const TesterConfig& cfg = {}) {
  detail::check_eps(eps);
  const std::size_t m = tester_samples(eps, cfg);
  auto run = [&](std::uint64_t run_seed) {
    return with_seed_retries(run_seed, [&](std::uint64_t s) {
      LocalSorter<P> sorter(poset, f, s, cfg.sorter);
      std::mt19937_64 rng(derive_seed(s, 0x5a3b1e));
      std::size_t differ = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const Element x = sampler(rng);
        if (sorter.query(x) != f(x)) ++differ;
      }
      return double(differ) / double(m);
    });
  };
  return detail::repeat_test(0.99 * eps, m, trials_delta, seed, run);
}

/// Corrector over all of {0,1}^n: the sorter on H^n_{eps'}, 1 above the band
/// and 0 below it.
class CubeCorrector {
 public:
  CubeCorrector(unsigned n, double band_eps, std::function<bool(std::uint64_t)> f,
                std::uint64_t seed, const SorterConfig& cfg = {})
      : cube_(std::make_unique<ImplicitCube>(n, band_eps)),
        sorter_(std::make_unique<LocalSorter<ImplicitCube>>(
            *cube_, [f = std::move(f)](Element x) { return f(x); }, seed, cfg)) {}

  bool operator()(std::uint64_t x) {
    const auto w = static_cast<unsigned>(std::popcount(x));
    const WeightBand& b = cube_->band();
    if (w > b.hi) return true;
    if (w < b.lo) return false;
    return sorter_->query(static_cast<Element>(x));
  }

  const ImplicitCube& cube() const { return *cube_; }
  LocalSorter<ImplicitCube>& sorter() { return *sorter_; }

 private:
  std::unique_ptr<ImplicitCube> cube_;
  std::unique_ptr<LocalSorter<ImplicitCube>> sorter_;
};

/// Accept iff the estimated distance between f and its cube correction
/// (band H^n_{0.005 eps}) is at most 0.992 eps.
inline TestVerdict tolerant_test_cube(unsigned n, std::function<bool(std::uint64_t)> f, double eps,
                                      double trials_delta, std::uint64_t seed,
                                      const TesterConfig& cfg = {}) {
  detail::check_eps(eps);
  const std::size_t m = tester_samples(eps, cfg);
  auto run = [&](std::uint64_t run_seed) {
    return with_seed_retries(run_seed, [&](std::uint64_t s) {
      CubeCorrector corrected(n, 0.005 * eps, f, s, cfg.sorter);
      std::mt19937_64 rng(derive_seed(s, 0x5a3b1e));
      const std::uint64_t mask = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
      std::size_t differ = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t x = rng() & mask;
        if (corrected(x) != f(x)) ++differ;
      }
      return double(differ) / double(m);
    });
  };
  return detail::repeat_test(0.992 * eps, m, trials_delta, seed, run);
}

// ---- learning ----------------------------------------------------------

using Sample = std::pair<std::uint64_t, bool>;

/// Learner constants. The sample schedule is
/// m = ceil(c * M * ln(2M / delta) / eps^e), M = #coefficients of degree <= d,
/// e = 1 (realizable) or 2 (agnostic).
struct LowDegreeConfig {
  double c_degree = 0.25;
  double c_samples = 0.3;
  double c_samples_agnostic = 0.3;
  double delta = 0.1;
};

inline constexpr unsigned kMaxLearnDimension = 20;
inline constexpr unsigned kMaxCertifyDimension = 14;

inline unsigned lowdegree_degree(unsigned n, double eps, const LowDegreeConfig& cfg = {}) {
  const double d = std::ceil(cfg.c_degree * std::sqrt(double(n)) / eps);
  return static_cast<unsigned>(std::min<double>(n, std::max(1.0, d)));
}

inline std::uint64_t lowdegree_coefficient_count(unsigned n, unsigned d) {
  std::uint64_t m = 0;
  for (unsigned j = 0; j <= d; ++j) m += detail::binomial(n, j);
  return m;
}

inline std::size_t lowdegree_required_samples(unsigned n, double eps, bool agnostic,
                                              const LowDegreeConfig& cfg = {}) {
  const double M = double(lowdegree_coefficient_count(n, lowdegree_degree(n, eps, cfg)));
  const double c = agnostic ? cfg.c_samples_agnostic : cfg.c_samples;
  const double denom = agnostic ? eps * eps : eps;
  return static_cast<std::size_t>(std::ceil(c * M * std::log(2 * M / cfg.delta) / denom));
}

/// In-place Walsh-Hadamard transform (unnormalized).
inline void walsh_hadamard(std::vector<double>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1)
    for (std::size_t i = 0; i < a.size(); i += 2 * h)
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
}

/// Truth table of a learned hypothesis.
struct LowDegreeHypothesis {
  unsigned n = 0;
  unsigned degree = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> table;

  bool operator()(std::uint64_t x) const { return (*table)[x] != 0; }
};

/// Estimates every Fourier coefficient of degree <= d from the samples and
/// rounds the truncated expansion: output 1 iff h(x) > 0.
inline LowDegreeHypothesis improper_learn_lowdegree(std::span<const Sample> samples, unsigned n,
                                                    double eps, bool agnostic = false,
                                                    const LowDegreeConfig& cfg = {}) {
  if (n < 1 || n > kMaxLearnDimension)
    throw SizeError("learner supports 1 <= n <= " + std::to_string(kMaxLearnDimension));
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  const std::size_t need = lowdegree_required_samples(n, eps, agnostic, cfg);
  if (samples.size() < need) throw InsufficientSamples(samples.size(), need);

  const std::size_t size = std::size_t{1} << n;
  std::vector<double> a(size, 0.0);
  for (auto [x, y] : samples) {
    if (x >= size) throw std::invalid_argument("sample point outside {0,1}^n");
    a[x] += y ? 1.0 : -1.0;
  }
  walsh_hadamard(a);  // a[S] = m * hat f(S)
  const unsigned d = lowdegree_degree(n, eps, cfg);
  for (std::size_t s = 0; s < size; ++s)
    if (static_cast<unsigned>(std::popcount(s)) > d) a[s] = 0;
  walsh_hadamard(a);  // a[x] = m * 2^n * h(x)
  auto table = std::make_shared<std::vector<std::uint8_t>>(size);
  for (std::size_t x = 0; x < size; ++x) (*table)[x] = a[x] > 1e-9 ? 1 : 0;
  return {n, d, std::move(table)};
}

inline LowDegreeHypothesis improper_learn_lowdegree(const std::vector<Sample>& samples, unsigned n,
                                                    double eps, bool agnostic = false,
                                                    const LowDegreeConfig& cfg = {}) {
  return improper_learn_lowdegree(std::span<const Sample>(samples), n, eps, agnostic, cfg);
}

/// m uniform samples of target, each label flipped with probability noise.
inline std::vector<Sample> draw_samples(unsigned n, const std::function<bool(std::uint64_t)>& target,
                                        std::size_t m, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(noise);
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  std::vector<Sample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t x = rng() & mask;
    out.emplace_back(x, target(x) != (noise > 0 && flip(rng)));
  }
  return out;
}

struct LearnerOutput {
  unsigned n = 0;
  std::uint64_t seed = 0;  // master seed of the corrector, fixed into the evaluator
  WeightBand band;         // corrected region; 1 above, 0 below
  unsigned degree = 0;
  std::size_t samples_used = 0;
  unsigned stage_retries = 0;
  bool monotone_certified = false;
  std::shared_ptr<const std::vector<std::uint8_t>> table;

  bool operator()(std::uint64_t x) const { return (*table)[x] != 0; }
};

/// Exhaustive check over {0,1}^n, one edge per flipped bit.
template <class F>
bool is_monotone_on_cube(unsigned n, F&& f) {
  const std::uint64_t size = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < size; ++x) {
    if (!f(x)) continue;
    for (unsigned b = 0; b < n; ++b)
      if (!(x >> b & 1u) && !f(x | (std::uint64_t{1} << b))) return false;
  }
  return true;
}

namespace detail {

inline LearnerOutput learn_monotone(std::span<const Sample> samples, unsigned n, double eps,
                                    std::uint64_t master_seed, bool agnostic,
                                    const LowDegreeConfig& lcfg, const SorterConfig& scfg) {
  check_eps(eps);
  const LowDegreeHypothesis h = improper_learn_lowdegree(samples, n, eps / 10, agnostic, lcfg);
  LearnerOutput out;
  out.n = n;
  out.degree = h.degree;
  out.samples_used = samples.size();
  const std::size_t size = std::size_t{1} << n;
  auto [table, retries] = with_seed_retries(master_seed, [&](std::uint64_t s) {
    CubeCorrector corrected(n, eps / 10, h, s, scfg);
    std::vector<std::uint8_t> t(size);
    for (std::uint64_t x = 0; x < size; ++x) t[x] = corrected(x) ? 1 : 0;
    out.seed = s;
    out.band = corrected.cube().band();
    return t;
  });
  out.stage_retries = retries;
  out.table = std::make_shared<const std::vector<std::uint8_t>>(std::move(table));
  if (n <= kMaxCertifyDimension)
    out.monotone_certified = is_monotone_on_cube(n, [&](std::uint64_t x) { return out(x); });
  return out;
}

}  // namespace detail

/// Improper learner at eps/10, corrected on H^n_{eps/10} and extended by 1
/// above / 0 below the band. The evaluator is read out in full, so stage
/// failures surface here (and are retried) rather than at evaluation time.
inline LearnerOutput learn_monotone_proper(std::span<const Sample> samples, unsigned n, double eps,
                                           std::uint64_t master_seed,
                                           const LowDegreeConfig& lcfg = {},
                                           const SorterConfig& scfg = {}) {
  return detail::learn_monotone(samples, n, eps, master_seed, false, lcfg, scfg);
}

inline LearnerOutput learn_monotone_agnostic(std::span<const Sample> samples, unsigned n,
                                             double eps, std::uint64_t master_seed,
                                             const LowDegreeConfig& lcfg = {},
                                             const SorterConfig& scfg = {}) {
  return detail::learn_monotone(samples, n, eps, master_seed, true, lcfg, scfg);
}

}  // namespace poset_lca
