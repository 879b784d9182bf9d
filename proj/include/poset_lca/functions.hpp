#pragma once

// Named labelings: majority | parity | threshold:k | random:p, all evaluated
// on rank(x) (Hamming weight on cube families), plus a few cube functions
// used as tester targets.

#include <bit>
#include <charconv>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "poset.hpp"
#include "random_tape.hpp"

namespace poset_lca {

struct FunctionSpec {
  enum class Kind { majority, parity, threshold, random };
  Kind kind = Kind::majority;
  unsigned k = 0;   // threshold:k
  double p = 0.5;   // random:p
  std::string text;
};

inline FunctionSpec parse_function_spec(const std::string& text) {
  FunctionSpec s;
  s.text = text;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw std::invalid_argument("function '" + head + "' needs an argument");
  };
  if (head == "majority" && arg.empty()) {
    s.kind = FunctionSpec::Kind::majority;
  } else if (head == "parity" && arg.empty()) {
    s.kind = FunctionSpec::Kind::parity;
  } else if (head == "threshold") {
    need_arg();
    s.kind = FunctionSpec::Kind::threshold;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), s.k);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
      throw std::invalid_argument("bad threshold '" + arg + "'");
  } else if (head == "random") {
    need_arg();
    s.kind = FunctionSpec::Kind::random;
    std::size_t used = 0;
    s.p = std::stod(arg, &used);
    if (used != arg.size() || s.p < 0 || s.p > 1)
      throw std::invalid_argument("random:p needs 0 <= p <= 1");
  } else {
    throw std::invalid_argument("unknown function spec '" + text + "'");
  }
  return s;
}

/// Bit for an element of the given rank; `scale` is n on cube families and
/// the height otherwise. Majority is rank > scale/2, ties to 0. `key` feeds
/// random:p.
inline bool eval_spec(const FunctionSpec& s, unsigned rank, unsigned scale, std::uint64_t key,
                      std::uint64_t seed) {
  switch (s.kind) {
    case FunctionSpec::Kind::majority: return 2 * rank > scale;
    case FunctionSpec::Kind::parity: return rank % 2 == 1;
    case FunctionSpec::Kind::threshold: return rank >= s.k;
    case FunctionSpec::Kind::random:
      return double(hash_combine(seed, key) >> 11) * 0x1.0p-53 < s.p;
  }
  return false;
}

/// Labeling of a poset's elements.
template <PosetLike P>
std::function<bool(Element)> poset_function(const P& poset, const FunctionSpec& s,
                                            std::uint64_t seed = 0) {
  unsigned scale = static_cast<unsigned>(poset.height());
  if constexpr (requires { poset.dimension().value_or(0u); }) {
    scale = poset.dimension().value_or(scale);
  } else if constexpr (requires { unsigned(poset.dimension()); }) {
    scale = poset.dimension();
  }
  // random:p keys on the cube point when there is one, so a truncated band
  // sees the same bits as the full cube
  return [&poset, s, scale, seed](Element x) {
    std::uint64_t key = x;
    if constexpr (requires { poset.point(x); }) key = poset.point(x);
    return eval_spec(s, poset.rank(x), scale, key, seed);
  };
}

/// Function on {0,1}^n points.
inline std::function<bool(std::uint64_t)> cube_function(unsigned n, const FunctionSpec& s,
                                                        std::uint64_t seed = 0) {
  return [n, s, seed](std::uint64_t x) {
    return eval_spec(s, static_cast<unsigned>(std::popcount(x)), n, x, seed);
  };
}

/// sum_i w_i x_i >= theta; monotone whenever all weights are nonnegative.
inline std::function<bool(std::uint64_t)> linear_threshold(std::vector<double> weights,
                                                           double theta) {
  return [w = std::move(weights), theta](std::uint64_t x) {
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (x >> i & 1u) s += w[i];
    return s >= theta;
  };
}

/// Positive weights in [1, 2) and a threshold near half the total weight.
inline std::function<bool(std::uint64_t)> random_monotone_threshold(unsigned n,
                                                                    std::uint64_t seed) {
  std::vector<double> w(n);
  double total = 0;
  for (unsigned i = 0; i < n; ++i) {
    w[i] = 1.0 + double(hash_combine(seed, i) >> 11) * 0x1.0p-53;
    total += w[i];
  }
  const double shift = (double(hash_combine(seed, n) >> 11) * 0x1.0p-53 - 0.5) * 0.2;
  return linear_threshold(std::move(w), total * (0.5 + shift));
}

/// 1 - x_i.
inline std::function<bool(std::uint64_t)> anti_dictator(unsigned i) {
  return [i](std::uint64_t x) { return !(x >> i & 1u); };
}

inline std::function<bool(std::uint64_t)> negation(std::function<bool(std::uint64_t)> f) {
  return [f = std::move(f)](std::uint64_t x) { return !f(x); };
}

}  // namespace poset_lca
