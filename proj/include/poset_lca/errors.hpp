#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poset_lca {

/// Hasse edge list contains a directed cycle.
class CycleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hasse edge is implied by a longer path (or duplicated).
class RedundantEdgeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Instance exceeds the configured memory / enumeration budget.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class UnknownEdge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The undecided component around a queried vertex outgrew the cap. This is
/// the MIS LCA's failure event for the current tape.
class ComponentTooLarge : public std::runtime_error {
 public:
  ComponentTooLarge(std::size_t size, std::size_t cap)
      : std::runtime_error("undecided component exceeds cap (" + std::to_string(size) + " > " +
                           std::to_string(cap) + ")"),
        size_(size),
        cap_(cap) {}

  std::size_t size() const noexcept { return size_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t size_;
  std::size_t cap_;
};

/// A sorter stage's matching LCA failed for the current master seed.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::size_t stage, const std::string& why)
      : std::runtime_error("stage " + std::to_string(stage) + " failed: " + why), stage_(stage) {}

  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

class InsufficientSamples : public std::invalid_argument {
 public:
  InsufficientSamples(std::size_t have, std::size_t need)
      : std::invalid_argument("learner needs " + std::to_string(need) + " samples, got " +
                              std::to_string(have)),
        have_(have),
        need_(need) {}

  std::size_t have() const noexcept { return have_; }
  std::size_t need() const noexcept { return need_; }

 private:
  std::size_t have_;
  std::size_t need_;
};

}  // namespace poset_lca
