#pragma once

#include <cstdint>
#include <vector>

#include "qi/linalg.hpp"

namespace qi {

/// Default cap on the number of enumerated deterministic strategies.
inline constexpr std::int64_t kStrategyCap = 1'000'000;

/// All deterministic response functions lambda: setting x -> outcome a, for a
/// scenario with per-setting outcome counts o(x). |Lambda| = prod_x o(x).
/// Strategies are indexed mixed-radix with setting 0 as the fastest digit.
class DeterministicStrategySet {
 public:
  explicit DeterministicStrategySet(std::vector<int> outcome_counts,
                                    std::int64_t cap = kStrategyCap);

  std::int64_t size() const { return size_; }
  int settings() const { return static_cast<int>(outcomes_.size()); }
  int outcome_count(int x) const { return outcomes_[static_cast<size_t>(x)]; }
  const std::vector<int>& outcome_counts() const { return outcomes_; }

  /// lambda(x): outcome assigned to setting x by strategy lambda.
  int outcome(std::int64_t lambda, int x) const {
    return static_cast<int>((lambda / stride_[static_cast<size_t>(x)]) %
                            outcomes_[static_cast<size_t>(x)]);
  }

  /// v(a|x,lambda)
  bool responds(int a, int x, std::int64_t lambda) const {
    return outcome(lambda, x) == a;
  }

 private:
  std::vector<int> outcomes_;
  std::vector<std::int64_t> stride_;
  std::int64_t size_ = 0;
};

}  // namespace qi
