#include "qi/strategies.hpp"

namespace qi {

DeterministicStrategySet::DeterministicStrategySet(std::vector<int> outcome_counts,
                                                  std::int64_t cap)
    : outcomes_(std::move(outcome_counts)) {
  if (outcomes_.empty()) throw InputError("strategy set: no settings");
  stride_.resize(outcomes_.size());
  std::int64_t n = 1;
  for (size_t x = 0; x < outcomes_.size(); ++x) {
    if (outcomes_[x] < 1) throw InputError("strategy set: outcome count must be >= 1");
    stride_[x] = n;
    if (n > cap / outcomes_[x]) n = cap + 1;  // saturate, avoid overflow
    else n *= outcomes_[x];
    if (n > cap) {
      throw InputError(
          "strategy enumeration refused: number of deterministic strategies "
          "exceeds cap of " + std::to_string(cap));
    }
  }
  size_ = n;
}

}  // namespace qi
