#pragma once

#include "qi/conic.hpp"
#include "qi/assemblage.hpp"
#include "qi/random.hpp"

namespace qi {

/// States sigma_{a|x} that one party steers the other into, with uniform
/// setting weights. Consistency: each setting sums to the same reduced state.
class SteeringAssemblage {
 public:
  SteeringAssemblage() = default;
  SteeringAssemblage(std::vector<std::vector<CMat>> sigma, double tol = 1e-9);

  int dim() const { return static_cast<int>(rho_b_.rows()); }
  int settings() const { return static_cast<int>(sigma_.size()); }
  int outcomes(int x) const { return static_cast<int>(sigma_[static_cast<size_t>(x)].size()); }
  const CMat& state(int x, int a) const { return sigma_[static_cast<size_t>(x)][static_cast<size_t>(a)]; }
  const CMat& reduced_state() const { return rho_b_; }
  std::vector<int> outcome_counts() const;

  SteeringAssemblage restrict(const std::vector<int>& subset) const;

 private:
  std::vector<std::vector<CMat>> sigma_;
  CMat rho_b_;
};

/// Ordered-list concatenation; all parts must share the reduced state.
SteeringAssemblage concat(const SteeringAssemblage& a, const SteeringAssemblage& b);

/// sigma_{a|x} = Tr_A[(M_{a|x} (x) 1) rho] for a bipartite state rho with the
/// measured party first.
SteeringAssemblage steer_from_state(const HermitianOperator& state,
                                    const WeightedAssemblage& m);

struct SteeringReport {
  double value = 0.0;
  std::vector<CMat> sigma_lambda;  // hidden-state ensemble of the optimum
  SteeringAssemblage closest;      // consistent unsteerable approximation
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double gap = 0.0;
};

/// Consistent steering distance: minimal average trace distance to an
/// assemblage with a local hidden state model sharing the reduced state.
SteeringReport steering_distance(const SteeringAssemblage& sa,
                                 const conic::SolverOptions& opt = {},
                                 std::int64_t cap = kStrategyCap);

/// Bipartite conditional distribution q(a,b|x,y) with uniform input weights.
class BehaviorTable {
 public:
  BehaviorTable() = default;
  /// q[x][y](a, b); validated nonnegative, normalized, non-signaling.
  explicit BehaviorTable(std::vector<std::vector<RMat>> q, double tol = 1e-9);

  int settings_a() const { return static_cast<int>(q_.size()); }
  int settings_b() const { return q_.empty() ? 0 : static_cast<int>(q_[0].size()); }
  int outcomes_a(int x) const { return static_cast<int>(q_[static_cast<size_t>(x)][0].rows()); }
  int outcomes_b(int y) const { return static_cast<int>(q_[0][static_cast<size_t>(y)].cols()); }
  double prob(int a, int b, int x, int y) const {
    return q_[static_cast<size_t>(x)][static_cast<size_t>(y)](a, b);
  }
  const RMat& table(int x, int y) const { return q_[static_cast<size_t>(x)][static_cast<size_t>(y)]; }
  double marginal_a(int a, int x) const;
  double marginal_b(int b, int y) const;

  BehaviorTable restrict_a(const std::vector<int>& subset) const;

 private:
  std::vector<std::vector<RMat>> q_;
};

/// Concatenation of the first party's settings.
BehaviorTable concat_a(const BehaviorTable& a, const BehaviorTable& b);

BehaviorTable behavior_from_quantum(const HermitianOperator& state,
                                    const WeightedAssemblage& alice,
                                    const WeightedAssemblage& bob);

struct NonlocalityReport {
  double value = 0.0;
  BehaviorTable closest;  // consistent local approximation
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double gap = 0.0;
};

/// Consistent local trace distance: LP over mixtures of product deterministic
/// strategies whose single-party marginals match the behavior.
NonlocalityReport nonlocality_distance(const BehaviorTable& q,
                                       const conic::SolverOptions& opt = {},
                                       std::int64_t cap = kStrategyCap);

struct ChshValues {
  double chsh_12 = 0.0;
  double chsh_13 = 0.0;
  double chsh_23 = 0.0;
  double average = 0.0;
};

/// The three pairwise CHSH functionals of three observables against two, and
/// their mean. Observables must be Hermitian with spectrum in [-1, 1].
ChshValues chsh_values(const HermitianOperator& state,
                       const std::vector<CMat>& alice_obs,
                       const std::vector<CMat>& bob_obs);

struct ChshSearchResult {
  double best_average = 0.0;
  CMat state;                  // two-qubit density matrix
  std::vector<CMat> alice_obs;
  std::vector<CMat> bob_obs;
  ChshValues values;
};

/// Alternating eigenvector/sign-operator ascent on the averaged CHSH
/// functional over two-qubit states and dichotomic observables.
ChshSearchResult maximize_avg_chsh(std::uint64_t seed, int restarts = 20);

/// Same ascent for a single pair; the optimum is the Tsirelson bound.
ChshSearchResult maximize_single_chsh(std::uint64_t seed, int restarts = 20);

/// Maximum of a correlator functional sum_{i,j} coeff(i,j) <A_i B_j> over all
/// non-signaling behaviors with dichotomic outcomes, by linear programming.
double ns_correlator_bound(const RMat& coeff, const conic::SolverOptions& opt = {});

}  // namespace qi
