#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qi/linalg.hpp"
#include "qi/strategies.hpp"

namespace qi {

/// Tolerance for POVM validity checks (effect spectra and completeness).
inline constexpr double kPovmTol = 1e-9;

/// A positive operator-valued measure: effects 0 <= M_a <= 1 with sum = 1.
class Povm {
 public:
  Povm() = default;
  Povm(int dim, std::vector<HermitianOperator> effects, double tol = kPovmTol);

  int dim() const { return dim_; }
  int outcomes() const { return static_cast<int>(effects_.size()); }
  const HermitianOperator& effect(int a) const { return effects_[static_cast<size_t>(a)]; }
  const std::vector<HermitianOperator>& effects() const { return effects_; }

 private:
  int dim_ = 0;
  std::vector<HermitianOperator> effects_;
};

/// Projective measurement onto the columns of a unitary.
Povm projective_povm(const CMat& basis);

/// One-outcome measurement {1}.
Povm trivial_povm(int dim);

/// Ordered list of POVMs (setting index x) with an input distribution p(x).
class WeightedAssemblage {
 public:
  WeightedAssemblage() = default;
  WeightedAssemblage(std::vector<Povm> measurements, RVec weights);

  /// p(x) = 1/m convention from the uniform case.
  static WeightedAssemblage uniform(std::vector<Povm> measurements);

  int dim() const { return measurements_.empty() ? 0 : measurements_[0].dim(); }
  int settings() const { return static_cast<int>(measurements_.size()); }
  const Povm& measurement(int x) const { return measurements_[static_cast<size_t>(x)]; }
  const std::vector<Povm>& measurements() const { return measurements_; }
  const RVec& weights() const { return weights_; }
  double weight(int x) const { return weights_[x]; }
  const CMat& effect(int x, int a) const { return measurement(x).effect(a).mat(); }

  std::vector<int> outcome_counts() const;
  /// True when every weight is strictly positive (required by quantifiers).
  bool strictly_weighted() const;
  /// Keep only the listed settings, renormalizing their weights.
  WeightedAssemblage restrict(const std::vector<int>& subset) const;

 private:
  std::vector<Povm> measurements_;
  RVec weights_;
};

/// Classical simulation xi: mixing p(x|y), relabeling q(b|y,x,a), and the
/// derived output-setting weights q(y).
struct SimulationMap {
  RMat mixing;                         // (x, y) entry = p(x|y)
  std::vector<std::vector<RMat>> relabel;  // relabel[y][x](b, a) = q(b|y,x,a)
  RVec output_weights;                 // q(y)
};

/// Ordered-list concatenation; new weights (mix * p_a, (1-mix) * p_b).
WeightedAssemblage concat(const WeightedAssemblage& a, const WeightedAssemblage& b,
                          double mix);
/// Uniform default mix m_a / (m_a + m_b).
WeightedAssemblage concat(const WeightedAssemblage& a, const WeightedAssemblage& b);
WeightedAssemblage concat(const WeightedAssemblage& a, const Povm& added);

/// Duplicate each setting `copies[x]` times, dividing its weight evenly.
WeightedAssemblage split(const WeightedAssemblage& a, const std::vector<int>& copies);
WeightedAssemblage split(const WeightedAssemblage& a, int copies);

WeightedAssemblage simulate(const WeightedAssemblage& a, const SimulationMap& map);

/// M^eta_{a|x} = eta M_{a|x} + (1-eta) Tr[M_{a|x}] 1/d.
WeightedAssemblage depolarize(const WeightedAssemblage& a, double eta);
Povm depolarize(const Povm& p, double eta);

/// Assemblage simulated from a single parent POVM via deterministic responses;
/// jointly measurable by construction.
WeightedAssemblage parent_povm_simulation(const Povm& parent,
                                          const DeterministicStrategySet& strategies);

std::string assemblage_to_json(const WeightedAssemblage& a);
WeightedAssemblage assemblage_from_json(const std::string& text);

}  // namespace qi
