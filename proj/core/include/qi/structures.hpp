#pragma once

#include "qi/incompat.hpp"

namespace qi {

/// Effect of adding one measurement to an assemblage, with the two upper
/// bounds that cap the gain: the concatenation N of the closest jointly
/// measurable subset approximations and the concatenation G of their parent
/// POVMs.
struct GainReport {
  double i_before = 0.0;
  double i_after = 0.0;
  double delta = 0.0;  // i_after - i_before
  WeightedAssemblage n_assemblage;
  double i_n = 0.0;
  WeightedAssemblage g_assemblage;
  double i_g = 0.0;
  /// I of the original subset dominates every other same-size subset.
  bool hypothesis_holds = false;
  double slack_n = 0.0;  // i_n - delta
  double slack_g = 0.0;  // i_g - i_n
};

/// Gain from upgrading `base` (m settings) to concat(base, added), all with
/// uniform weights. N concatenates the closest jointly measurable
/// approximations of all m-subsets of the upgraded assemblage; G
/// concatenates their parent POVMs.
GainReport incompatibility_gain(const WeightedAssemblage& base, const Povm& added,
                                const conic::SolverOptions& opt = {});

struct Result1Report {
  std::vector<int> permutation;  // applied so the most incompatible pair is (1,2)
  GainReport gain;
};

/// Verifies delta <= I(N) <= I(G) for a three-measurement assemblage,
/// permuting settings so the most incompatible pair comes first.
Result1Report check_result1(const WeightedAssemblage& m3,
                            const conic::SolverOptions& opt = {});

struct SubsetBoundsReport {
  double i_total = 0.0;
  double i_subset = 0.0;     // I of the restriction to C
  double i_spliced = 0.0;    // I of the assemblage with C replaced by its closest JM
  double lower_slack = 0.0;  // i_total - (|C|/m) i_subset
  double upper_slack = 0.0;  // (|C|/m) i_subset + i_spliced - i_total
  // Pair-average sandwich, only populated for m = 3:
  bool has_pair_sandwich = false;
  double pair_average = 0.0;
  double i_n = 0.0;
  double avg_lower_slack = 0.0;  // i_total - pair_average
  double avg_upper_slack = 0.0;  // pair_average + i_n - i_total
};

/// Subset sandwich (|C|/m) I(M_C) <= I(M) <= (|C|/m) I(M_C) + I(M^{#C});
/// for three uniformly weighted measurements also the pair-average bounds.
SubsetBoundsReport check_subset_bounds(const WeightedAssemblage& m,
                                       const std::vector<int>& c,
                                       const conic::SolverOptions& opt = {});

struct DecompositionReport {
  double i_total = 0.0;
  double i_gen = 0.0;     // distance to the hull of the three pair-compatible sets
  double i_pair = 0.0;    // distance from that hull point to the pairwise compatible set
  double i_hollow = 0.0;  // residual incompatibility of the pairwise compatible point
  WeightedAssemblage m_conv;
  WeightedAssemblage m_pair;
  double slack = 0.0;  // i_gen + i_pair + i_hollow - i_total
};

/// Splits the incompatibility of three measurements into genuine triplewise,
/// pairwise, and hollow contributions; their sum upper-bounds the total.
DecompositionReport decompose(const WeightedAssemblage& m3,
                              const conic::SolverOptions& opt = {});

/// Replace the settings listed in `c` by the closest jointly measurable
/// approximation of the restriction, keeping the remaining measurements and
/// all original weights.
WeightedAssemblage splice_closest_jm(const WeightedAssemblage& a,
                                     const std::vector<int>& c,
                                     const conic::SolverOptions& opt = {});

/// Reorder settings; perm[i] is the original index of new setting i.
WeightedAssemblage permute_settings(const WeightedAssemblage& a,
                                    const std::vector<int>& perm);

/// Conjugate every effect by a unitary, M -> U M U^dag.
WeightedAssemblage conjugate(const WeightedAssemblage& a, const CMat& unitary);

}  // namespace qi
