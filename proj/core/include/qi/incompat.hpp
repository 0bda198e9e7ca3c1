#pragma once

#include "qi/assemblage.hpp"
#include "qi/conic.hpp"

namespace qi {

/// Dual optimizer of the incompatibility program: a witness (C, rho, L) whose
/// objective sum_x p(x) <M_{a|x}, C_{a|x}> - Tr L lower-bounds the quantifier
/// for every assemblage sharing the scenario.
struct DualCertificate {
  std::vector<std::vector<CMat>> C;  // C[x][a], 0 <= C_{a|x} <= rho_x
  std::vector<CMat> rho;             // states, one per setting
  CMat L;                            // L >= sum_{a,x} p(x) v(a|x,l) C_{a|x} for all l
  double value = 0.0;

  /// Objective of (C, rho, L) against an arbitrary assemblage of the same
  /// scenario; feasibility makes this a lower bound on its incompatibility.
  double evaluate(const WeightedAssemblage& a) const;
  /// Worst constraint violation (negative eigenvalues, ordering defects).
  double feasibility_defect(const WeightedAssemblage& scenario,
                            std::int64_t cap = kStrategyCap) const;
};

struct IncompatReport {
  double value = 0.0;        // optimal cost, the incompatibility
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  WeightedAssemblage closest_jm;  // optimal jointly measurable proxy
  Povm parent;                    // parent POVM generating closest_jm
  DualCertificate certificate;
};

/// Distance (weighted diamond-norm) from the assemblage to the jointly
/// measurable set, by semidefinite programming over all parent POVMs.
IncompatReport incompatibility(const WeightedAssemblage& a,
                               const conic::SolverOptions& opt = {},
                               std::int64_t cap = kStrategyCap);

/// Diamond distance between the measure-and-prepare channels of two fixed
/// measurements on the same space. Outcome grids are padded with zero
/// effects when they differ.
double measurement_diamond_distance(const Povm& m, const Povm& n,
                                    const conic::SolverOptions& opt = {});

/// Weighted diamond distance sum_x p(x) D(M_x, N_x); settings must match.
double assemblage_diamond_distance(const WeightedAssemblage& a,
                                   const WeightedAssemblage& b,
                                   const conic::SolverOptions& opt = {});

/// Exact joint-measurability test via a feasibility phase: minimizes the
/// uniform noise t needed to admit a parent POVM and compares to tol.
bool is_jointly_measurable(const WeightedAssemblage& a, double tol = 1e-7,
                           const conic::SolverOptions& opt = {},
                           std::int64_t cap = kStrategyCap);

/// Closest jointly measurable assemblage of the restricted subset, weights
/// renormalized within the subset.
WeightedAssemblage closest_jm_subset(const WeightedAssemblage& a,
                                     const std::vector<int>& subset,
                                     const conic::SolverOptions& opt = {});

/// Rescale effects onto the PSD cone and renormalize their sum to identity;
/// for cleaning nearly-valid POVMs coming out of a numerical solver.
Povm sanitize_povm(int dim, const std::vector<CMat>& effects, double tol = 1e-6);

}  // namespace qi
