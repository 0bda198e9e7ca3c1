#pragma once

#include "qi/assemblage.hpp"

namespace qi {

bool is_prime(int n);

/// Family of mutually unbiased bases in prime dimension, ordered as the
/// eigenbases of the shift/clock operators X, Z, XZ, XZ^2, ..., XZ^{d-1}.
struct MubFamily {
  int d = 0;
  int m = 0;
  std::vector<CMat> bases;  // columns are the basis vectors

  CMat projector(int x, int a) const;
};

/// First m bases of the full family; 2 <= m <= d+1, d prime. Eigenvector
/// phases fixed so the first nonzero component is real positive, eigenvalues
/// sorted by phase angle.
MubFamily build_mub(int d, int m);

/// Projective measurement assemblage of the family, uniformly weighted,
/// optionally depolarized.
WeightedAssemblage mub_assemblage(const MubFamily& fam, double eta = 1.0);

/// T = max over deterministic strategies of || sum_x Pi_{lambda(x)|x} ||_inf,
/// by exact enumeration.
double compute_T(const MubFamily& fam, std::int64_t cap = kStrategyCap);

struct RobustnessData {
  int d = 0;
  int m = 0;
  double T = 0;
  double eta_star = 0;
  /// True when m is 2, d, or d+1, where eta_star = (dT-m)/(dm-m) is proven.
  bool closed_form = false;
};

RobustnessData white_noise_robustness(const MubFamily& fam,
                                      std::int64_t cap = kStrategyCap);

/// max(0, ((d-1)/d) (eta - eta*_m)); requires m in {2, d, d+1}.
double analytic_incompatibility(const MubFamily& fam, double eta);

}  // namespace qi
