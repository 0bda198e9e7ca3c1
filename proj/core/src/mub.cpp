#include "qi/mub.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qi {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

CMat MubFamily::projector(int x, int a) const {
  const auto& b = bases[static_cast<size_t>(x)];
  return b.col(a) * b.col(a).adjoint();
}

namespace {

// Columns of u are eigenvectors of a unitary with distinct eigenvalues.
// Sort by eigenvalue phase in [0, 2pi) and make the first nonzero component
// of each vector real positive, so the construction is deterministic.
CMat canonical_eigenbasis(const CMat& op) {
  const int d = static_cast<int>(op.rows());
  Eigen::ComplexEigenSolver<CMat> es(op);
  if (es.info() != Eigen::Success) throw SolverError("mub: eigensolver failed");
  std::vector<int> order(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) order[static_cast<size_t>(i)] = i;
  auto phase = [&](int i) {
    double ph = std::arg(es.eigenvalues()[i]);
    if (ph < -1e-9) ph += 2 * std::numbers::pi;
    return ph;
  };
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return phase(i) < phase(j); });
  CMat basis(d, d);
  for (int a = 0; a < d; ++a) {
    CVec v = es.eigenvectors().col(order[static_cast<size_t>(a)]);
    int lead = 0;
    while (lead < d - 1 && std::abs(v[lead]) < 1e-9) ++lead;
    v *= std::conj(v[lead]) / std::abs(v[lead]);
    basis.col(a) = v / v.norm();
  }
  return basis;
}

}  // namespace

MubFamily build_mub(int d, int m) {
  if (!is_prime(d)) throw InputError("build_mub: dimension must be prime");
  if (m < 2 || m > d + 1) throw InputError("build_mub: need 2 <= m <= d+1");

  const Complex omega = std::exp(Complex(0, 2 * std::numbers::pi / d));
  CMat shift = CMat::Zero(d, d);   // X |j> = |j+1 mod d>
  CMat clock = CMat::Zero(d, d);   // Z |j> = omega^j |j>
  for (int j = 0; j < d; ++j) {
    shift((j + 1) % d, j) = 1.0;
    clock(j, j) = std::pow(omega, j);
  }

  MubFamily fam;
  fam.d = d;
  fam.m = m;
  CMat op = shift;  // X, Z, XZ, XZ^2, ..., XZ^{d-1}
  for (int x = 0; x < m; ++x) {
    fam.bases.push_back(canonical_eigenbasis(op));
    if (x == 0) op = clock;
    else if (x == 1) op = shift * clock;
    else op = op * clock;
  }

  // Mutual unbiasedness: |<a|b>|^2 = 1/d across distinct bases.
  for (size_t x = 0; x + 1 < fam.bases.size(); ++x) {
    for (size_t y = x + 1; y < fam.bases.size(); ++y) {
      CMat overlaps = fam.bases[x].adjoint() * fam.bases[y];
      if ((overlaps.cwiseAbs2().array() - 1.0 / d).abs().maxCoeff() > 1e-10) {
        throw SolverError("build_mub: bases fail the unbiasedness check");
      }
    }
  }
  return fam;
}

WeightedAssemblage mub_assemblage(const MubFamily& fam, double eta) {
  std::vector<Povm> ms;
  for (const auto& b : fam.bases) ms.push_back(projective_povm(b));
  WeightedAssemblage a = WeightedAssemblage::uniform(std::move(ms));
  return (eta == 1.0) ? a : depolarize(a, eta);
}

double compute_T(const MubFamily& fam, std::int64_t cap) {
  DeterministicStrategySet strategies(
      std::vector<int>(static_cast<size_t>(fam.m), fam.d), cap);
  double best = 0;
  for (std::int64_t lam = 0; lam < strategies.size(); ++lam) {
    CMat sum = CMat::Zero(fam.d, fam.d);
    for (int x = 0; x < fam.m; ++x) sum += fam.projector(x, strategies.outcome(lam, x));
    best = std::max(best, max_eigenvalue(sum));
  }
  return best;
}

RobustnessData white_noise_robustness(const MubFamily& fam, std::int64_t cap) {
  RobustnessData r;
  r.d = fam.d;
  r.m = fam.m;
  r.T = compute_T(fam, cap);
  r.closed_form = (fam.m == 2 || fam.m == fam.d || fam.m == fam.d + 1);
  r.eta_star = (fam.d * r.T - fam.m) / (fam.d * fam.m - fam.m);
  return r;
}

double analytic_incompatibility(const MubFamily& fam, double eta) {
  RobustnessData r = white_noise_robustness(fam);
  if (!r.closed_form) {
    throw InputError(
        "analytic_incompatibility: closed form requires m in {2, d, d+1}");
  }
  const double d = fam.d;
  return std::max(0.0, (d - 1) / d * (eta - r.eta_star));
}

}  // namespace qi
