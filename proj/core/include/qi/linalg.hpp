#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qi {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Malformed user input: bad dimensions, non-finite entries, invalid ranges.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An optimization run that could not produce a usable answer.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hermiticity deviation above which construction is considered suspicious.
inline constexpr double kHermitianTol = 1e-12;

bool is_finite(const CMat& a);

/// Square complex matrix kept exactly Hermitian by symmetrizing (A + A^dag)/2
/// on construction. The original deviation is recorded in defect().
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(CMat a);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMat& mat() const { return mat_; }
  double defect() const { return defect_; }

 private:
  CMat mat_;
  double defect_ = 0.0;
};

HermitianOperator identity_op(int d);

/// Largest absolute eigenvalue.
double spectral_norm(const CMat& a);
double spectral_norm(const HermitianOperator& op);

/// Sum of absolute eigenvalues.
double trace_norm(const CMat& a);
double trace_norm(const HermitianOperator& op);

/// Trace out the first tensor factor of dimension dim_first.
CMat partial_trace_first(const CMat& a, int dim_first);
HermitianOperator partial_trace_first(const HermitianOperator& op, int dim_first);

/// Trace out the second tensor factor of dimension dim_second.
CMat partial_trace_second(const CMat& a, int dim_second);

/// Real-symmetric embedding [[R, -S], [S, R]] of H = R + iS. The embedding is
/// PSD iff H is PSD; its spectrum is that of H with doubled multiplicities.
RMat real_embed_psd(const HermitianOperator& op);

CMat kron(const CMat& a, const CMat& b);

double min_eigenvalue(const CMat& hermitian);
double max_eigenvalue(const CMat& hermitian);

/// Orthonormal basis {E_q} of the real vector space of d x d Hermitian
/// matrices, Re Tr[E_q E_r] = delta_qr. Ordering: diagonal units first, then
/// for each i < j the real and imaginary off-diagonal pair.
std::vector<CMat> hermitian_basis(int d);

inline CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace qi
