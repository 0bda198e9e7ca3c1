#include "qi/linalg.hpp"

namespace qi {

bool is_finite(const CMat& a) {
  return a.allFinite();
}

HermitianOperator::HermitianOperator(CMat a) {
  if (a.rows() != a.cols()) {
    throw InputError("HermitianOperator: matrix must be square, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (a.rows() == 0) throw InputError("HermitianOperator: empty matrix");
  if (!is_finite(a)) throw InputError("HermitianOperator: non-finite entries");
  defect_ = (a - a.adjoint()).cwiseAbs().maxCoeff();
  mat_ = 0.5 * (a + a.adjoint());
}

HermitianOperator identity_op(int d) {
  return HermitianOperator(CMat::Identity(d, d));
}

static Eigen::SelfAdjointEigenSolver<CMat> eigs(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a));
  if (es.info() != Eigen::Success) throw SolverError("eigendecomposition failed");
  return es;
}

double spectral_norm(const CMat& a) {
  if (!is_finite(a)) throw InputError("spectral_norm: non-finite entries");
  return eigs(a).eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const HermitianOperator& op) { return spectral_norm(op.mat()); }

double trace_norm(const CMat& a) {
  if (!is_finite(a)) throw InputError("trace_norm: non-finite entries");
  return eigs(a).eigenvalues().cwiseAbs().sum();
}

double trace_norm(const HermitianOperator& op) { return trace_norm(op.mat()); }

CMat partial_trace_first(const CMat& a, int dim_first) {
  const int n = static_cast<int>(a.rows());
  if (dim_first <= 0 || n % dim_first != 0) {
    throw InputError("partial_trace_first: dimension " + std::to_string(n) +
                     " not divisible by " + std::to_string(dim_first));
  }
  const int d2 = n / dim_first;
  CMat out = CMat::Zero(d2, d2);
  for (int k = 0; k < dim_first; ++k) {
    out += a.block(k * d2, k * d2, d2, d2);
  }
  return out;
}

HermitianOperator partial_trace_first(const HermitianOperator& op, int dim_first) {
  return HermitianOperator(partial_trace_first(op.mat(), dim_first));
}

CMat partial_trace_second(const CMat& a, int dim_second) {
  const int n = static_cast<int>(a.rows());
  if (dim_second <= 0 || n % dim_second != 0) {
    throw InputError("partial_trace_second: dimension " + std::to_string(n) +
                     " not divisible by " + std::to_string(dim_second));
  }
  const int d1 = n / dim_second;
  CMat out = CMat::Zero(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < dim_second; ++k)
        out(i, j) += a(i * dim_second + k, j * dim_second + k);
  return out;
}

RMat real_embed_psd(const HermitianOperator& op) {
  const int d = op.dim();
  RMat r = op.mat().real();
  RMat s = op.mat().imag();
  RMat out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = r;
  out.topRightCorner(d, d) = -s;
  out.bottomLeftCorner(d, d) = s;
  out.bottomRightCorner(d, d) = r;
  return out;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double min_eigenvalue(const CMat& hermitian) {
  return eigs(hermitian).eigenvalues().minCoeff();
}

double max_eigenvalue(const CMat& hermitian) {
  return eigs(hermitian).eigenvalues().maxCoeff();
}

std::vector<CMat> hermitian_basis(int d) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<CMat> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    CMat e = CMat::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      CMat re = CMat::Zero(d, d);
      re(i, j) = inv_sqrt2;
      re(j, i) = inv_sqrt2;
      basis.push_back(re);
      CMat im = CMat::Zero(d, d);
      im(i, j) = Complex(0, inv_sqrt2);
      im(j, i) = Complex(0, -inv_sqrt2);
      basis.push_back(im);
    }
  }
  return basis;
}

}  // namespace qi
