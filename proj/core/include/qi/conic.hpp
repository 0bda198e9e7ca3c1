#pragma once

#include <string>
#include <vector>

#include "qi/linalg.hpp"

namespace qi::conic {

/// Linear conic program in standard primal form over a product of complex
/// Hermitian PSD cones and nonnegative orthants:
///
///   min  sum_b <C_b, X_b>     (<A, B> = Re Tr[A^dag B], dot product on vecs)
///   s.t. sum_b <A_ib, X_b> = rhs_i   for each constraint i
///        X_b in cone(b)
///
/// Coefficient matrices are hermitized on entry.
class Program {
 public:
  struct PsdTerm {
    int block;
    CMat coeff;
  };
  struct VecTerm {
    int block;
    RVec coeff;
  };
  struct Constraint {
    std::vector<PsdTerm> psd;
    std::vector<VecTerm> vec;
    double rhs = 0.0;
  };

  int add_psd_block(int dim);
  int add_vec_block(int dim);

  void add_psd_objective(int block, const CMat& c);
  void add_vec_objective(int block, const RVec& c);
  int add_constraint(Constraint con);

  int psd_count() const { return static_cast<int>(psd_dims_.size()); }
  int vec_count() const { return static_cast<int>(vec_dims_.size()); }
  int psd_dim(int b) const { return psd_dims_[static_cast<size_t>(b)]; }
  int vec_dim(int b) const { return vec_dims_[static_cast<size_t>(b)]; }
  int rows() const { return static_cast<int>(constraints_.size()); }
  const CMat& psd_objective(int b) const { return c_psd_[static_cast<size_t>(b)]; }
  const RVec& vec_objective(int b) const { return c_vec_[static_cast<size_t>(b)]; }
  const Constraint& constraint(int i) const { return constraints_[static_cast<size_t>(i)]; }

 private:
  std::vector<int> psd_dims_;
  std::vector<int> vec_dims_;
  std::vector<CMat> c_psd_;
  std::vector<RVec> c_vec_;
  std::vector<Constraint> constraints_;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::vector<CMat> x_psd;
  std::vector<RVec> x_vec;
  RVec y;               // dual multipliers, one per constraint row
  std::vector<CMat> s_psd;
  std::vector<RVec> s_vec;

  bool ok() const { return status == SolveStatus::Optimal; }
};

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 200;
  bool verbose = false;
};

/// Primal-dual path-following interior-point method with Nesterov-Todd
/// scaling and a Mehrotra predictor-corrector step. Intended for the small
/// dense programs this library produces; every block is treated as dense.
Solution solve(const Program& p, const SolverOptions& opt = {});

/// Mechanical dual of `p`, again in standard primal form: free multipliers
/// are split into nonnegative pairs and each cone gets a slack block. The
/// optimal values satisfy opt(dual) = -opt(primal).
Program dualize(const Program& p);

/// Human-readable dump of block sizes, objectives, and constraint triplets,
/// for debugging.
std::string dump_program(const Program& p);

}  // namespace qi::conic
