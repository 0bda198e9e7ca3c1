#include "qi/incompat.hpp"

#include <cmath>

namespace qi {

namespace {

// Re <(E^{(aa)})^T, B> picks the (a,a) outcome-diagonal d x d sub-block of a
// Hermitian E on C^o (x) C^d, transposed to match the channel form.
CMat diag_subblock_t(const CMat& e, int a, int d) {
  return e.block(a * d, a * d, d, d).transpose();
}

double rinner(const CMat& a, const CMat& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

Eigen::Index check_solved(const conic::Solution& sol, const char* what) {
  if (sol.status != conic::SolveStatus::Optimal) {
    throw SolverError(std::string(what) + ": conic solve ended with status " +
                      conic::to_string(sol.status));
  }
  return 0;
}

}  // namespace

double DualCertificate::evaluate(const WeightedAssemblage& a) const {
  if (C.size() != static_cast<size_t>(a.settings())) {
    throw InputError("certificate evaluate: setting count mismatch");
  }
  double v = -L.trace().real();
  for (int x = 0; x < a.settings(); ++x) {
    const auto& cx = C[static_cast<size_t>(x)];
    if (cx.size() != static_cast<size_t>(a.measurement(x).outcomes())) {
      throw InputError("certificate evaluate: outcome count mismatch");
    }
    for (size_t o = 0; o < cx.size(); ++o) {
      v += a.weight(x) * rinner(a.effect(x, static_cast<int>(o)), cx[o]);
    }
  }
  return v;
}

double DualCertificate::feasibility_defect(const WeightedAssemblage& scenario,
                                           std::int64_t cap) const {
  double defect = 0;
  const int m = scenario.settings();
  for (int x = 0; x < m; ++x) {
    const CMat& r = rho[static_cast<size_t>(x)];
    defect = std::max(defect, -min_eigenvalue(r));
    defect = std::max(defect, std::abs(r.trace().real() - 1.0));
    for (const auto& cax : C[static_cast<size_t>(x)]) {
      defect = std::max(defect, -min_eigenvalue(cax));
      defect = std::max(defect, -min_eigenvalue(r - cax));
    }
  }
  DeterministicStrategySet strategies(scenario.outcome_counts(), cap);
  for (std::int64_t lam = 0; lam < strategies.size(); ++lam) {
    CMat sum = CMat::Zero(scenario.dim(), scenario.dim());
    for (int x = 0; x < m; ++x) {
      sum += scenario.weight(x) *
             C[static_cast<size_t>(x)][static_cast<size_t>(strategies.outcome(lam, x))];
    }
    defect = std::max(defect, max_eigenvalue(CMat(sum - L)));
  }
  return defect;
}

Povm sanitize_povm(int dim, const std::vector<CMat>& effects, double tol) {
  CMat sum = CMat::Zero(dim, dim);
  std::vector<CMat> clipped;
  for (const auto& e : effects) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(e));
    if (es.eigenvalues().minCoeff() < -tol) {
      throw SolverError("sanitize_povm: effect far outside the PSD cone");
    }
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    CMat c = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    sum += c;
    clipped.push_back(std::move(c));
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(sum);
  if (es.eigenvalues().minCoeff() < 0.5) {
    throw SolverError("sanitize_povm: effect sum strays far from identity");
  }
  CMat half_inv = es.eigenvectors() *
                  es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().adjoint();
  std::vector<HermitianOperator> out;
  for (const auto& c : clipped) out.emplace_back((half_inv * c * half_inv).eval());
  return Povm(dim, std::move(out), 1e-7);
}

IncompatReport incompatibility(const WeightedAssemblage& a,
                               const conic::SolverOptions& opt,
                               std::int64_t cap) {
  if (!a.strictly_weighted()) {
    throw InputError("incompatibility: every setting needs positive weight");
  }
  const int d = a.dim();
  const int m = a.settings();
  DeterministicStrategySet strategies(a.outcome_counts(), cap);
  const std::int64_t n_lam = strategies.size();

  conic::Program p;
  const int blk_a = p.add_vec_block(m);
  std::vector<int> blk_z(static_cast<size_t>(m)), blk_s1(static_cast<size_t>(m)),
      blk_s2(static_cast<size_t>(m));
  for (int x = 0; x < m; ++x) {
    const int od = a.measurement(x).outcomes() * d;
    blk_z[static_cast<size_t>(x)] = p.add_psd_block(od);
    blk_s1[static_cast<size_t>(x)] = p.add_psd_block(od);
    blk_s2[static_cast<size_t>(x)] = p.add_psd_block(d);
  }
  std::vector<int> blk_g;
  for (std::int64_t l = 0; l < n_lam; ++l)
    blk_g.push_back(p.add_psd_block(d));
  p.add_vec_objective(blk_a, a.weights());

  const auto small_basis = hermitian_basis(d);
  std::vector<int> rows_a_start(static_cast<size_t>(m)), rows_b_start(static_cast<size_t>(m));

  // (A) Z_x - S1_x - sum_a |a><a| (x) (M - F)^T = 0, with F_{a|x} the parent
  // marginal sum_l v(a|x,l) G_l, expanded over a Hermitian basis.
  for (int x = 0; x < m; ++x) {
    const int o = a.measurement(x).outcomes();
    const auto big_basis = hermitian_basis(o * d);
    rows_a_start[static_cast<size_t>(x)] = p.rows();
    for (const auto& e : big_basis) {
      conic::Program::Constraint con;
      con.psd.push_back({blk_z[static_cast<size_t>(x)], e});
      con.psd.push_back({blk_s1[static_cast<size_t>(x)], -e});
      std::vector<CMat> sub(static_cast<size_t>(o));
      std::vector<bool> nonzero(static_cast<size_t>(o));
      double rhs = 0;
      for (int aa = 0; aa < o; ++aa) {
        sub[static_cast<size_t>(aa)] = diag_subblock_t(e, aa, d);
        nonzero[static_cast<size_t>(aa)] =
            sub[static_cast<size_t>(aa)].cwiseAbs().maxCoeff() > 0;
        if (nonzero[static_cast<size_t>(aa)]) {
          rhs += rinner(sub[static_cast<size_t>(aa)], a.effect(x, aa));
        }
      }
      for (std::int64_t l = 0; l < n_lam; ++l) {
        const int aa = strategies.outcome(l, x);
        if (nonzero[static_cast<size_t>(aa)]) {
          con.psd.push_back({blk_g[static_cast<size_t>(l)], sub[static_cast<size_t>(aa)]});
        }
      }
      con.rhs = rhs;
      p.add_constraint(std::move(con));
    }
  }
  // (B) a_x 1 - Tr_out[Z_x] - S2_x = 0.
  for (int x = 0; x < m; ++x) {
    const int o = a.measurement(x).outcomes();
    rows_b_start[static_cast<size_t>(x)] = p.rows();
    for (const auto& e : small_basis) {
      conic::Program::Constraint con;
      RVec coeff = RVec::Zero(m);
      coeff[x] = e.trace().real();
      if (coeff[x] != 0) con.vec.push_back({blk_a, coeff});
      con.psd.push_back({blk_z[static_cast<size_t>(x)],
                         -kron(CMat::Identity(o, o), e)});
      con.psd.push_back({blk_s2[static_cast<size_t>(x)], -e});
      con.rhs = 0;
      p.add_constraint(std::move(con));
    }
  }
  // (C) sum_l G_l = 1.
  const int rows_c_start = p.rows();
  for (const auto& e : small_basis) {
    conic::Program::Constraint con;
    for (std::int64_t l = 0; l < n_lam; ++l)
      con.psd.push_back({blk_g[static_cast<size_t>(l)], e});
    con.rhs = e.trace().real();
    p.add_constraint(std::move(con));
  }

  conic::Solution sol = conic::solve(p, opt);
  check_solved(sol, "incompatibility");

  IncompatReport rep;
  rep.primal_value = sol.primal_value;
  rep.dual_value = sol.dual_value;
  rep.gap = sol.gap;
  rep.iterations = sol.iterations;
  rep.status = sol.status;
  rep.value = std::max(0.0, sol.primal_value);

  std::vector<CMat> g_effects;
  for (std::int64_t l = 0; l < n_lam; ++l)
    g_effects.push_back(sol.x_psd[static_cast<size_t>(blk_g[static_cast<size_t>(l)])]);
  rep.parent = sanitize_povm(d, g_effects);
  rep.closest_jm = WeightedAssemblage(
      std::vector<Povm>(
          parent_povm_simulation(rep.parent, strategies).measurements()),
      a.weights());

  // Dual witness read off the row multipliers: Y_x from the (A) rows gives
  // C_{a|x}, the (B) rows give the states, the (C) rows give L.
  rep.certificate.C.resize(static_cast<size_t>(m));
  rep.certificate.rho.resize(static_cast<size_t>(m));
  for (int x = 0; x < m; ++x) {
    const int o = a.measurement(x).outcomes();
    const auto big_basis = hermitian_basis(o * d);
    CMat yx = CMat::Zero(o * d, o * d);
    for (size_t q = 0; q < big_basis.size(); ++q) {
      yx += sol.y[rows_a_start[static_cast<size_t>(x)] + static_cast<int>(q)] * big_basis[q];
    }
    CMat rho_t = CMat::Zero(d, d);
    for (size_t q = 0; q < small_basis.size(); ++q) {
      rho_t += sol.y[rows_b_start[static_cast<size_t>(x)] + static_cast<int>(q)] * small_basis[q];
    }
    CMat rho = rho_t.transpose() / a.weight(x);
    rho += (1.0 - rho.trace().real()) / d * CMat::Identity(d, d);
    rep.certificate.rho[static_cast<size_t>(x)] = hermitize(rho);
    for (int aa = 0; aa < o; ++aa) {
      rep.certificate.C[static_cast<size_t>(x)].push_back(
          hermitize(diag_subblock_t(yx, aa, d) / a.weight(x)));
    }
  }
  CMat l_tilde = CMat::Zero(d, d);
  for (size_t q = 0; q < small_basis.size(); ++q) {
    l_tilde += sol.y[rows_c_start + static_cast<int>(q)] * small_basis[q];
  }
  rep.certificate.L = hermitize(-l_tilde);
  rep.certificate.value = sol.dual_value;
  return rep;
}

double measurement_diamond_distance(const Povm& m, const Povm& n,
                                    const conic::SolverOptions& opt) {
  if (m.dim() != n.dim()) {
    throw InputError("diamond distance: dimension mismatch");
  }
  const int d = m.dim();
  const int o = std::max(m.outcomes(), n.outcomes());
  auto effect_of = [d](const Povm& pv, int a) {
    return a < pv.outcomes() ? pv.effect(a).mat() : CMat(CMat::Zero(d, d));
  };

  conic::Program p;
  const int blk_a = p.add_vec_block(1);
  const int blk_z = p.add_psd_block(o * d);
  const int blk_s1 = p.add_psd_block(o * d);
  const int blk_s2 = p.add_psd_block(d);
  p.add_vec_objective(blk_a, RVec::Ones(1));

  for (const auto& e : hermitian_basis(o * d)) {
    conic::Program::Constraint con;
    con.psd.push_back({blk_z, e});
    con.psd.push_back({blk_s1, -e});
    double rhs = 0;
    for (int a = 0; a < o; ++a) {
      CMat sub = diag_subblock_t(e, a, d);
      if (sub.cwiseAbs().maxCoeff() > 0) {
        rhs += rinner(sub, CMat(effect_of(m, a) - effect_of(n, a)));
      }
    }
    con.rhs = rhs;
    p.add_constraint(std::move(con));
  }
  for (const auto& e : hermitian_basis(d)) {
    conic::Program::Constraint con;
    RVec coeff(1);
    coeff[0] = e.trace().real();
    if (coeff[0] != 0) con.vec.push_back({blk_a, coeff});
    con.psd.push_back({blk_z, -kron(CMat::Identity(o, o), e)});
    con.psd.push_back({blk_s2, -e});
    con.rhs = 0;
    p.add_constraint(std::move(con));
  }
  conic::Solution sol = conic::solve(p, opt);
  check_solved(sol, "diamond distance");
  return std::max(0.0, sol.primal_value);
}

double assemblage_diamond_distance(const WeightedAssemblage& a,
                                   const WeightedAssemblage& b,
                                   const conic::SolverOptions& opt) {
  if (a.settings() != b.settings()) {
    throw InputError("diamond distance: setting count mismatch");
  }
  double v = 0;
  for (int x = 0; x < a.settings(); ++x) {
    if (a.weight(x) > 0) {
      v += a.weight(x) *
           measurement_diamond_distance(a.measurement(x), b.measurement(x), opt);
    }
  }
  return v;
}

bool is_jointly_measurable(const WeightedAssemblage& a, double tol,
                           const conic::SolverOptions& opt, std::int64_t cap) {
  const int d = a.dim();
  const int m = a.settings();
  DeterministicStrategySet strategies(a.outcome_counts(), cap);
  const std::int64_t n_lam = strategies.size();

  // Feasibility phase: G_l = Gt_l - (t / |Lambda|) 1 must reproduce every
  // effect; jointly measurable iff the minimal uniform lift t is ~ 0.
  conic::Program p;
  const int blk_tp = p.add_vec_block(1);
  const int blk_tm = p.add_vec_block(1);
  std::vector<int> blk_g;
  for (std::int64_t l = 0; l < n_lam; ++l) blk_g.push_back(p.add_psd_block(d));
  p.add_vec_objective(blk_tp, RVec::Ones(1));
  p.add_vec_objective(blk_tm, (-RVec::Ones(1)).eval());

  const auto basis = hermitian_basis(d);
  for (int x = 0; x < m; ++x) {
    const int o = a.measurement(x).outcomes();
    for (int aa = 0; aa < o; ++aa) {
      for (const auto& e : basis) {
        conic::Program::Constraint con;
        for (std::int64_t l = 0; l < n_lam; ++l) {
          if (strategies.outcome(l, x) == aa)
            con.psd.push_back({blk_g[static_cast<size_t>(l)], e});
        }
        const double tr = e.trace().real() / o;
        if (tr != 0) {
          RVec c1(1), c2(1);
          c1[0] = -tr;
          c2[0] = tr;
          con.vec.push_back({blk_tp, c1});
          con.vec.push_back({blk_tm, c2});
        }
        con.rhs = rinner(e, a.effect(x, aa));
        p.add_constraint(std::move(con));
      }
    }
  }
  conic::Solution sol = conic::solve(p, opt);
  check_solved(sol, "joint measurability");
  return sol.primal_value <= tol;
}

WeightedAssemblage closest_jm_subset(const WeightedAssemblage& a,
                                     const std::vector<int>& subset,
                                     const conic::SolverOptions& opt) {
  return incompatibility(a.restrict(subset), opt).closest_jm;
}

}  // namespace qi
