#include "qi/bell.hpp"

#include <cmath>

namespace qi {

namespace {

double rinner(const CMat& a, const CMat& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

void require_solved(const conic::Solution& sol, const char* what) {
  if (sol.status != conic::SolveStatus::Optimal) {
    throw SolverError(std::string(what) + ": conic solve ended with status " +
                      conic::to_string(sol.status));
  }
}

// Hermitian sign operator: the norm-bounded observable maximizing Tr[A M].
CMat sign_operator(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m));
  RVec s(es.eigenvalues().size());
  for (int i = 0; i < s.size(); ++i) s[i] = es.eigenvalues()[i] >= 0 ? 1.0 : -1.0;
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

// <A_i (x) B_j> coefficients of the averaged three-pair CHSH functional.
RMat avg_chsh_coeff() {
  RMat c(3, 2);
  c << 2.0 / 3, 2.0 / 3, 2.0 / 3, 0.0, 2.0 / 3, -2.0 / 3;
  return c;
}

}  // namespace

SteeringAssemblage::SteeringAssemblage(std::vector<std::vector<CMat>> sigma,
                                       double tol)
    : sigma_(std::move(sigma)) {
  if (sigma_.empty() || sigma_[0].empty()) {
    throw InputError("steering assemblage: no settings or outcomes");
  }
  const int d = static_cast<int>(sigma_[0][0].rows());
  for (size_t x = 0; x < sigma_.size(); ++x) {
    CMat sum = CMat::Zero(d, d);
    if (sigma_[x].empty()) throw InputError("steering assemblage: empty setting");
    for (auto& s : sigma_[x]) {
      if (s.rows() != d || s.cols() != d) {
        throw InputError("steering assemblage: dimension mismatch");
      }
      s = hermitize(s);
      if (min_eigenvalue(s) < -tol) {
        throw InputError("steering assemblage: state outside the PSD cone");
      }
      sum += s;
    }
    if (x == 0) {
      rho_b_ = sum;
    } else if ((sum - rho_b_).cwiseAbs().maxCoeff() > tol) {
      throw InputError("steering assemblage: settings reduce to different states");
    }
  }
  if (std::abs(rho_b_.trace().real() - 1.0) > 1e-6) {
    throw InputError("steering assemblage: reduced state is not normalized");
  }
}

std::vector<int> SteeringAssemblage::outcome_counts() const {
  std::vector<int> o;
  for (const auto& s : sigma_) o.push_back(static_cast<int>(s.size()));
  return o;
}

SteeringAssemblage SteeringAssemblage::restrict(const std::vector<int>& subset) const {
  std::vector<std::vector<CMat>> s;
  for (int x : subset) {
    if (x < 0 || x >= settings()) throw InputError("restrict: setting out of range");
    s.push_back(sigma_[static_cast<size_t>(x)]);
  }
  return SteeringAssemblage(std::move(s));
}

SteeringAssemblage concat(const SteeringAssemblage& a, const SteeringAssemblage& b) {
  if ((a.reduced_state() - b.reduced_state()).cwiseAbs().maxCoeff() > 1e-6) {
    throw InputError("steering concat: parts have different reduced states");
  }
  std::vector<std::vector<CMat>> s;
  for (int x = 0; x < a.settings(); ++x) {
    std::vector<CMat> row;
    for (int o = 0; o < a.outcomes(x); ++o) row.push_back(a.state(x, o));
    s.push_back(std::move(row));
  }
  for (int x = 0; x < b.settings(); ++x) {
    std::vector<CMat> row;
    for (int o = 0; o < b.outcomes(x); ++o) row.push_back(b.state(x, o));
    s.push_back(std::move(row));
  }
  return SteeringAssemblage(std::move(s), 1e-6);
}

SteeringAssemblage steer_from_state(const HermitianOperator& state,
                                    const WeightedAssemblage& m) {
  const int da = m.dim();
  const int n = state.dim();
  if (n % da != 0) throw InputError("steer_from_state: dimension mismatch");
  const int db = n / da;
  if (min_eigenvalue(state.mat()) < -1e-9 ||
      std::abs(state.mat().trace().real() - 1.0) > 1e-9) {
    throw InputError("steer_from_state: not a density matrix");
  }
  std::vector<std::vector<CMat>> sigma;
  for (int x = 0; x < m.settings(); ++x) {
    std::vector<CMat> row;
    for (int a = 0; a < m.measurement(x).outcomes(); ++a) {
      CMat op = kron(m.effect(x, a), CMat::Identity(db, db)) * state.mat();
      row.push_back(hermitize(partial_trace_first(op, da)));
    }
    sigma.push_back(std::move(row));
  }
  return SteeringAssemblage(std::move(sigma));
}

SteeringReport steering_distance(const SteeringAssemblage& sa,
                                 const conic::SolverOptions& opt,
                                 std::int64_t cap) {
  const int d = sa.dim();
  const int m = sa.settings();
  DeterministicStrategySet strategies(sa.outcome_counts(), cap);
  const std::int64_t n_lam = strategies.size();

  conic::Program p;
  std::vector<int> blk_sig;
  for (std::int64_t l = 0; l < n_lam; ++l) blk_sig.push_back(p.add_psd_block(d));
  // Trace-norm splitting per (x, a): P - Q = sigma - tau, cost Tr[P + Q].
  std::vector<std::vector<std::pair<int, int>>> blk_pq(static_cast<size_t>(m));
  for (int x = 0; x < m; ++x) {
    for (int a = 0; a < sa.outcomes(x); ++a) {
      const int bp = p.add_psd_block(d);
      const int bq = p.add_psd_block(d);
      p.add_psd_objective(bp, CMat::Identity(d, d) / (2.0 * m));
      p.add_psd_objective(bq, CMat::Identity(d, d) / (2.0 * m));
      blk_pq[static_cast<size_t>(x)].push_back({bp, bq});
    }
  }
  const auto basis = hermitian_basis(d);
  for (int x = 0; x < m; ++x) {
    for (int a = 0; a < sa.outcomes(x); ++a) {
      for (const auto& e : basis) {
        conic::Program::Constraint con;
        con.psd.push_back({blk_pq[static_cast<size_t>(x)][static_cast<size_t>(a)].first, e});
        con.psd.push_back({blk_pq[static_cast<size_t>(x)][static_cast<size_t>(a)].second, -e});
        for (std::int64_t l = 0; l < n_lam; ++l) {
          if (strategies.outcome(l, x) == a)
            con.psd.push_back({blk_sig[static_cast<size_t>(l)], e});
        }
        con.rhs = rinner(e, sa.state(x, a));
        p.add_constraint(std::move(con));
      }
    }
  }
  for (const auto& e : basis) {
    conic::Program::Constraint con;
    for (std::int64_t l = 0; l < n_lam; ++l)
      con.psd.push_back({blk_sig[static_cast<size_t>(l)], e});
    con.rhs = rinner(e, sa.reduced_state());
    p.add_constraint(std::move(con));
  }
  conic::Solution sol = conic::solve(p, opt);
  require_solved(sol, "steering distance");

  SteeringReport rep;
  rep.value = std::max(0.0, sol.primal_value);
  rep.status = sol.status;
  rep.gap = sol.gap;
  for (std::int64_t l = 0; l < n_lam; ++l)
    rep.sigma_lambda.push_back(sol.x_psd[static_cast<size_t>(blk_sig[static_cast<size_t>(l)])]);
  std::vector<std::vector<CMat>> tau(static_cast<size_t>(m));
  for (int x = 0; x < m; ++x) {
    tau[static_cast<size_t>(x)].assign(static_cast<size_t>(sa.outcomes(x)),
                                       CMat::Zero(d, d));
    for (std::int64_t l = 0; l < n_lam; ++l) {
      tau[static_cast<size_t>(x)][static_cast<size_t>(strategies.outcome(l, x))] +=
          rep.sigma_lambda[static_cast<size_t>(l)];
    }
  }
  rep.closest = SteeringAssemblage(std::move(tau), 1e-6);
  return rep;
}

BehaviorTable::BehaviorTable(std::vector<std::vector<RMat>> q, double tol)
    : q_(std::move(q)) {
  if (q_.empty() || q_[0].empty()) throw InputError("behavior: empty table");
  const size_t mb = q_[0].size();
  for (size_t x = 0; x < q_.size(); ++x) {
    if (q_[x].size() != mb) throw InputError("behavior: ragged table");
    for (size_t y = 0; y < mb; ++y) {
      const RMat& t = q_[x][y];
      if (t.rows() != q_[x][0].rows() || t.cols() != q_[0][y].cols()) {
        throw InputError("behavior: outcome count mismatch");
      }
      if (t.minCoeff() < -tol) throw InputError("behavior: negative probability");
      if (std::abs(t.sum() - 1.0) > tol) throw InputError("behavior: not normalized");
    }
  }
  // Non-signaling: one party's marginal cannot depend on the other's setting.
  for (int x = 0; x < settings_a(); ++x) {
    for (int y = 1; y < settings_b(); ++y) {
      if ((q_[static_cast<size_t>(x)][static_cast<size_t>(y)].rowwise().sum() -
           q_[static_cast<size_t>(x)][0].rowwise().sum())
              .cwiseAbs()
              .maxCoeff() > tol) {
        throw InputError("behavior: signaling from the second party");
      }
    }
  }
  for (int y = 0; y < settings_b(); ++y) {
    for (int x = 1; x < settings_a(); ++x) {
      if ((q_[static_cast<size_t>(x)][static_cast<size_t>(y)].colwise().sum() -
           q_[0][static_cast<size_t>(y)].colwise().sum())
              .cwiseAbs()
              .maxCoeff() > tol) {
        throw InputError("behavior: signaling from the first party");
      }
    }
  }
}

double BehaviorTable::marginal_a(int a, int x) const {
  return q_[static_cast<size_t>(x)][0].row(a).sum();
}

double BehaviorTable::marginal_b(int b, int y) const {
  return q_[0][static_cast<size_t>(y)].col(b).sum();
}

BehaviorTable BehaviorTable::restrict_a(const std::vector<int>& subset) const {
  std::vector<std::vector<RMat>> q;
  for (int x : subset) {
    if (x < 0 || x >= settings_a()) throw InputError("restrict_a: setting out of range");
    q.push_back(q_[static_cast<size_t>(x)]);
  }
  return BehaviorTable(std::move(q));
}

BehaviorTable concat_a(const BehaviorTable& a, const BehaviorTable& b) {
  std::vector<std::vector<RMat>> q;
  for (int x = 0; x < a.settings_a(); ++x) {
    std::vector<RMat> row;
    for (int y = 0; y < a.settings_b(); ++y) row.push_back(a.table(x, y));
    q.push_back(std::move(row));
  }
  for (int x = 0; x < b.settings_a(); ++x) {
    std::vector<RMat> row;
    for (int y = 0; y < b.settings_b(); ++y) row.push_back(b.table(x, y));
    q.push_back(std::move(row));
  }
  return BehaviorTable(std::move(q), 1e-6);
}

BehaviorTable behavior_from_quantum(const HermitianOperator& state,
                                    const WeightedAssemblage& alice,
                                    const WeightedAssemblage& bob) {
  const int da = alice.dim(), db = bob.dim();
  if (state.dim() != da * db) throw InputError("behavior_from_quantum: dimension mismatch");
  std::vector<std::vector<RMat>> q;
  for (int x = 0; x < alice.settings(); ++x) {
    std::vector<RMat> row;
    for (int y = 0; y < bob.settings(); ++y) {
      RMat t(alice.measurement(x).outcomes(), bob.measurement(y).outcomes());
      for (int a = 0; a < t.rows(); ++a)
        for (int b = 0; b < t.cols(); ++b)
          t(a, b) = (kron(alice.effect(x, a), bob.effect(y, b)) * state.mat())
                        .trace()
                        .real();
      row.push_back(std::move(t));
    }
    q.push_back(std::move(row));
  }
  return BehaviorTable(std::move(q), 1e-7);
}

NonlocalityReport nonlocality_distance(const BehaviorTable& q,
                                       const conic::SolverOptions& opt,
                                       std::int64_t cap) {
  const int ma = q.settings_a(), mb = q.settings_b();
  std::vector<int> oa, ob;
  for (int x = 0; x < ma; ++x) oa.push_back(q.outcomes_a(x));
  for (int y = 0; y < mb; ++y) ob.push_back(q.outcomes_b(y));
  DeterministicStrategySet la(oa, cap), lb(ob, cap);
  if (la.size() > cap / lb.size()) {
    throw InputError("nonlocality: product vertex count exceeds cap");
  }
  const int nv = static_cast<int>(la.size() * lb.size());

  int entries = 0;
  for (int x = 0; x < ma; ++x)
    for (int y = 0; y < mb; ++y) entries += oa[static_cast<size_t>(x)] * ob[static_cast<size_t>(y)];

  conic::Program p;
  const int blk_pi = p.add_vec_block(nv);
  const int blk_s1 = p.add_vec_block(entries);
  const int blk_s2 = p.add_vec_block(entries);
  const double scale = 1.0 / (2.0 * ma * mb);
  p.add_vec_objective(blk_s1, RVec::Constant(entries, scale));
  p.add_vec_objective(blk_s2, RVec::Constant(entries, scale));

  auto vertex = [&](std::int64_t i, std::int64_t j) { return i * lb.size() + j; };

  int k = 0;
  for (int x = 0; x < ma; ++x) {
    for (int y = 0; y < mb; ++y) {
      for (int a = 0; a < oa[static_cast<size_t>(x)]; ++a) {
        for (int b = 0; b < ob[static_cast<size_t>(y)]; ++b) {
          conic::Program::Constraint con;
          RVec e1 = RVec::Zero(entries), e2 = RVec::Zero(entries);
          e1[k] = 1.0;
          e2[k] = -1.0;
          con.vec.push_back({blk_s1, e1});
          con.vec.push_back({blk_s2, e2});
          RVec c = RVec::Zero(nv);
          for (std::int64_t i = 0; i < la.size(); ++i) {
            if (la.outcome(i, x) != a) continue;
            for (std::int64_t j = 0; j < lb.size(); ++j) {
              if (lb.outcome(j, y) == b) c[vertex(i, j)] = 1.0;
            }
          }
          con.vec.push_back({blk_pi, c});
          con.rhs = q.prob(a, b, x, y);
          p.add_constraint(std::move(con));
          ++k;
        }
      }
    }
  }
  // Consistency with the behavior's own marginals; the model is
  // non-signaling by construction, so per-party rows suffice.
  for (int x = 0; x < ma; ++x) {
    for (int a = 0; a < oa[static_cast<size_t>(x)]; ++a) {
      conic::Program::Constraint con;
      RVec c = RVec::Zero(nv);
      for (std::int64_t i = 0; i < la.size(); ++i) {
        if (la.outcome(i, x) != a) continue;
        for (std::int64_t j = 0; j < lb.size(); ++j) c[vertex(i, j)] = 1.0;
      }
      con.vec.push_back({blk_pi, c});
      con.rhs = q.marginal_a(a, x);
      p.add_constraint(std::move(con));
    }
  }
  for (int y = 0; y < mb; ++y) {
    for (int b = 0; b < ob[static_cast<size_t>(y)]; ++b) {
      conic::Program::Constraint con;
      RVec c = RVec::Zero(nv);
      for (std::int64_t j = 0; j < lb.size(); ++j) {
        if (lb.outcome(j, y) != b) continue;
        for (std::int64_t i = 0; i < la.size(); ++i) c[vertex(i, j)] = 1.0;
      }
      con.vec.push_back({blk_pi, c});
      con.rhs = q.marginal_b(b, y);
      p.add_constraint(std::move(con));
    }
  }

  conic::Solution sol = conic::solve(p, opt);
  require_solved(sol, "nonlocality distance");

  NonlocalityReport rep;
  rep.value = std::max(0.0, sol.primal_value);
  rep.status = sol.status;
  rep.gap = sol.gap;
  std::vector<std::vector<RMat>> t(static_cast<size_t>(ma));
  for (int x = 0; x < ma; ++x) {
    for (int y = 0; y < mb; ++y) {
      RMat tab = RMat::Zero(oa[static_cast<size_t>(x)], ob[static_cast<size_t>(y)]);
      for (std::int64_t i = 0; i < la.size(); ++i)
        for (std::int64_t j = 0; j < lb.size(); ++j)
          tab(la.outcome(i, x), lb.outcome(j, y)) +=
              sol.x_vec[static_cast<size_t>(blk_pi)][vertex(i, j)];
      t[static_cast<size_t>(x)].push_back(std::move(tab));
    }
  }
  rep.closest = BehaviorTable(std::move(t), 1e-6);
  return rep;
}

ChshValues chsh_values(const HermitianOperator& state,
                       const std::vector<CMat>& alice_obs,
                       const std::vector<CMat>& bob_obs) {
  if (alice_obs.size() != 3 || bob_obs.size() != 2) {
    throw InputError("chsh_values: need 3 first-party and 2 second-party observables");
  }
  auto check_obs = [](const CMat& o) {
    if ((o - o.adjoint()).cwiseAbs().maxCoeff() > 1e-9 || spectral_norm(o) > 1 + 1e-9) {
      throw InputError("chsh_values: observable not Hermitian with spectrum in [-1,1]");
    }
  };
  for (const auto& o : alice_obs) check_obs(o);
  for (const auto& o : bob_obs) check_obs(o);

  RMat e(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      e(i, j) = (kron(alice_obs[static_cast<size_t>(i)], bob_obs[static_cast<size_t>(j)]) *
                 state.mat())
                    .trace()
                    .real();
  ChshValues v;
  v.chsh_12 = e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1);
  v.chsh_13 = e(0, 0) + e(0, 1) + e(2, 0) - e(2, 1);
  v.chsh_23 = e(1, 0) + e(1, 1) + e(2, 0) - e(2, 1);
  v.average = (v.chsh_12 + v.chsh_13 + v.chsh_23) / 3.0;
  return v;
}

namespace {

ChshSearchResult seesaw_chsh(const RMat& c, std::uint64_t seed, int restarts) {
  ChshSearchResult best;
  best.best_average = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    std::vector<CMat> a(3), b(2);
    for (auto& o : a) o = sign_operator(random_density_matrix(2, rng) - CMat::Identity(2, 2) / 2.0);
    for (auto& o : b) o = sign_operator(random_density_matrix(2, rng) - CMat::Identity(2, 2) / 2.0);
    CMat rho;
    double value = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500; ++it) {
      CMat bell_op = CMat::Zero(4, 4);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
          if (c(i, j) != 0) bell_op += c(i, j) * kron(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)]);
      Eigen::SelfAdjointEigenSolver<CMat> es(bell_op);
      const double next = es.eigenvalues().maxCoeff();
      CVec top = es.eigenvectors().col(es.eigenvalues().size() - 1);
      rho = top * top.adjoint();
      if (next <= value + 1e-13) {
        value = std::max(value, next);
        break;
      }
      value = next;
      for (int i = 0; i < 3; ++i) {
        CMat x = CMat::Zero(2, 2);
        for (int j = 0; j < 2; ++j) x += c(i, j) * b[static_cast<size_t>(j)];
        a[static_cast<size_t>(i)] =
            sign_operator(partial_trace_second(CMat(kron(CMat::Identity(2, 2), x) * rho), 2));
      }
      for (int j = 0; j < 2; ++j) {
        CMat x = CMat::Zero(2, 2);
        for (int i = 0; i < 3; ++i) x += c(i, j) * a[static_cast<size_t>(i)];
        b[static_cast<size_t>(j)] =
            sign_operator(partial_trace_first(CMat(kron(x, CMat::Identity(2, 2)) * rho), 2));
      }
    }
    if (value > best.best_average) {
      best.best_average = value;
      best.state = rho;
      best.alice_obs = a;
      best.bob_obs = b;
    }
  }
  best.values = chsh_values(HermitianOperator(best.state), best.alice_obs, best.bob_obs);
  return best;
}

}  // namespace

ChshSearchResult maximize_avg_chsh(std::uint64_t seed, int restarts) {
  ChshSearchResult best = seesaw_chsh(avg_chsh_coeff(), seed, restarts);
  best.best_average = best.values.average;
  return best;
}

ChshSearchResult maximize_single_chsh(std::uint64_t seed, int restarts) {
  RMat c(3, 2);
  c << 1, 1, 1, -1, 0, 0;
  ChshSearchResult best = seesaw_chsh(c, seed, restarts);
  best.best_average = best.values.chsh_12;
  return best;
}

double ns_correlator_bound(const RMat& coeff, const conic::SolverOptions& opt) {
  const int ma = static_cast<int>(coeff.rows());
  const int mb = static_cast<int>(coeff.cols());
  const int n = ma * mb * 4;
  auto idx = [&](int x, int y, int a, int b) { return ((x * mb + y) * 2 + a) * 2 + b; };

  conic::Program p;
  const int blk_q = p.add_vec_block(n);
  RVec obj = RVec::Zero(n);
  for (int x = 0; x < ma; ++x)
    for (int y = 0; y < mb; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          obj[idx(x, y, a, b)] = -coeff(x, y) * ((a + b) % 2 == 0 ? 1.0 : -1.0);
  p.add_vec_objective(blk_q, obj);

  for (int x = 0; x < ma; ++x) {
    for (int y = 0; y < mb; ++y) {
      conic::Program::Constraint con;
      RVec c = RVec::Zero(n);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c[idx(x, y, a, b)] = 1.0;
      con.vec.push_back({blk_q, c});
      con.rhs = 1.0;
      p.add_constraint(std::move(con));
    }
  }
  // Non-signaling marginal agreement against setting 0 of the other party.
  for (int x = 0; x < ma; ++x) {
    for (int y = 1; y < mb; ++y) {
      conic::Program::Constraint con;
      RVec c = RVec::Zero(n);
      for (int b = 0; b < 2; ++b) {
        c[idx(x, y, 0, b)] += 1.0;
        c[idx(x, 0, 0, b)] -= 1.0;
      }
      con.vec.push_back({blk_q, c});
      con.rhs = 0.0;
      p.add_constraint(std::move(con));
    }
  }
  for (int y = 0; y < mb; ++y) {
    for (int x = 1; x < ma; ++x) {
      conic::Program::Constraint con;
      RVec c = RVec::Zero(n);
      for (int a = 0; a < 2; ++a) {
        c[idx(x, y, a, 0)] += 1.0;
        c[idx(0, y, a, 0)] -= 1.0;
      }
      con.vec.push_back({blk_q, c});
      con.rhs = 0.0;
      p.add_constraint(std::move(con));
    }
  }
  conic::Solution sol = conic::solve(p, opt);
  require_solved(sol, "non-signaling bound");
  return -sol.primal_value;
}

}  // namespace qi
