#include <cmath>
#include <limits>

#include "qi/conic.hpp"

#include <iostream>

namespace qi::conic {

namespace {

struct Blocks {
  std::vector<CMat> psd;
  std::vector<RVec> vec;
};

Blocks zeros_like(const Program& p) {
  Blocks b;
  for (int i = 0; i < p.psd_count(); ++i)
    b.psd.emplace_back(CMat::Zero(p.psd_dim(i), p.psd_dim(i)));
  for (int i = 0; i < p.vec_count(); ++i) b.vec.emplace_back(RVec::Zero(p.vec_dim(i)));
  return b;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0;
  for (size_t i = 0; i < a.psd.size(); ++i)
    s += (a.psd[i].conjugate().cwiseProduct(b.psd[i])).sum().real();
  for (size_t i = 0; i < a.vec.size(); ++i) s += a.vec[i].dot(b.vec[i]);
  return s;
}

double fro_norm(const Blocks& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

bool finite(const Blocks& a) {
  for (const auto& m : a.psd)
    if (!m.allFinite()) return false;
  for (const auto& v : a.vec)
    if (!v.allFinite()) return false;
  return true;
}

// <A_i, X> per row.
RVec apply_forward(const Program& p, const Blocks& x) {
  RVec out(p.rows());
  for (int i = 0; i < p.rows(); ++i) {
    const auto& con = p.constraint(i);
    double s = 0;
    for (const auto& t : con.psd)
      s += (t.coeff.conjugate().cwiseProduct(x.psd[static_cast<size_t>(t.block)]))
               .sum()
               .real();
    for (const auto& t : con.vec) s += t.coeff.dot(x.vec[static_cast<size_t>(t.block)]);
    out[i] = s;
  }
  return out;
}

// sum_i y_i A_ib per block.
Blocks apply_adjoint(const Program& p, const RVec& y) {
  Blocks out = zeros_like(p);
  for (int i = 0; i < p.rows(); ++i) {
    const auto& con = p.constraint(i);
    for (const auto& t : con.psd) out.psd[static_cast<size_t>(t.block)] += y[i] * t.coeff;
    for (const auto& t : con.vec) out.vec[static_cast<size_t>(t.block)] += y[i] * t.coeff;
  }
  return out;
}

// Largest alpha with X + alpha * dX inside the cone (1 = full step allowed).
double max_step_psd(const CMat& x, const CMat& dx) {
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(dx, x,
                                                    Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step_vec(const RVec& x, const RVec& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    if (dx[i] < 0) a = std::min(a, -x[i] / dx[i]);
  return a;
}

double max_step(const Blocks& x, const Blocks& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < x.psd.size(); ++b) a = std::min(a, max_step_psd(x.psd[b], dx.psd[b]));
  for (size_t b = 0; b < x.vec.size(); ++b) a = std::min(a, max_step_vec(x.vec[b], dx.vec[b]));
  return a;
}

CMat psd_power(const CMat& a, double exponent) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  RVec ev = es.eigenvalues();
  const double floor_ev = std::max(ev.maxCoeff(), 1.0) * 1e-15;
  for (int i = 0; i < ev.size(); ++i)
    ev[i] = std::pow(std::max(ev[i], floor_ev), exponent);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Solution solve(const Program& p, const SolverOptions& opt) {
  const int m = p.rows();
  Solution sol;
  sol.y = RVec::Zero(m);

  RVec b(m);
  for (int i = 0; i < m; ++i) b[i] = p.constraint(i).rhs;
  Blocks c = zeros_like(p);
  for (int i = 0; i < p.psd_count(); ++i) c.psd[static_cast<size_t>(i)] = p.psd_objective(i);
  for (int i = 0; i < p.vec_count(); ++i) c.vec[static_cast<size_t>(i)] = p.vec_objective(i);

  double nu = 0;  // barrier parameter: total cone degree
  for (int i = 0; i < p.psd_count(); ++i) nu += p.psd_dim(i);
  for (int i = 0; i < p.vec_count(); ++i) nu += p.vec_dim(i);
  if (nu == 0) throw InputError("conic solve: program has no variables");

  const double bnorm = 1.0 + b.norm();
  const double cnorm = 1.0 + fro_norm(c);

  Blocks x = zeros_like(p), s = zeros_like(p);
  const double xi = bnorm, zeta = cnorm;
  for (auto& blk : x.psd) blk = xi * CMat::Identity(blk.rows(), blk.cols());
  for (auto& blk : x.vec) blk.setConstant(xi);
  for (auto& blk : s.psd) blk = zeta * CMat::Identity(blk.rows(), blk.cols());
  for (auto& blk : s.vec) blk.setConstant(zeta);
  RVec y = RVec::Zero(m);

  // Rows grouped by block for the Schur complement assembly.
  std::vector<std::vector<std::pair<int, const CMat*>>> psd_rows(
      static_cast<size_t>(p.psd_count()));
  std::vector<std::vector<std::pair<int, const RVec*>>> vec_rows(
      static_cast<size_t>(p.vec_count()));
  for (int i = 0; i < m; ++i) {
    for (const auto& t : p.constraint(i).psd)
      psd_rows[static_cast<size_t>(t.block)].push_back({i, &t.coeff});
    for (const auto& t : p.constraint(i).vec)
      vec_rows[static_cast<size_t>(t.block)].push_back({i, &t.coeff});
  }

  // Best iterate seen, by worst-of residuals and gap. Programs whose data is
  // itself only epsilon-feasible (spliced or sanitized assemblages) floor the
  // primal residual slightly above feas_tol; when progress stalls there we
  // fall back to this iterate under a mildly relaxed tolerance.
  Blocks best_x, best_s;
  RVec best_y;
  Solution best_sol;
  double best_score = std::numeric_limits<double>::infinity();
  double stall_score = std::numeric_limits<double>::infinity();
  int no_progress = 0;

  int stalls = 0;
  double prev_step = 1.0;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    RVec rp = b - apply_forward(p, x);
    Blocks aty = apply_adjoint(p, y);
    Blocks rd = zeros_like(p);
    for (size_t blk = 0; blk < rd.psd.size(); ++blk)
      rd.psd[blk] = c.psd[blk] - aty.psd[blk] - s.psd[blk];
    for (size_t blk = 0; blk < rd.vec.size(); ++blk)
      rd.vec[blk] = c.vec[blk] - aty.vec[blk] - s.vec[blk];

    const double gap = inner(x, s);
    const double mu = gap / nu;
    const double pobj = inner(c, x);
    const double dobj = b.dot(y);
    const double pres = rp.norm() / bnorm;
    const double dres = fro_norm(rd) / cnorm;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.iterations = iter;
    sol.primal_value = pobj;
    sol.dual_value = dobj;
    sol.gap = relgap;
    sol.primal_residual = pres;
    sol.dual_residual = dres;

    if (opt.verbose) {
      std::cerr << "iter " << iter << " pobj " << pobj << " dobj " << dobj
                << " pres " << pres << " dres " << dres << " relgap " << relgap
                << " mu " << mu << "\n";
    }

    if (pres <= opt.feas_tol && dres <= opt.feas_tol && relgap <= opt.gap_tol) {
      sol.status = SolveStatus::Optimal;
      break;
    }

    const double score = std::max({pres, dres, relgap});
    if (score < 0.99 * stall_score) {
      stall_score = score;
      no_progress = 0;
    } else if (++no_progress >= 30) {
      sol.status = SolveStatus::MaxIterations;
      break;
    }
    if (pres <= 100 * opt.feas_tol && dres <= 100 * opt.feas_tol &&
        relgap <= 10 * opt.gap_tol && score < best_score) {
      best_score = score;
      best_x = x;
      best_s = s;
      best_y = y;
      best_sol = sol;
    }

    // Farkas-style heuristic: y with A*(y) <= 0 and b.y > 0 certifies primal
    // infeasibility.
    const double t_val = b.dot(y);
    if (iter >= 5 && t_val > 1e-8) {
      double viol = 0;
      for (const auto& blk : aty.psd) viol = std::max(viol, max_eigenvalue(blk));
      for (const auto& blk : aty.vec) viol = std::max(viol, blk.maxCoeff());
      if (viol / t_val < 1e-8) {
        sol.status = SolveStatus::Infeasible;
        break;
      }
    }

    // Nesterov-Todd scaling point per block: W S W = X.
    std::vector<CMat> w_psd;
    for (size_t blk = 0; blk < x.psd.size(); ++blk) {
      CMat xh = psd_power(x.psd[blk], 0.5);
      CMat mid = psd_power(hermitize(xh * s.psd[blk] * xh), -0.5);
      w_psd.push_back(hermitize(xh * mid * xh));
    }
    std::vector<RVec> w2_vec;  // squared scaling, x/s elementwise
    for (size_t blk = 0; blk < x.vec.size(); ++blk)
      w2_vec.push_back((x.vec[blk].array() / s.vec[blk].array()).matrix());

    // Schur complement M = A (W . W) A^T.
    RMat schur = RMat::Zero(m, m);
    for (size_t blk = 0; blk < psd_rows.size(); ++blk) {
      const CMat& w = w_psd[blk];
      for (const auto& [i, ai] : psd_rows[blk]) {
        CMat t = w * (*ai) * w;
        for (const auto& [j, aj] : psd_rows[blk]) {
          if (j > i) continue;
          schur(i, j) += (aj->conjugate().cwiseProduct(t)).sum().real();
        }
      }
    }
    for (size_t blk = 0; blk < vec_rows.size(); ++blk) {
      const RVec& w2 = w2_vec[blk];
      for (const auto& [i, ai] : vec_rows[blk]) {
        RVec t = w2.cwiseProduct(*ai);
        for (const auto& [j, aj] : vec_rows[blk]) {
          if (j > i) continue;
          schur(i, j) += aj->dot(t);
        }
      }
    }
    schur = schur.selfadjointView<Eigen::Lower>();

    // Static regularization absorbs linearly dependent rows.
    double reg = 1e-12 * (1.0 + schur.diagonal().maxCoeff());
    Eigen::LDLT<RMat> ldlt;
    RMat schur_reg;
    for (int attempt = 0; attempt < 4; ++attempt) {
      schur_reg = schur + reg * RMat::Identity(m, m);
      ldlt.compute(schur_reg);
      if (ldlt.info() == Eigen::Success) break;
      reg *= 1e3;
    }
    if (ldlt.info() != Eigen::Success) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }

    Blocks w_rd_w = zeros_like(p);
    for (size_t blk = 0; blk < rd.psd.size(); ++blk)
      w_rd_w.psd[blk] = hermitize(w_psd[blk] * rd.psd[blk] * w_psd[blk]);
    for (size_t blk = 0; blk < rd.vec.size(); ++blk)
      w_rd_w.vec[blk] = w2_vec[blk].cwiseProduct(rd.vec[blk]);
    const RVec a_wrdw = apply_forward(p, w_rd_w);

    // Direction for a given complementarity target Rc:
    //   dX + W dS W = Rc,  A(dX) = rp,  A^T(dy) + dS = Rd.
    auto direction = [&](const Blocks& rc, RVec& dy, Blocks& dxo, Blocks& dso) {
      RVec rhs = rp - apply_forward(p, rc) + a_wrdw;
      dy = ldlt.solve(rhs);
      // Iterative refinement against the true Schur matrix recovers the
      // digits the regularized factorization loses once the barrier parameter
      // is small; a step is kept only if it actually shrinks the residual,
      // which guards the genuinely singular systems the regularization exists
      // for.
      double rnorm = (rhs - schur * dy).norm();
      for (int refine = 0; refine < 5; ++refine) {
        RVec resid = rhs - schur * dy;
        if (!resid.allFinite()) break;
        RVec trial = dy + ldlt.solve(resid);
        const double tnorm = (rhs - schur * trial).norm();
        if (!trial.allFinite() || tnorm >= 0.9 * rnorm) break;
        dy = std::move(trial);
        rnorm = tnorm;
      }
      Blocks atdy = apply_adjoint(p, dy);
      dso = zeros_like(p);
      dxo = zeros_like(p);
      for (size_t blk = 0; blk < rd.psd.size(); ++blk) {
        dso.psd[blk] = rd.psd[blk] - atdy.psd[blk];
        dxo.psd[blk] =
            hermitize(rc.psd[blk] - w_psd[blk] * dso.psd[blk] * w_psd[blk]);
      }
      for (size_t blk = 0; blk < rd.vec.size(); ++blk) {
        dso.vec[blk] = rd.vec[blk] - atdy.vec[blk];
        dxo.vec[blk] = rc.vec[blk] - w2_vec[blk].cwiseProduct(dso.vec[blk]);
      }
    };

    // Predictor (affine scaling, Rc = -X).
    Blocks rc = zeros_like(p);
    for (size_t blk = 0; blk < x.psd.size(); ++blk) rc.psd[blk] = -x.psd[blk];
    for (size_t blk = 0; blk < x.vec.size(); ++blk) rc.vec[blk] = -x.vec[blk];
    RVec dy_a;
    Blocks dx_a, ds_a;
    direction(rc, dy_a, dx_a, ds_a);

    double ap = std::min(1.0, max_step(x, dx_a));
    double ad = std::min(1.0, max_step(s, ds_a));
    Blocks x_aff = x, s_aff = s;
    for (size_t blk = 0; blk < x.psd.size(); ++blk) {
      x_aff.psd[blk] += ap * dx_a.psd[blk];
      s_aff.psd[blk] += ad * ds_a.psd[blk];
    }
    for (size_t blk = 0; blk < x.vec.size(); ++blk) {
      x_aff.vec[blk] += ap * dx_a.vec[blk];
      s_aff.vec[blk] += ad * ds_a.vec[blk];
    }
    const double mu_aff = std::max(0.0, inner(x_aff, s_aff)) / nu;
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);
    // When the previous step collapsed the iterate has drifted off-center;
    // spend this iteration recentering instead of pushing mu further down.
    if (prev_step < 0.05) sigma = std::max(sigma, 0.5);
    if (no_progress >= 5) sigma = std::max(sigma, 0.1);

    // Corrector: Rc = sigma mu S^{-1} - X - sym(dXa dSa S^{-1}).
    std::vector<CMat> s_inv;
    for (const auto& blk : s.psd) s_inv.push_back(psd_power(blk, -1.0));
    for (size_t blk = 0; blk < x.psd.size(); ++blk) {
      rc.psd[blk] = sigma * mu * s_inv[blk] - x.psd[blk] -
                    hermitize(dx_a.psd[blk] * ds_a.psd[blk] * s_inv[blk]);
    }
    for (size_t blk = 0; blk < x.vec.size(); ++blk) {
      rc.vec[blk] =
          (sigma * mu * s.vec[blk].cwiseInverse().array() - x.vec[blk].array() -
           dx_a.vec[blk].array() * ds_a.vec[blk].array() / s.vec[blk].array())
              .matrix();
    }
    RVec dy;
    Blocks dx, ds;
    direction(rc, dy, dx, ds);
    if (!finite(dx) || !finite(ds) || !dy.allFinite()) {
      dy = dy_a;
      dx = dx_a;
      ds = ds_a;
    }

    const double tau = 0.99;
    ap = std::min(1.0, tau * max_step(x, dx));
    ad = std::min(1.0, tau * max_step(s, ds));
    if (opt.verbose) {
      std::cerr << "    sigma " << sigma << " ap " << ap << " ad " << ad << "\n";
    }
    prev_step = std::min(ap, ad);
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) {
        sol.status = SolveStatus::NumericalFailure;
        break;
      }
    } else {
      stalls = 0;
    }

    for (size_t blk = 0; blk < x.psd.size(); ++blk) {
      x.psd[blk] = hermitize(x.psd[blk] + ap * dx.psd[blk]);
      s.psd[blk] = hermitize(s.psd[blk] + ad * ds.psd[blk]);
    }
    for (size_t blk = 0; blk < x.vec.size(); ++blk) {
      x.vec[blk] += ap * dx.vec[blk];
      s.vec[blk] += ad * ds.vec[blk];
    }
    y += ad * dy;

    if (!finite(x) || !finite(s) || !y.allFinite()) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }
    if (iter == opt.max_iterations - 1) sol.status = SolveStatus::MaxIterations;
  }

  if (opt.verbose && sol.status != SolveStatus::Optimal) {
    std::cerr << "    fallback check: best_score " << best_score << " pres "
              << best_sol.primal_residual << " dres " << best_sol.dual_residual
              << " relgap " << best_sol.gap << "\n";
  }
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::Infeasible &&
      std::isfinite(best_score)) {
    const int iters = sol.iterations;
    sol = best_sol;
    sol.iterations = iters;
    sol.status = SolveStatus::Optimal;
    x = std::move(best_x);
    s = std::move(best_s);
    y = std::move(best_y);
  }

  sol.x_psd = std::move(x.psd);
  sol.x_vec = std::move(x.vec);
  sol.s_psd = std::move(s.psd);
  sol.s_vec = std::move(s.vec);
  sol.y = std::move(y);
  return sol;
}

}  // namespace qi::conic
