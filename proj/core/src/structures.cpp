#include "qi/structures.hpp"

#include <algorithm>
#include <cmath>

namespace qi {

namespace {

double rinner(const CMat& a, const CMat& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

CMat diag_subblock_t(const CMat& e, int a, int d) {
  return e.block(a * d, a * d, d, d).transpose();
}

void require_solved(const conic::Solution& sol, const char* what) {
  if (sol.status != conic::SolveStatus::Optimal) {
    throw SolverError(std::string(what) + ": conic solve ended with status " +
                      conic::to_string(sol.status));
  }
}

// Diamond-distance scaffolding shared by the hull and intersection programs:
// variables a_x >= 0, Z_x, S1_x, S2_x with
//   Z_x - S1_x + sum_a |a><a| (x) (F_{a|x} - M_{a|x})^T = 0
//   a_x 1 - Tr_out[Z_x] - S2_x = 0
// and objective sum_x p(x) a_x. The callback appends the variable terms that
// make up F_{a|x} for a given outcome-diagonal coefficient.
template <typename FTerms>
void add_distance_rows(conic::Program& p, const WeightedAssemblage& target,
                       FTerms&& f_terms) {
  const int d = target.dim();
  const int m = target.settings();
  const int blk_a = p.add_vec_block(m);
  p.add_vec_objective(blk_a, target.weights());
  for (int x = 0; x < m; ++x) {
    const int o = target.measurement(x).outcomes();
    const int blk_z = p.add_psd_block(o * d);
    const int blk_s1 = p.add_psd_block(o * d);
    const int blk_s2 = p.add_psd_block(d);
    for (const auto& e : hermitian_basis(o * d)) {
      conic::Program::Constraint con;
      con.psd.push_back({blk_z, e});
      con.psd.push_back({blk_s1, -e});
      double rhs = 0;
      for (int a = 0; a < o; ++a) {
        CMat sub = diag_subblock_t(e, a, d);
        if (sub.cwiseAbs().maxCoeff() > 0) {
          rhs += rinner(sub, target.effect(x, a));
          f_terms(con, x, a, sub);
        }
      }
      con.rhs = rhs;
      p.add_constraint(std::move(con));
    }
    for (const auto& e : hermitian_basis(d)) {
      conic::Program::Constraint con;
      RVec coeff = RVec::Zero(m);
      coeff[x] = e.trace().real();
      if (coeff[x] != 0) con.vec.push_back({blk_a, coeff});
      con.psd.push_back({blk_z, -kron(CMat::Identity(o, o), e)});
      con.psd.push_back({blk_s2, -e});
      con.rhs = 0;
      p.add_constraint(std::move(con));
    }
  }
}

constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

// Position of setting x within pair pp, or -1 when absent.
int pair_position(int pp, int x) {
  if (kPairs[pp][0] == x) return 0;
  if (kPairs[pp][1] == x) return 1;
  return -1;
}

}  // namespace

WeightedAssemblage permute_settings(const WeightedAssemblage& a,
                                    const std::vector<int>& perm) {
  if (perm.size() != static_cast<size_t>(a.settings())) {
    throw InputError("permute_settings: permutation length mismatch");
  }
  std::vector<bool> seen(perm.size(), false);
  for (int i : perm) {
    if (i < 0 || i >= a.settings() || seen[static_cast<size_t>(i)]) {
      throw InputError("permute_settings: not a permutation of the settings");
    }
    seen[static_cast<size_t>(i)] = true;
  }
  std::vector<Povm> ms;
  RVec w(a.settings());
  for (size_t i = 0; i < perm.size(); ++i) {
    ms.push_back(a.measurement(perm[i]));
    w[static_cast<Eigen::Index>(i)] = a.weight(perm[i]);
  }
  return WeightedAssemblage(std::move(ms), std::move(w));
}

WeightedAssemblage conjugate(const WeightedAssemblage& a, const CMat& unitary) {
  const int d = a.dim();
  if (unitary.rows() != d || unitary.cols() != d ||
      (unitary * unitary.adjoint() - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("conjugate: not a unitary of matching dimension");
  }
  std::vector<Povm> ms;
  for (const auto& mm : a.measurements()) {
    std::vector<HermitianOperator> eff;
    for (const auto& e : mm.effects()) {
      eff.emplace_back((unitary * e.mat() * unitary.adjoint()).eval());
    }
    ms.emplace_back(d, std::move(eff));
  }
  return WeightedAssemblage(std::move(ms), a.weights());
}

WeightedAssemblage splice_closest_jm(const WeightedAssemblage& a,
                                     const std::vector<int>& c,
                                     const conic::SolverOptions& opt) {
  WeightedAssemblage jm = closest_jm_subset(a, c, opt);
  std::vector<Povm> ms = a.measurements();
  for (size_t i = 0; i < c.size(); ++i) {
    ms[static_cast<size_t>(c[i])] = jm.measurement(static_cast<int>(i));
  }
  return WeightedAssemblage(std::move(ms), a.weights());
}

GainReport incompatibility_gain(const WeightedAssemblage& base, const Povm& added,
                                const conic::SolverOptions& opt) {
  const int m = base.settings();
  WeightedAssemblage before = WeightedAssemblage::uniform(base.measurements());
  std::vector<Povm> full_ms = base.measurements();
  full_ms.push_back(added);
  WeightedAssemblage after = WeightedAssemblage::uniform(std::move(full_ms));

  GainReport rep;
  rep.i_before = incompatibility(before, opt).value;
  rep.i_after = incompatibility(after, opt).value;
  rep.delta = rep.i_after - rep.i_before;

  // Leave-one-out subsets of the upgraded assemblage, in index order.
  std::vector<Povm> n_parts;
  std::vector<Povm> g_parts;
  double i_base_subset = 0.0, i_other_max = 0.0;
  for (int skip = m; skip >= 0; --skip) {
    std::vector<int> subset;
    for (int x = 0; x <= m; ++x)
      if (x != skip) subset.push_back(x);
    IncompatReport sub = incompatibility(after.restrict(subset), opt);
    if (skip == m) i_base_subset = sub.value;
    else i_other_max = std::max(i_other_max, sub.value);
    for (const auto& povm : sub.closest_jm.measurements()) n_parts.push_back(povm);
    g_parts.push_back(sub.parent);
  }
  rep.hypothesis_holds = i_base_subset >= i_other_max - 1e-9;
  rep.n_assemblage = WeightedAssemblage::uniform(std::move(n_parts));
  rep.g_assemblage = WeightedAssemblage::uniform(std::move(g_parts));
  rep.i_n = incompatibility(rep.n_assemblage, opt).value;
  rep.i_g = incompatibility(rep.g_assemblage, opt).value;
  rep.slack_n = rep.i_n - rep.delta;
  rep.slack_g = rep.i_g - rep.i_n;
  return rep;
}

Result1Report check_result1(const WeightedAssemblage& m3,
                            const conic::SolverOptions& opt) {
  if (m3.settings() != 3) throw InputError("check_result1: needs 3 settings");
  double best = -1;
  int best_pair = 0;
  for (int pp = 0; pp < 3; ++pp) {
    double v = incompatibility(
                   WeightedAssemblage::uniform(
                       {m3.measurement(kPairs[pp][0]), m3.measurement(kPairs[pp][1])}),
                   opt)
                   .value;
    if (v > best) {
      best = v;
      best_pair = pp;
    }
  }
  Result1Report rep;
  const int s = kPairs[best_pair][0], t = kPairs[best_pair][1];
  rep.permutation = {s, t, 3 - s - t};
  WeightedAssemblage base = WeightedAssemblage::uniform(
      {m3.measurement(s), m3.measurement(t)});
  rep.gain = incompatibility_gain(base, m3.measurement(3 - s - t), opt);
  return rep;
}

SubsetBoundsReport check_subset_bounds(const WeightedAssemblage& m,
                                       const std::vector<int>& c,
                                       const conic::SolverOptions& opt) {
  if (c.empty() || c.size() >= static_cast<size_t>(m.settings())) {
    throw InputError("check_subset_bounds: need a nonempty proper subset");
  }
  SubsetBoundsReport rep;
  rep.i_total = incompatibility(m, opt).value;
  rep.i_subset = incompatibility(m.restrict(c), opt).value;
  rep.i_spliced = incompatibility(splice_closest_jm(m, c, opt), opt).value;
  double wc = 0;
  for (int x : c) wc += m.weight(x);
  rep.lower_slack = rep.i_total - wc * rep.i_subset;
  rep.upper_slack = wc * rep.i_subset + rep.i_spliced - rep.i_total;

  const bool uniform =
      (m.weights() - RVec::Constant(m.settings(), 1.0 / m.settings()))
          .cwiseAbs()
          .maxCoeff() < 1e-9;
  if (m.settings() == 3 && uniform) {
    rep.has_pair_sandwich = true;
    std::vector<Povm> n_parts;
    double avg = 0;
    for (const auto& pair : kPairs) {
      IncompatReport sub = incompatibility(
          WeightedAssemblage::uniform({m.measurement(pair[0]), m.measurement(pair[1])}),
          opt);
      avg += sub.value / 3.0;
      for (const auto& povm : sub.closest_jm.measurements()) n_parts.push_back(povm);
    }
    rep.pair_average = avg;
    rep.i_n = incompatibility(WeightedAssemblage::uniform(std::move(n_parts)), opt).value;
    rep.avg_lower_slack = rep.i_total - rep.pair_average;
    rep.avg_upper_slack = rep.pair_average + rep.i_n - rep.i_total;
  }
  return rep;
}

DecompositionReport decompose(const WeightedAssemblage& m3,
                              const conic::SolverOptions& opt) {
  if (m3.settings() != 3) throw InputError("decompose: needs 3 settings");
  const int d = m3.dim();
  const auto counts = m3.outcome_counts();
  DecompositionReport rep;
  rep.i_total = incompatibility(m3, opt).value;

  // Stage 1: distance to the convex hull of the three pair-compatible sets.
  // Hull weights w_pp are absorbed into subnormalized components: each pair
  // gets a parent with total mass w_pp and the leftover setting gets a free
  // measurement of the same mass.
  std::vector<DeterministicStrategySet> pair_sets;
  for (const auto& pair : kPairs) {
    pair_sets.emplace_back(std::vector<int>{counts[static_cast<size_t>(pair[0])],
                                            counts[static_cast<size_t>(pair[1])]});
  }
  {
    conic::Program p;
    std::vector<std::vector<int>> blk_parent(3);
    std::vector<std::vector<int>> blk_third(3);
    for (int pp = 0; pp < 3; ++pp) {
      for (std::int64_t g = 0; g < pair_sets[static_cast<size_t>(pp)].size(); ++g) {
        blk_parent[static_cast<size_t>(pp)].push_back(p.add_psd_block(d));
      }
      const int u = 3 - kPairs[pp][0] - kPairs[pp][1];
      for (int a = 0; a < counts[static_cast<size_t>(u)]; ++a) {
        blk_third[static_cast<size_t>(pp)].push_back(p.add_psd_block(d));
      }
    }
    const int blk_w = p.add_vec_block(3);

    add_distance_rows(p, m3,
                      [&](conic::Program::Constraint& con, int x, int a, const CMat& sub) {
                        for (int pp = 0; pp < 3; ++pp) {
                          const int pos = pair_position(pp, x);
                          if (pos >= 0) {
                            const auto& set = pair_sets[static_cast<size_t>(pp)];
                            for (std::int64_t g = 0; g < set.size(); ++g) {
                              if (set.outcome(g, pos) == a) {
                                con.psd.push_back(
                                    {blk_parent[static_cast<size_t>(pp)][static_cast<size_t>(g)], sub});
                              }
                            }
                          } else {
                            con.psd.push_back(
                                {blk_third[static_cast<size_t>(pp)][static_cast<size_t>(a)], sub});
                          }
                        }
                      });
    // Mass constraints: parents and leftover measurements each sum to w_pp 1.
    for (int pp = 0; pp < 3; ++pp) {
      for (const auto& e : hermitian_basis(d)) {
        RVec coeff = RVec::Zero(3);
        coeff[pp] = -e.trace().real();
        conic::Program::Constraint con1;
        for (int b : blk_parent[static_cast<size_t>(pp)]) con1.psd.push_back({b, e});
        if (coeff[pp] != 0) con1.vec.push_back({blk_w, coeff});
        con1.rhs = 0;
        p.add_constraint(std::move(con1));
        conic::Program::Constraint con2;
        for (int b : blk_third[static_cast<size_t>(pp)]) con2.psd.push_back({b, e});
        if (coeff[pp] != 0) con2.vec.push_back({blk_w, coeff});
        con2.rhs = 0;
        p.add_constraint(std::move(con2));
      }
    }
    conic::Program::Constraint total;
    total.vec.push_back({blk_w, RVec::Ones(3)});
    total.rhs = 1.0;
    p.add_constraint(std::move(total));

    conic::Solution sol = conic::solve(p, opt);
    require_solved(sol, "decompose hull stage");
    rep.i_gen = std::max(0.0, sol.primal_value);

    std::vector<Povm> ms;
    for (int x = 0; x < 3; ++x) {
      std::vector<CMat> eff(static_cast<size_t>(counts[static_cast<size_t>(x)]),
                            CMat::Zero(d, d));
      for (int pp = 0; pp < 3; ++pp) {
        const int pos = pair_position(pp, x);
        if (pos >= 0) {
          const auto& set = pair_sets[static_cast<size_t>(pp)];
          for (std::int64_t g = 0; g < set.size(); ++g) {
            eff[static_cast<size_t>(set.outcome(g, pos))] +=
                sol.x_psd[static_cast<size_t>(
                    blk_parent[static_cast<size_t>(pp)][static_cast<size_t>(g)])];
          }
        } else {
          for (int a = 0; a < counts[static_cast<size_t>(x)]; ++a) {
            eff[static_cast<size_t>(a)] += sol.x_psd[static_cast<size_t>(
                blk_third[static_cast<size_t>(pp)][static_cast<size_t>(a)])];
          }
        }
      }
      ms.push_back(sanitize_povm(d, eff));
    }
    rep.m_conv = WeightedAssemblage(std::move(ms), m3.weights());
  }

  // Stage 2: distance from the hull point to the pairwise compatible set.
  // Every pair shares a full parent; marginals of overlapping pairs must
  // agree, which pins down one measurement per setting.
  {
    conic::Program p;
    std::vector<std::vector<int>> blk_parent(3);
    for (int pp = 0; pp < 3; ++pp) {
      for (std::int64_t g = 0; g < pair_sets[static_cast<size_t>(pp)].size(); ++g) {
        blk_parent[static_cast<size_t>(pp)].push_back(p.add_psd_block(d));
      }
    }
    // Canonical pair representing each setting: the first pair containing it.
    auto canonical = [](int x) { return x == 2 ? 1 : 0; };

    add_distance_rows(p, rep.m_conv,
                      [&](conic::Program::Constraint& con, int x, int a, const CMat& sub) {
                        const int pp = canonical(x);
                        const auto& set = pair_sets[static_cast<size_t>(pp)];
                        const int pos = pair_position(pp, x);
                        for (std::int64_t g = 0; g < set.size(); ++g) {
                          if (set.outcome(g, pos) == a) {
                            con.psd.push_back(
                                {blk_parent[static_cast<size_t>(pp)][static_cast<size_t>(g)], sub});
                          }
                        }
                      });
    for (int pp = 0; pp < 3; ++pp) {
      for (const auto& e : hermitian_basis(d)) {
        conic::Program::Constraint con;
        for (int b : blk_parent[static_cast<size_t>(pp)]) con.psd.push_back({b, e});
        con.rhs = e.trace().real();
        p.add_constraint(std::move(con));
      }
    }
    // Overlap consistency for every setting shared by two pairs.
    for (int x = 0; x < 3; ++x) {
      std::vector<int> owners;
      for (int pp = 0; pp < 3; ++pp)
        if (pair_position(pp, x) >= 0) owners.push_back(pp);
      const int p1 = owners[0], p2 = owners[1];
      for (int a = 0; a < counts[static_cast<size_t>(x)]; ++a) {
        for (const auto& e : hermitian_basis(d)) {
          conic::Program::Constraint con;
          const auto& set1 = pair_sets[static_cast<size_t>(p1)];
          for (std::int64_t g = 0; g < set1.size(); ++g) {
            if (set1.outcome(g, pair_position(p1, x)) == a) {
              con.psd.push_back({blk_parent[static_cast<size_t>(p1)][static_cast<size_t>(g)], e});
            }
          }
          const auto& set2 = pair_sets[static_cast<size_t>(p2)];
          for (std::int64_t g = 0; g < set2.size(); ++g) {
            if (set2.outcome(g, pair_position(p2, x)) == a) {
              con.psd.push_back({blk_parent[static_cast<size_t>(p2)][static_cast<size_t>(g)], -e});
            }
          }
          con.rhs = 0;
          p.add_constraint(std::move(con));
        }
      }
    }
    conic::Solution sol = conic::solve(p, opt);
    require_solved(sol, "decompose intersection stage");
    rep.i_pair = std::max(0.0, sol.primal_value);

    std::vector<Povm> ms;
    for (int x = 0; x < 3; ++x) {
      const int pp = canonical(x);
      const auto& set = pair_sets[static_cast<size_t>(pp)];
      std::vector<CMat> eff(static_cast<size_t>(counts[static_cast<size_t>(x)]),
                            CMat::Zero(d, d));
      for (std::int64_t g = 0; g < set.size(); ++g) {
        eff[static_cast<size_t>(set.outcome(g, pair_position(pp, x)))] +=
            sol.x_psd[static_cast<size_t>(
                blk_parent[static_cast<size_t>(pp)][static_cast<size_t>(g)])];
      }
      ms.push_back(sanitize_povm(d, eff));
    }
    rep.m_pair = WeightedAssemblage(std::move(ms), m3.weights());
  }

  rep.i_hollow = incompatibility(rep.m_pair, opt).value;
  rep.slack = rep.i_gen + rep.i_pair + rep.i_hollow - rep.i_total;
  return rep;
}

}  // namespace qi
