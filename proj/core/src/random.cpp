#include "qi/random.hpp"

namespace qi {

namespace {

RVec dirichlet(int n, Rng& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = gamma(rng);
  return v / v.sum();
}

}  // namespace

CMat random_unitary(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    Complex rjj = r(j, j);
    q.col(j) *= (std::abs(rjj) > 0) ? rjj / std::abs(rjj) : 1.0;
  }
  return q;
}

CMat random_density_matrix(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  CMat rho = g * g.adjoint();
  return rho / rho.trace();
}

Povm random_projective_povm(int d, Rng& rng) {
  return projective_povm(random_unitary(d, rng));
}

WeightedAssemblage random_projective_assemblage(int d, int settings, Rng& rng) {
  std::vector<Povm> ms;
  for (int x = 0; x < settings; ++x) ms.push_back(random_projective_povm(d, rng));
  return WeightedAssemblage::uniform(std::move(ms));
}

SimulationMap random_simulation_map(const WeightedAssemblage& a, int m_out,
                                    int o_out, Rng& rng) {
  if (m_out < 1 || o_out < 1) {
    throw InputError("random_simulation_map: need at least one setting/outcome");
  }
  const int m_in = a.settings();
  // Joint p(x, y) = p(x) q(y|x) makes the weight consistency automatic.
  RMat joint(m_in, m_out);
  for (int x = 0; x < m_in; ++x) {
    joint.row(x) = a.weight(x) * dirichlet(m_out, rng).transpose();
  }
  SimulationMap map;
  map.output_weights = joint.colwise().sum().transpose();
  map.mixing = RMat(m_in, m_out);
  for (int y = 0; y < m_out; ++y) {
    map.mixing.col(y) = joint.col(y) / map.output_weights[y];
  }
  map.relabel.resize(static_cast<size_t>(m_out));
  for (int y = 0; y < m_out; ++y) {
    for (int x = 0; x < m_in; ++x) {
      const int o_in = a.measurement(x).outcomes();
      RMat q(o_out, o_in);
      for (int aa = 0; aa < o_in; ++aa) q.col(aa) = dirichlet(o_out, rng);
      map.relabel[static_cast<size_t>(y)].push_back(std::move(q));
    }
  }
  return map;
}

}  // namespace qi
