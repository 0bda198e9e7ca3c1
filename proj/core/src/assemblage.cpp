#include "qi/assemblage.hpp"

#include <numeric>
#include <sstream>

#include <json.hpp>

namespace qi {

Povm::Povm(int dim, std::vector<HermitianOperator> effects, double tol)
    : dim_(dim), effects_(std::move(effects)) {
  if (dim_ <= 0) throw InputError("Povm: dimension must be positive");
  if (effects_.empty()) throw InputError("Povm: needs at least one effect");
  CMat sum = CMat::Zero(dim_, dim_);
  for (const auto& e : effects_) {
    if (e.dim() != dim_) throw InputError("Povm: effect dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMat> es(e.mat());
    if (es.eigenvalues().minCoeff() < -tol || es.eigenvalues().maxCoeff() > 1 + tol) {
      throw InputError("Povm: effect spectrum outside [0, 1]");
    }
    sum += e.mat();
  }
  if ((sum - CMat::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > tol) {
    throw InputError("Povm: effects do not sum to identity");
  }
}

Povm projective_povm(const CMat& basis) {
  const int d = static_cast<int>(basis.rows());
  if ((basis * basis.adjoint() - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("projective_povm: basis is not unitary");
  }
  std::vector<HermitianOperator> effects;
  for (int a = 0; a < d; ++a) {
    effects.emplace_back((basis.col(a) * basis.col(a).adjoint()).eval());
  }
  return Povm(d, std::move(effects));
}

Povm trivial_povm(int dim) {
  return Povm(dim, {identity_op(dim)});
}

WeightedAssemblage::WeightedAssemblage(std::vector<Povm> measurements, RVec weights)
    : measurements_(std::move(measurements)), weights_(std::move(weights)) {
  if (measurements_.empty()) throw InputError("assemblage: no measurements");
  if (weights_.size() != static_cast<Eigen::Index>(measurements_.size())) {
    throw InputError("assemblage: weight count mismatch");
  }
  const int d = measurements_[0].dim();
  for (const auto& m : measurements_) {
    if (m.dim() != d) throw InputError("assemblage: dimension mismatch across settings");
  }
  if (weights_.minCoeff() < -1e-12) throw InputError("assemblage: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw InputError("assemblage: weights must sum to 1");
  }
}

WeightedAssemblage WeightedAssemblage::uniform(std::vector<Povm> measurements) {
  const auto m = static_cast<Eigen::Index>(measurements.size());
  return WeightedAssemblage(std::move(measurements), RVec::Constant(m, 1.0 / double(m)));
}

std::vector<int> WeightedAssemblage::outcome_counts() const {
  std::vector<int> o;
  o.reserve(measurements_.size());
  for (const auto& m : measurements_) o.push_back(m.outcomes());
  return o;
}

bool WeightedAssemblage::strictly_weighted() const {
  return weights_.minCoeff() > 0.0;
}

WeightedAssemblage WeightedAssemblage::restrict(const std::vector<int>& subset) const {
  if (subset.empty()) throw InputError("restrict: empty subset");
  std::vector<Povm> ms;
  double total = 0;
  for (int x : subset) {
    if (x < 0 || x >= settings()) throw InputError("restrict: setting out of range");
    ms.push_back(measurements_[static_cast<size_t>(x)]);
    total += weights_[x];
  }
  if (total <= 0) throw InputError("restrict: zero total weight in subset");
  RVec w(static_cast<Eigen::Index>(subset.size()));
  for (size_t i = 0; i < subset.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights_[subset[i]] / total;
  return WeightedAssemblage(std::move(ms), std::move(w));
}

WeightedAssemblage concat(const WeightedAssemblage& a, const WeightedAssemblage& b,
                          double mix) {
  if (a.dim() != b.dim()) throw InputError("concat: dimension mismatch");
  if (!(mix > 0.0 && mix < 1.0)) throw InputError("concat: mix must lie in (0,1)");
  std::vector<Povm> ms = a.measurements();
  ms.insert(ms.end(), b.measurements().begin(), b.measurements().end());
  RVec w(a.settings() + b.settings());
  w.head(a.settings()) = mix * a.weights();
  w.tail(b.settings()) = (1.0 - mix) * b.weights();
  return WeightedAssemblage(std::move(ms), std::move(w));
}

WeightedAssemblage concat(const WeightedAssemblage& a, const WeightedAssemblage& b) {
  const double ma = a.settings(), mb = b.settings();
  return concat(a, b, ma / (ma + mb));
}

WeightedAssemblage concat(const WeightedAssemblage& a, const Povm& added) {
  return concat(a, WeightedAssemblage::uniform({added}));
}

WeightedAssemblage split(const WeightedAssemblage& a, const std::vector<int>& copies) {
  if (copies.size() != static_cast<size_t>(a.settings())) {
    throw InputError("split: copies count mismatch");
  }
  std::vector<Povm> ms;
  std::vector<double> w;
  for (int x = 0; x < a.settings(); ++x) {
    const int c = copies[static_cast<size_t>(x)];
    if (c < 1) throw InputError("split: copies must be >= 1");
    for (int k = 0; k < c; ++k) {
      ms.push_back(a.measurement(x));
      w.push_back(a.weight(x) / double(c));
    }
  }
  RVec wv = Eigen::Map<RVec>(w.data(), static_cast<Eigen::Index>(w.size()));
  return WeightedAssemblage(std::move(ms), wv);
}

WeightedAssemblage split(const WeightedAssemblage& a, int copies) {
  return split(a, std::vector<int>(static_cast<size_t>(a.settings()), copies));
}

WeightedAssemblage simulate(const WeightedAssemblage& a, const SimulationMap& map) {
  const int m_in = a.settings();
  const auto m_out = static_cast<int>(map.relabel.size());
  if (map.mixing.rows() != m_in || map.mixing.cols() != m_out ||
      map.output_weights.size() != m_out) {
    throw InputError("simulate: map shape mismatch");
  }
  // Consistency p(x) = sum_y q(y) p(x|y).
  RVec implied = map.mixing * map.output_weights;
  if ((implied - a.weights()).cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("simulate: inconsistent weights, p(x) != sum_y q(y) p(x|y)");
  }
  const int d = a.dim();
  std::vector<Povm> out;
  for (int y = 0; y < m_out; ++y) {
    if (map.relabel[static_cast<size_t>(y)].size() != static_cast<size_t>(m_in)) {
      throw InputError("simulate: relabel shape mismatch");
    }
    const int o_out = static_cast<int>(map.relabel[static_cast<size_t>(y)][0].rows());
    std::vector<CMat> eff(static_cast<size_t>(o_out), CMat::Zero(d, d));
    for (int x = 0; x < m_in; ++x) {
      const RMat& q = map.relabel[static_cast<size_t>(y)][static_cast<size_t>(x)];
      if (q.cols() != a.measurement(x).outcomes() || q.rows() != o_out) {
        throw InputError("simulate: relabel outcome mismatch");
      }
      for (int b = 0; b < o_out; ++b) {
        for (int aa = 0; aa < q.cols(); ++aa) {
          eff[static_cast<size_t>(b)] += map.mixing(x, y) * q(b, aa) * a.effect(x, aa);
        }
      }
    }
    std::vector<HermitianOperator> ops;
    for (auto& e : eff) ops.emplace_back(std::move(e));
    out.emplace_back(d, std::move(ops));
  }
  return WeightedAssemblage(std::move(out), map.output_weights);
}

Povm depolarize(const Povm& p, double eta) {
  if (eta < 0.0 || eta > 1.0) throw InputError("depolarize: eta outside [0,1]");
  const int d = p.dim();
  std::vector<HermitianOperator> eff;
  for (const auto& e : p.effects()) {
    CMat noisy = eta * e.mat() +
                 (1.0 - eta) * e.mat().trace() / double(d) * CMat::Identity(d, d);
    eff.emplace_back(std::move(noisy));
  }
  return Povm(d, std::move(eff));
}

WeightedAssemblage depolarize(const WeightedAssemblage& a, double eta) {
  std::vector<Povm> ms;
  for (const auto& m : a.measurements()) ms.push_back(depolarize(m, eta));
  return WeightedAssemblage(std::move(ms), a.weights());
}

WeightedAssemblage parent_povm_simulation(const Povm& parent,
                                          const DeterministicStrategySet& strategies) {
  if (strategies.size() != parent.outcomes()) {
    throw InputError("parent_povm_simulation: strategy count must match parent outcomes");
  }
  const int d = parent.dim();
  std::vector<Povm> ms;
  for (int x = 0; x < strategies.settings(); ++x) {
    std::vector<CMat> eff(static_cast<size_t>(strategies.outcome_count(x)),
                          CMat::Zero(d, d));
    for (std::int64_t lam = 0; lam < strategies.size(); ++lam) {
      eff[static_cast<size_t>(strategies.outcome(lam, x))] += parent.effect(static_cast<int>(lam)).mat();
    }
    std::vector<HermitianOperator> ops;
    for (auto& e : eff) ops.emplace_back(std::move(e));
    ms.emplace_back(d, std::move(ops));
  }
  return WeightedAssemblage::uniform(std::move(ms));
}

// JSON format: { "dim": d, "measurements": [ { "effects": [ {"re": [[..]],
// "im": [[..]]} ] } ], "weights": [..] }
std::string assemblage_to_json(const WeightedAssemblage& a) {
  nlohmann::json j;
  j["dim"] = a.dim();
  j["weights"] = std::vector<double>(a.weights().data(),
                                     a.weights().data() + a.weights().size());
  j["measurements"] = nlohmann::json::array();
  for (const auto& m : a.measurements()) {
    nlohmann::json jm;
    jm["effects"] = nlohmann::json::array();
    for (const auto& e : m.effects()) {
      nlohmann::json je;
      const int d = e.dim();
      std::vector<std::vector<double>> re(static_cast<size_t>(d)), im(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
          re[static_cast<size_t>(i)].push_back(e.mat()(i, k).real());
          im[static_cast<size_t>(i)].push_back(e.mat()(i, k).imag());
        }
      }
      je["re"] = re;
      je["im"] = im;
      jm["effects"].push_back(je);
    }
    j["measurements"].push_back(jm);
  }
  return j.dump(2);
}

WeightedAssemblage assemblage_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("assemblage JSON parse error: ") + e.what());
  }
  try {
    const int d = j.at("dim").get<int>();
    std::vector<Povm> ms;
    for (const auto& jm : j.at("measurements")) {
      std::vector<HermitianOperator> effects;
      for (const auto& je : jm.at("effects")) {
        const auto re = je.at("re").get<std::vector<std::vector<double>>>();
        const auto im = je.at("im").get<std::vector<std::vector<double>>>();
        CMat e(d, d);
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < d; ++k)
            e(i, k) = Complex(re.at(static_cast<size_t>(i)).at(static_cast<size_t>(k)),
                              im.at(static_cast<size_t>(i)).at(static_cast<size_t>(k)));
        effects.emplace_back(std::move(e));
      }
      ms.emplace_back(d, std::move(effects));
    }
    const auto w = j.at("weights").get<std::vector<double>>();
    RVec wv = Eigen::Map<const RVec>(w.data(), static_cast<Eigen::Index>(w.size()));
    return WeightedAssemblage(std::move(ms), wv);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("assemblage JSON structure error: ") + e.what());
  }
}

}  // namespace qi
