#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qi/bell.hpp"
#include "qi/incompat.hpp"
#include "qi/mub.hpp"

using namespace qi;

namespace {

HermitianOperator max_entangled(int d) {
  CVec phi = CVec::Zero(d * d);
  for (int i = 0; i < d; ++i) phi[i * d + i] = 1.0 / std::sqrt(double(d));
  return HermitianOperator((phi * phi.adjoint()).eval());
}

WeightedAssemblage dichotomic_povms(const std::vector<CMat>& obs) {
  std::vector<Povm> ms;
  for (const auto& ob : obs) {
    const int d = static_cast<int>(ob.rows());
    ms.emplace_back(d, std::vector<HermitianOperator>{
                           HermitianOperator(((CMat::Identity(d, d) + ob) / 2).eval()),
                           HermitianOperator(((CMat::Identity(d, d) - ob) / 2).eval())});
  }
  return WeightedAssemblage::uniform(std::move(ms));
}

}  // namespace

TEST_CASE("steering distance equals incompatibility on the maximally entangled state") {
  for (int m : {2, 3}) {
    WeightedAssemblage meas = mub_assemblage(build_mub(2, m), 1.0);
    SteeringReport sr = steering_distance(steer_from_state(max_entangled(2), meas));
    const double incompat = incompatibility(meas).value;
    CHECK(sr.value == doctest::Approx(incompat).epsilon(1e-5));
    CHECK(sr.gap < 1e-7);
  }
}

TEST_CASE("separable input is unsteerable") {
  CMat rho = kron(CMat::Identity(2, 2) / 2, CMat::Identity(2, 2) / 2);
  WeightedAssemblage meas = mub_assemblage(build_mub(2, 3), 1.0);
  SteeringReport sr = steering_distance(steer_from_state(HermitianOperator(rho), meas));
  CHECK(sr.value < 1e-7);
}

TEST_CASE("steering assemblage validates consistency of the reduced state") {
  WeightedAssemblage meas = mub_assemblage(build_mub(2, 2), 1.0);
  SteeringAssemblage sa = steer_from_state(max_entangled(2), meas);
  auto states = std::vector<std::vector<CMat>>{
      {sa.state(0, 0), sa.state(0, 1)},
      {sa.state(1, 0), 0.9 * sa.state(1, 1)},  // breaks the sum condition
  };
  CHECK_THROWS_AS(SteeringAssemblage{states}, InputError);
  // Restriction keeps the reduced state.
  SteeringAssemblage sub = sa.restrict({0});
  CHECK((sub.reduced_state() - sa.reduced_state()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("steering subset sandwich on the noisy family") {
  WeightedAssemblage meas = mub_assemblage(build_mub(2, 3), 0.95);
  SteeringAssemblage sa = steer_from_state(max_entangled(2), meas);
  const double s_full = steering_distance(sa).value;
  double pair_avg = 0.0;
  for (auto& pair : std::vector<std::vector<int>>{{0, 1}, {0, 2}, {1, 2}})
    pair_avg += steering_distance(sa.restrict(pair)).value / 3.0;
  CHECK(s_full >= pair_avg - 1e-6);
  const double s_12 = steering_distance(sa.restrict({0, 1})).value;
  CHECK(s_full >= (2.0 / 3.0) * s_12 - 1e-6);
}

TEST_CASE("behavior table validation rejects signaling") {
  RMat local(2, 2);
  local << 0.25, 0.25, 0.25, 0.25;
  RMat skew(2, 2);
  skew << 0.5, 0.0, 0.25, 0.25;  // Alice marginal depends on y
  CHECK_NOTHROW(BehaviorTable({{local, local}, {local, local}}));
  CHECK_THROWS_AS(BehaviorTable({{local, skew}, {local, local}}), InputError);
}

TEST_CASE("local behavior has zero nonlocal distance") {
  RMat local(2, 2);
  local << 0.25, 0.25, 0.25, 0.25;
  NonlocalityReport rep = nonlocality_distance(BehaviorTable({{local, local}, {local, local}}));
  CHECK(rep.value < 1e-8);
}

TEST_CASE("optimal averaged behavior is nonlocal and obeys the pair bound") {
  ChshSearchResult best = maximize_avg_chsh(99, 5);
  BehaviorTable q = behavior_from_quantum(HermitianOperator(best.state),
                                          dichotomic_povms(best.alice_obs),
                                          dichotomic_povms(best.bob_obs));
  NonlocalityReport rep = nonlocality_distance(q);
  CHECK(rep.value > 1e-3);
  double pair_avg = 0.0;
  for (auto& pair : std::vector<std::vector<int>>{{0, 1}, {0, 2}, {1, 2}})
    pair_avg += nonlocality_distance(q.restrict_a(pair)).value / 3.0;
  CHECK(rep.value >= pair_avg - 1e-6);
}

TEST_CASE("alternating ascent reaches the known maxima") {
  ChshSearchResult avg = maximize_avg_chsh(7, 8);
  CHECK(avg.best_average == doctest::Approx((4.0 * std::sqrt(2.0) + 2.0) / 3.0).epsilon(1e-4));
  CHECK(avg.best_average < (4.0 * std::sqrt(2.0) + 2.0) / 3.0 + 1e-6);

  ChshSearchResult single = maximize_single_chsh(7, 5);
  CHECK(single.best_average == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(single.values.chsh_12 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("no-signaling bounds of the correlator functionals") {
  RMat single(3, 2);
  single << 1, 1, 1, -1, 0, 0;
  CHECK(ns_correlator_bound(single) == doctest::Approx(4.0).epsilon(1e-7));

  RMat avg(3, 2);
  avg << 2.0 / 3, 2.0 / 3, 2.0 / 3, 0, 2.0 / 3, -2.0 / 3;
  CHECK(ns_correlator_bound(avg) == doctest::Approx(10.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("observables outside the unit ball are rejected") {
  CMat z(2, 2);
  z << 1, 0, 0, -1;
  std::vector<CMat> alice{2.0 * z, z, z};
  std::vector<CMat> bob{z, z};
  CHECK_THROWS_AS(chsh_values(max_entangled(2), alice, bob), InputError);
}
