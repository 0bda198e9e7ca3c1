#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qi/incompat.hpp"
#include "qi/mub.hpp"
#include "qi/random.hpp"

using namespace qi;

TEST_CASE("analytic anchors for unbiased bases") {
  IncompatReport r22 = incompatibility(mub_assemblage(build_mub(2, 2), 1.0));
  CHECK(r22.value == doctest::Approx(0.5 * (1.0 - 1.0 / std::sqrt(2.0))).epsilon(1e-6));
  CHECK(r22.gap < 1e-7);

  IncompatReport r32 = incompatibility(mub_assemblage(build_mub(3, 2), 1.0));
  CHECK(r32.value ==
        doctest::Approx((2.0 / 3.0) * (1.0 - (1.0 + std::sqrt(3.0)) / 4.0)).epsilon(1e-6));
}

TEST_CASE("single and commuting measurements are compatible") {
  Rng rng(31);
  Povm p = random_projective_povm(2, rng);
  WeightedAssemblage one = WeightedAssemblage::uniform({p});
  CHECK(incompatibility(one).value < 1e-7);
  CHECK(is_jointly_measurable(one));

  WeightedAssemblage twin = WeightedAssemblage::uniform({p, p});
  CHECK(incompatibility(twin).value < 1e-7);
  CHECK(is_jointly_measurable(twin));
  CHECK_FALSE(is_jointly_measurable(mub_assemblage(build_mub(2, 2), 1.0)));
}

TEST_CASE("joint measurability flips exactly at the robustness threshold") {
  MubFamily fam = build_mub(2, 3);
  const double eta_star = white_noise_robustness(fam).eta_star;
  CHECK(is_jointly_measurable(mub_assemblage(fam, eta_star - 1e-3)));
  CHECK_FALSE(is_jointly_measurable(mub_assemblage(fam, eta_star + 1e-3)));
}

TEST_CASE("dual certificate is feasible and matches the optimum") {
  WeightedAssemblage a = mub_assemblage(build_mub(2, 3), 0.9);
  IncompatReport rep = incompatibility(a);
  CHECK(rep.certificate.feasibility_defect(a) < 1e-7);
  CHECK(std::abs(rep.certificate.value - rep.value) < 1e-6);
  CHECK(std::abs(rep.certificate.evaluate(a) - rep.value) < 1e-6);

  // As a witness it lower-bounds the quantifier of any same-scenario
  // assemblage; on a jointly measurable one that bound must be non-positive.
  WeightedAssemblage jm = mub_assemblage(build_mub(2, 3), 0.4);
  CHECK(rep.certificate.evaluate(jm) < 1e-6);
}

TEST_CASE("closest jointly measurable optimizer achieves the distance") {
  WeightedAssemblage a = mub_assemblage(build_mub(2, 2), 1.0);
  IncompatReport rep = incompatibility(a);
  CHECK(is_jointly_measurable(rep.closest_jm, 1e-5));
  CHECK(assemblage_diamond_distance(a, rep.closest_jm) ==
        doctest::Approx(rep.value).epsilon(1e-4));
}

TEST_CASE("diamond distance is a metric on measurements") {
  Rng rng(33);
  Povm m = random_projective_povm(2, rng);
  Povm n = random_projective_povm(2, rng);
  Povm k = random_projective_povm(2, rng);
  CHECK(measurement_diamond_distance(m, m) < 1e-7);
  const double mn = measurement_diamond_distance(m, n);
  const double nm = measurement_diamond_distance(n, m);
  CHECK(mn == doctest::Approx(nm).epsilon(1e-6));
  CHECK(mn <= measurement_diamond_distance(m, k) +
                  measurement_diamond_distance(k, n) + 1e-7);
  CHECK(mn >= 0.0);
}

TEST_CASE("diamond distance dominates the state-discrimination difference") {
  // Feeding any fixed state gives a lower bound on the channel distance.
  Rng rng(34);
  Povm m = random_projective_povm(2, rng);
  Povm n = random_projective_povm(2, rng);
  const double dist = measurement_diamond_distance(m, n);
  for (int t = 0; t < 5; ++t) {
    CMat rho = random_density_matrix(2, rng);
    double tv = 0.0;
    for (int a = 0; a < 2; ++a)
      tv += std::abs(((m.effect(a).mat() - n.effect(a).mat()) * rho).trace().real());
    CHECK(dist >= 0.5 * tv - 1e-7);
  }
}

TEST_CASE("restricting to a subset keeps renormalized weights") {
  WeightedAssemblage a = mub_assemblage(build_mub(2, 3), 1.0);
  WeightedAssemblage sub = closest_jm_subset(a, {0, 1});
  REQUIRE(sub.settings() == 2);
  CHECK(sub.weight(0) == doctest::Approx(0.5));
  CHECK(is_jointly_measurable(sub, 1e-5));
}

TEST_CASE("sanitize_povm repairs solver noise but rejects garbage") {
  Rng rng(35);
  Povm p = random_projective_povm(3, rng);
  std::vector<CMat> noisy;
  for (int a = 0; a < 3; ++a)
    noisy.push_back(p.effect(a).mat() - 1e-9 * CMat::Identity(3, 3));
  Povm cleaned = sanitize_povm(3, noisy);
  for (int a = 0; a < 3; ++a)
    CHECK((cleaned.effect(a).mat() - p.effect(a).mat()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(sanitize_povm(3, {CMat(-CMat::Identity(3, 3))}), SolverError);
}
