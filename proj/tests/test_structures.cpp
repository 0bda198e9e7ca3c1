#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qi/mub.hpp"
#include "qi/random.hpp"
#include "qi/structures.hpp"

using namespace qi;

namespace {

const double kPauliGainPlateau = 0.5 * (1.0 / std::sqrt(2.0) - 1.0 / std::sqrt(3.0));

}  // namespace

TEST_CASE("gain on noise-free qubit bases hits the plateau") {
  WeightedAssemblage full = mub_assemblage(build_mub(2, 3), 1.0);
  GainReport rep = incompatibility_gain(full.restrict({0, 1}), full.measurement(2));
  CHECK(rep.delta == doctest::Approx(kPauliGainPlateau).epsilon(1e-6));
  CHECK(rep.i_n == doctest::Approx(kPauliGainPlateau).epsilon(1e-6));
  CHECK(rep.slack_n > -1e-7);
  CHECK(rep.slack_g > -1e-7);
  CHECK(rep.hypothesis_holds);
}

TEST_CASE("result 1 sandwich on random qubit trios") {
  Rng rng(41);
  for (int t = 0; t < 4; ++t) {
    Result1Report rep = check_result1(random_projective_assemblage(2, 3, rng));
    CHECK(rep.gain.slack_n > -1e-7);
    CHECK(rep.gain.slack_g > -1e-7);
    CHECK(rep.gain.hypothesis_holds);
  }
}

TEST_CASE("subset sandwich and pair average bounds") {
  WeightedAssemblage a = mub_assemblage(build_mub(2, 3), 0.95);
  SubsetBoundsReport rep = check_subset_bounds(a, {0, 1});
  CHECK(rep.lower_slack > -1e-7);
  CHECK(rep.upper_slack > -1e-7);
  REQUIRE(rep.has_pair_sandwich);
  CHECK(rep.avg_lower_slack > -1e-7);
  CHECK(rep.avg_upper_slack > -1e-7);
  // For the symmetric family the pair-based upper bound is tight.
  CHECK(rep.avg_upper_slack < 1e-6);
}

TEST_CASE("subset bounds hold for a three-dimensional four-setting family") {
  WeightedAssemblage a = mub_assemblage(build_mub(3, 4), 1.0);
  SubsetBoundsReport rep = check_subset_bounds(a, {0, 1, 2});
  CHECK(rep.lower_slack > -1e-7);
  CHECK(rep.upper_slack > -1e-7);
  CHECK_FALSE(rep.has_pair_sandwich);
  CHECK(rep.upper_slack < 1e-6);  // tight for unbiased bases
}

TEST_CASE("decomposition is exhaustive and tight for qubit bases") {
  DecompositionReport rep = decompose(mub_assemblage(build_mub(2, 3), 1.0));
  CHECK(rep.slack > -1e-7);
  CHECK(rep.i_gen + rep.i_pair + rep.i_hollow ==
        doctest::Approx(rep.i_total).epsilon(1e-6));
  CHECK(rep.i_total == doctest::Approx(0.5 * (1.0 - 1.0 / std::sqrt(3.0))).epsilon(1e-6));
}

TEST_CASE("decomposition of a compatible assemblage is all zeros") {
  DecompositionReport rep = decompose(mub_assemblage(build_mub(2, 3), 0.4));
  CHECK(rep.i_total < 1e-6);
  CHECK(rep.i_gen < 1e-6);
  CHECK(rep.i_pair < 1e-6);
  CHECK(rep.i_hollow < 1e-6);
}

TEST_CASE("decomposition upper-bounds random trios") {
  Rng rng(43);
  for (int t = 0; t < 3; ++t) {
    DecompositionReport rep = decompose(random_projective_assemblage(2, 3, rng));
    CHECK(rep.slack > -1e-7);
    CHECK(rep.i_gen >= -1e-9);
    CHECK(rep.i_pair >= -1e-9);
    CHECK(rep.i_hollow >= -1e-9);
  }
}

TEST_CASE("splicing a subset only replaces the listed settings") {
  WeightedAssemblage a = mub_assemblage(build_mub(2, 3), 1.0);
  WeightedAssemblage s = splice_closest_jm(a, {0, 1});
  REQUIRE(s.settings() == 3);
  CHECK((s.effect(2, 0) - a.effect(2, 0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(is_jointly_measurable(s.restrict({0, 1}), 1e-5));
  CHECK((s.weights() - a.weights()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("permutation and unitary conjugation are symmetries") {
  Rng rng(44);
  WeightedAssemblage a = random_projective_assemblage(2, 3, rng);
  const double base = incompatibility(a).value;

  WeightedAssemblage perm = permute_settings(a, {2, 0, 1});
  CHECK(incompatibility(perm).value == doctest::Approx(base).epsilon(1e-5));

  WeightedAssemblage conj = conjugate(a, random_unitary(2, rng));
  CHECK(incompatibility(conj).value == doctest::Approx(base).epsilon(1e-5));

  CHECK_THROWS_AS(conjugate(a, CMat(2.0 * CMat::Identity(2, 2))), InputError);
  CHECK_THROWS_AS(permute_settings(a, {0, 0, 1}), InputError);
}

TEST_CASE("splitting a measurement does not change the quantifier") {
  WeightedAssemblage a = mub_assemblage(build_mub(2, 2), 1.0);
  const double base = incompatibility(a).value;
  CHECK(incompatibility(split(a, 2)).value == doctest::Approx(base).epsilon(1e-5));
}

TEST_CASE("classical simulation cannot create incompatibility") {
  Rng rng(45);
  WeightedAssemblage a = mub_assemblage(build_mub(2, 3), 1.0);
  const double base = incompatibility(a).value;
  for (int t = 0; t < 3; ++t) {
    SimulationMap map = random_simulation_map(a, 2, 2, rng);
    CHECK(incompatibility(simulate(a, map)).value <= base + 1e-7);
  }
}
