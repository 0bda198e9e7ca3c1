#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qi/conic.hpp"
#include "qi/random.hpp"

using namespace qi;
using namespace qi::conic;

namespace {

// min <C, X> s.t. Tr X = 1, X >= 0; optimum is the smallest eigenvalue of C.
Program min_eig_program(const CMat& c) {
  Program p;
  int b = p.add_psd_block(static_cast<int>(c.rows()));
  p.add_psd_objective(b, c);
  Program::Constraint con;
  con.psd.push_back({b, CMat::Identity(c.rows(), c.cols())});
  con.rhs = 1.0;
  p.add_constraint(std::move(con));
  return p;
}

}  // namespace

TEST_CASE("SDP ground-state energy matches the eigen oracle") {
  Rng rng(21);
  CMat c = random_density_matrix(4, rng);
  c = (c - 0.4 * CMat::Identity(4, 4)).eval();
  Solution sol = solve(min_eig_program(c));
  REQUIRE(sol.ok());
  CHECK(sol.primal_value == doctest::Approx(min_eigenvalue(c)).epsilon(1e-7));
  CHECK(sol.gap < 1e-7);
  // Optimizer is a state achieving the optimum.
  CHECK(std::abs(sol.x_psd[0].trace().real() - 1.0) < 1e-7);
  CHECK(min_eigenvalue(sol.x_psd[0]) > -1e-9);
}

TEST_CASE("LP vertex selection") {
  Program p;
  int b = p.add_vec_block(3);
  RVec c(3);
  c << 3.0, -1.0, 2.0;
  p.add_vec_objective(b, c);
  Program::Constraint con;
  con.vec.push_back({b, RVec::Ones(3)});
  con.rhs = 1.0;
  p.add_constraint(std::move(con));
  Solution sol = solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.primal_value == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(sol.x_vec[0][1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible programs are flagged") {
  Program p;
  int b = p.add_vec_block(2);
  p.add_vec_objective(b, RVec::Ones(2));
  Program::Constraint con;
  con.vec.push_back({b, RVec::Ones(2)});
  con.rhs = -1.0;  // nonnegative variables cannot sum to -1
  p.add_constraint(std::move(con));
  Solution sol = solve(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("complex data is handled natively") {
  CMat c(2, 2);
  c << 0.0, Complex(0, -1), Complex(0, 1), 0.0;  // Pauli Y
  Solution sol = solve(min_eig_program(c));
  REQUIRE(sol.ok());
  CHECK(sol.primal_value == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("duplicate block terms in one row accumulate") {
  // Two half-identity terms on the same block must act like one identity.
  Rng rng(23);
  CMat c = random_density_matrix(3, rng);
  Program p;
  int b = p.add_psd_block(3);
  p.add_psd_objective(b, c);
  Program::Constraint con;
  con.psd.push_back({b, 0.5 * CMat::Identity(3, 3)});
  con.psd.push_back({b, 0.5 * CMat::Identity(3, 3)});
  con.rhs = 1.0;
  p.add_constraint(std::move(con));
  Solution sol = solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.primal_value == doctest::Approx(min_eigenvalue(c)).epsilon(1e-7));
}

TEST_CASE("mechanical dual negates the optimum") {
  Rng rng(22);
  for (int trial = 0; trial < 3; ++trial) {
    CMat c = random_density_matrix(3, rng);
    c = (c - CMat::Identity(3, 3) / 3.0).eval();
    Program p = min_eig_program(c);
    // Add a nonnegative slack coupled through a second row to exercise the
    // mixed-cone path.
    int v = p.add_vec_block(1);
    p.add_vec_objective(v, RVec::Ones(1));
    Program::Constraint con;
    con.vec.push_back({v, RVec::Ones(1)});
    con.psd.push_back({p.psd_count() - 1, 0.1 * CMat::Identity(3, 3)});
    con.rhs = 0.2;
    p.add_constraint(std::move(con));

    Solution primal = solve(p);
    Solution dual = solve(dualize(p));
    REQUIRE(primal.ok());
    REQUIRE(dual.ok());
    CHECK(std::abs(primal.primal_value + dual.primal_value) < 1e-6);
  }
}

TEST_CASE("program dump lists blocks and rows") {
  Program p = min_eig_program(CMat::Identity(2, 2));
  std::string text = dump_program(p);
  CHECK(text.find("psd") != std::string::npos);
  CHECK(text.find("rows") != std::string::npos);
}

TEST_CASE("input validation") {
  Program p;
  int b = p.add_psd_block(2);
  CHECK_THROWS_AS(p.add_psd_objective(b, CMat::Identity(3, 3)), InputError);
  Program::Constraint con;
  con.psd.push_back({b, CMat::Identity(3, 3)});
  CHECK_THROWS_AS(p.add_constraint(std::move(con)), InputError);
}
