/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/test_matrices.hpp"
#include "uqthermo/basis.hpp"
#include "uqthermo/solver.hpp"

using namespace uqthermo;
using namespace uqthermo::testsupport;

namespace {

// Spec'd toy program: min tr[E pi_2] s.t. tr[(I-E)|1><1|] <= eps, 0 <= E <= I.
SdpProblem toy_test_program(double eps, double obj_scale = 1.0) {
  SdpProblem prob;
  prob.dim = 2;
  prob.objective.e_coeff = obj_scale * diag2(0.5, 0.5);
  LinearConstraint type1;
  type1.lhs.e_coeff = -ket_projector(1, 2);  // -<1|E|1> <= eps - 1
  type1.rhs = eps - 1.0;
  prob.inequalities.push_back(type1);
  return prob;
}

// Independent oracle: 2-d grid scan over diagonal tests (optimum is diagonal
// because every operator in the program is diagonal).
double toy_grid_oracle(double eps) {
  double best = 1e9;
  const int n = 2000;
  for (int ia = 0; ia <= n; ++ia) {
    for (int ib = 0; ib <= n; ++ib) {
      const double a = static_cast<double>(ia) / n;
      const double b = static_cast<double>(ib) / n;
      if (1.0 - b > eps) continue;
      best = std::min(best, 0.5 * (a + b));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("interval SDP reproduces the diagonal-scan oracle") {
  const double oracle = toy_grid_oracle(0.1);
  CHECK(oracle == doctest::Approx(0.45).epsilon(1e-3));

  auto [point, cert] = solve_sdp(toy_test_program(0.1));
  REQUIRE(cert.status == SolveStatus::Optimal);
  CHECK(cert.primal_value == doctest::Approx(0.45).epsilon(1e-7));
  CHECK(cert.gap <= 1e-7);
  CHECK(cert.primal_residual <= 1e-8);
  CHECK(point.e(0, 0).real() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(point.e(1, 1).real() == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("feasibility stub returns the pinned point") {
  SdpProblem prob;
  prob.dim = 2;
  const auto& basis = hermitian_basis(2);
  for (const CMat& g : basis) {
    LinearConstraint c;
    c.lhs.e_coeff = g;
    c.rhs = hs_inner(g, CMat::Identity(2, 2) / 2.0);
    prob.equalities.push_back(c);
  }
  auto [point, cert] = solve_sdp(prob);
  REQUIRE(cert.status == SolveStatus::Optimal);
  CHECK((point.e - CMat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("impossible trace constraint is certified infeasible") {
  SdpProblem prob;
  prob.dim = 2;
  LinearConstraint c;
  c.lhs.e_coeff = CMat::Identity(2, 2);
  c.rhs = 3.0;  // tr E <= 2 is forced by E <= I
  prob.equalities.push_back(c);
  auto [point, cert] = solve_sdp(prob);
  CHECK(cert.status == SolveStatus::Infeasible);
  CHECK(cert.infeasibility_margin >= 1e-9);
}

TEST_CASE("independent recompute of optimal points matches certificates") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    SdpProblem prob;
    prob.dim = 3;
    prob.objective.e_coeff = random_state(rng, 3).matrix();
    LinearConstraint c;
    c.lhs.e_coeff = -random_state(rng, 3).matrix();
    c.rhs = -0.5;
    prob.inequalities.push_back(c);
    auto [point, cert] = solve_sdp(prob);
    REQUIRE(cert.status == SolveStatus::Optimal);

    const double obj = hs_inner(prob.objective.e_coeff, point.e);
    CHECK(obj == doctest::Approx(cert.primal_value).epsilon(1e-8));
    const double resid = hs_inner(-c.lhs.e_coeff, point.e);
    CHECK(resid >= 0.5 - 1e-8);
    Eigen::SelfAdjointEigenSolver<CMat> es(point.e, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-8);
  }
}

TEST_CASE("scaling the objective preserves the argmin") {
  auto [p1, c1] = solve_sdp(toy_test_program(0.1, 1.0));
  auto [p5, c5] = solve_sdp(toy_test_program(0.1, 5.0));
  REQUIRE(c1.status == SolveStatus::Optimal);
  REQUIRE(c5.status == SolveStatus::Optimal);
  CHECK(c5.primal_value == doctest::Approx(5.0 * c1.primal_value).epsilon(1e-7));
  CHECK((p1.e - p5.e).norm() <= 1e-6);
}

TEST_CASE("commuting SDP agrees with the diagonalized LP") {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 6; ++trial) {
    const Index d = 4;
    const DensityOperator tau = random_diagonal_state(rng, d);
    const DensityOperator rho = random_diagonal_state(rng, d);
    const double eps = 0.2;

    SdpProblem prob;
    prob.dim = d;
    prob.objective.e_coeff = tau.matrix();
    LinearConstraint c;
    c.lhs.e_coeff = -rho.matrix();
    c.rhs = eps - 1.0;
    prob.inequalities.push_back(c);
    auto [point, cert] = solve_sdp(prob);
    REQUIRE(cert.status == SolveStatus::Optimal);

    // Same program over the diagonal entries only.
    RVec cvec(d);
    for (Index i = 0; i < d; ++i) cvec(i) = tau.matrix()(i, i).real();
    RMat a_ub(1, d);
    for (Index i = 0; i < d; ++i) a_ub(0, i) = -rho.matrix()(i, i).real();
    RVec b_ub(1);
    b_ub(0) = eps - 1.0;
    std::vector<ScalarBounds> bounds(static_cast<size_t>(d), ScalarBounds::box(0.0, 1.0));
    auto [xlp, lp_cert] = solve_lp(cvec, RMat(), RVec(), a_ub, b_ub, bounds);
    REQUIRE(lp_cert.status == SolveStatus::Optimal);
    CHECK(cert.primal_value == doctest::Approx(lp_cert.primal_value).epsilon(1e-7));
  }
}

TEST_CASE("LP basics") {
  SUBCASE("maximize x subject to x <= 1") {
    RVec c(1);
    c(0) = -1.0;  // maximize x
    RMat a_ub(1, 1);
    a_ub(0, 0) = 1.0;
    RVec b_ub(1);
    b_ub(0) = 1.0;
    auto [x, cert] = solve_lp(c, RMat(), RVec(), a_ub, b_ub, {ScalarBounds::nonneg()});
    REQUIRE(cert.status == SolveStatus::Optimal);
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("affine decomposition of the excited state over two batteries") {
    // Oracle: the 2x2 diagonal linear system pins (4, -3).
    // 0.5 a1 + (2/3) a2 = 0 ; 0.5 a1 + (1/3) a2 = 1 ; a1 + a2 = 1.
    RMat a_eq(3, 2);
    a_eq << 0.5, 2.0 / 3.0, 0.5, 1.0 / 3.0, 1.0, 1.0;
    RVec b_eq(3);
    b_eq << 0.0, 1.0, 1.0;
    RVec c = RVec::Zero(2);
    auto [x, cert] = solve_lp(c, a_eq, b_eq, RMat(), RVec(),
                              {ScalarBounds::free(), ScalarBounds::free()});
    REQUIRE(cert.status == SolveStatus::Optimal);
    CHECK(x(0) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(x(1) == doctest::Approx(-3.0).epsilon(1e-6));
  }

  SUBCASE("contradictory equalities are infeasible") {
    RMat a_eq(2, 1);
    a_eq << 1.0, 1.0;
    RVec b_eq(2);
    b_eq << 0.0, 1.0;
    RVec c = RVec::Zero(1);
    auto [x, cert] = solve_lp(c, a_eq, b_eq, RMat(), RVec(), {ScalarBounds::free()});
    CHECK(cert.status == SolveStatus::Infeasible);
    CHECK(cert.infeasibility_margin >= 1e-9);
  }
}

TEST_CASE("unbounded problems are recognized") {
  RVec c(1);
  c(0) = -1.0;  // minimize -x, x >= 0, unconstrained above
  auto [x, cert] = solve_lp(c, RMat(), RVec(), RMat(), RVec(), {ScalarBounds::nonneg()});
  CHECK(cert.status == SolveStatus::Unbounded);
}

TEST_CASE("tight tolerance profile reaches 1e-10 gaps") {
  SolverOptions tight;
  tight.tol_gap = 1e-10;
  tight.tol_feas = 1e-11;
  auto [point, cert] = solve_sdp(toy_test_program(0.1), tight);
  REQUIRE(cert.status == SolveStatus::Optimal);
  CHECK(cert.gap <= 1e-10);
  CHECK(cert.primal_value == doctest::Approx(0.45).epsilon(1e-10));
}
