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
#include "uqthermo/operators.hpp"

using namespace uqthermo;
using namespace uqthermo::testsupport;

TEST_CASE("make_density accepts the flat qubit state") {
  const DensityOperator pi2 = make_density(diag2(0.5, 0.5));
  CHECK(pi2.dim() == 2);
  CHECK(pi2.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(pi2.clip_warning());

  const DensityOperator mixed = make_density(CMat::Identity(2, 2) / 2.0);
  CHECK(trace_distance(pi2, mixed) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("make_density rejects invalid input") {
  CHECK_THROWS_AS(make_density(diag2(1.2, -0.2)), Error);
  try {
    make_density(diag2(1.2, -0.2));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPSD);
  }

  CHECK_THROWS_AS(make_density(CMat::Zero(2, 3)), Error);
  CHECK_THROWS_AS(make_density(diag2(0.7, 0.7)), Error);  // trace 1.4

  CMat skew = CMat::Zero(2, 2);
  skew(0, 1) = Complex(0.5, 0.0);
  skew(1, 0) = Complex(-0.5, 0.0);
  skew(0, 0) = skew(1, 1) = 0.5;
  CHECK_THROWS_AS(make_density(skew), Error);
}

TEST_CASE("make_density clips roundoff with a warning in the flagged band") {
  const DensityOperator rho = make_density(diag2(1.0 + 1e-8, -1e-8));
  CHECK(rho.clip_warning());
  CHECK(rho.matrix()(1, 1).real() >= 0.0);

  const DensityOperator quiet = make_density(diag2(1.0 + 1e-10, -1e-10));
  CHECK_FALSE(quiet.clip_warning());
}

TEST_CASE("make_density is idempotent") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator rho = random_state(rng, 3);
    const DensityOperator again = make_density(rho.matrix());
    CHECK((rho.matrix() - again.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("trace distance on battery states") {
  const DensityOperator pi2 = make_density(diag2(0.5, 0.5));
  const DensityOperator pi4 = make_density(diag2(0.75, 0.25));
  const DensityOperator excited = make_density(diag2(0.0, 1.0));

  CHECK(trace_distance(pi2, pi2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(trace_distance(pi2, pi4) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(trace_distance(excited, pi2) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(trace_distance(pi2.matrix(), CMat::Identity(3, 3)), Error);
}

TEST_CASE("trace distance is a symmetric metric on random operators") {
  std::mt19937 rng(11);
  for (Index d : {2, 4, 8}) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMat a = random_hermitian(rng, d);
      const CMat b = random_hermitian(rng, d);
      const CMat c = random_hermitian(rng, d);
      CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
      CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9);
    }
  }
}

TEST_CASE("tensor power basics") {
  const DensityOperator pi2 = make_density(diag2(0.5, 0.5));
  const DensityOperator sq = tensor_power(pi2, 2);
  CHECK(sq.dim() == 4);
  for (Index i = 0; i < 4; ++i) CHECK(sq.matrix()(i, i).real() == doctest::Approx(0.25));

  const DensityOperator rho = make_density(diag2(0.3, 0.7));
  CHECK((tensor_power(rho, 1).matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-15);

  const DensityOperator e3 = tensor_power(make_density(diag2(0.0, 1.0)), 3);
  CHECK(e3.matrix()(7, 7).real() == doctest::Approx(1.0));
  CHECK(e3.matrix().cwiseAbs().sum() == doctest::Approx(1.0));

  CHECK_THROWS_AS(tensor_power(pi2, 13), Error);
}

TEST_CASE("tensor power splits multiplicatively") {
  std::mt19937 rng(3);
  const DensityOperator rho = random_state(rng, 2);
  const CMat lhs = tensor_power(rho, 5).matrix();
  const CMat rhs = kron(tensor_power(rho, 2).matrix(), tensor_power(rho, 3).matrix());
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("herm_function spectral calculus") {
  const HermitianOperator h(diag2(0.25, 0.75));
  const HermitianOperator root = herm_function(h, ScalarFunction::power(0.5));
  CHECK(root.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(root.matrix()(1, 1).real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-10));

  std::mt19937 rng(19);
  const CMat any = random_hermitian(rng, 4);
  const HermitianOperator ha(any);
  CHECK((herm_function(ha, ScalarFunction::power(1.0)).matrix() - ha.matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  const HermitianOperator zero(CMat::Zero(3, 3));
  const CMat expz = herm_function(zero, ScalarFunction::exp()).matrix();
  CHECK((expz - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(herm_function(HermitianOperator(diag2(1.0, -0.5)), ScalarFunction::power(0.5)),
                  Error);
  CHECK_THROWS_AS(herm_function(HermitianOperator(diag2(1.0, 0.0)), ScalarFunction::log()), Error);
  CHECK_NOTHROW(herm_function(HermitianOperator(diag2(1.0, 0.0)), ScalarFunction::log(true)));
}

TEST_CASE("fractional power round-trips PSD matrices") {
  std::mt19937 rng(23);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const DensityOperator rho = random_state(rng, 4);
    const HermitianOperator powered = herm_function(rho.op(), ScalarFunction::power(alpha));
    const HermitianOperator back = herm_function(powered, ScalarFunction::power(1.0 / alpha));
    CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("spectrum reconstructs its operator") {
  std::mt19937 rng(29);
  for (Index d : {2, 5, 8}) {
    const CMat h = random_hermitian(rng, d, 2.0);
    const Spectrum s = eig(h);
    for (Index i = 0; i + 1 < d; ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i + 1));
    CHECK((s.reconstruct() - h).norm() <= 1e-8 * static_cast<double>(d));
  }
}
