/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/test_matrices.hpp"
#include "uqthermo/asymptotics.hpp"
#include "uqthermo/divergences.hpp"

using namespace uqthermo;
using namespace uqthermo::testsupport;

TEST_CASE("irreversibility rows match the closed forms") {
  SUBCASE("n = 2, eps = 0.1, delta = 0.5") {
    const RateSweepRow row = irreversibility_example(2, 0.1, 0.5, 9);
    CHECK(row.w_clean == doctest::Approx(-std::log2(0.9)).epsilon(1e-5));
    CHECK(row.c_clean == doctest::Approx(2.0 + std::log2(0.9)).epsilon(1e-5));
    CHECK(row.w_dirty == doctest::Approx(2.0 - std::log2(0.9)).epsilon(1e-5));
    CHECK(row.c_dirty_status == TaskVerdict::InfeasibleUpToCap);
    CHECK(row.c_dirty_analytic_infinite);
    CHECK(std::abs(row.delta_w_clean()) <= 1e-5);
    CHECK(std::abs(row.delta_c_clean()) <= 1e-5);
    CHECK(std::abs(row.delta_w_dirty()) <= 1e-5);
  }

  SUBCASE("n = 1 keeps a finite dirty formation cost") {
    const RateSweepRow row = irreversibility_example(1, 0.1, 0.5, 9);
    CHECK(row.w_clean == doctest::Approx(-std::log2(0.9)).epsilon(1e-5));
    CHECK(row.c_dirty_status == TaskVerdict::Pass);
    CHECK_FALSE(row.c_dirty_analytic_infinite);
    // Straight-segment closed form in the excitation coordinate.
    const double p_lo = 1.0 / 2.5;
    const double m_star = (0.9 - p_lo) / (0.5 - p_lo);
    CHECK(row.c_dirty == doctest::Approx(std::log2(m_star)).epsilon(1e-3));
  }

  SUBCASE("n = 3, eps = 0.3 formation closed form") {
    const RateSweepRow row = irreversibility_example(3, 0.3, 0.1, 5);
    CHECK(row.c_clean == doctest::Approx(3.0 + std::log2(0.7)).epsilon(1e-5));
  }

  SUBCASE("strict irreversibility signature") {
    const RateSweepRow row = irreversibility_example(2, 0.1, 0.5, 9);
    CHECK(row.w_dirty - row.w_clean == doctest::Approx(2.0).epsilon(2e-5));
  }

  CHECK_THROWS_AS(irreversibility_example(5, 0.1, 0.5, 9), Error);
  CHECK_THROWS_AS(irreversibility_example(2, 0.6, 0.5, 9), Error);
  CHECK_THROWS_AS(irreversibility_example(2, 0.1, -1.0, 9), Error);
}

TEST_CASE("optimal error at a given work rate") {
  StateSet p({make_density(diag2(0.0, 1.0))}, HullKind::Finite);
  StateSet e({battery_gibbs(2.0)}, HullKind::Finite);

  SUBCASE("rate 1 is free for the excited qubit") {
    CHECK(optimal_error_at_rate(p, e, 1, 1.0) == doctest::Approx(0.0).epsilon(1e-7));
  }

  SUBCASE("rate 2 forces error one half") {
    CHECK(optimal_error_at_rate(p, e, 1, 2.0) == doctest::Approx(0.5).epsilon(1e-7));
  }

  SUBCASE("vanishing rate makes the budget vacuous") {
    CHECK(optimal_error_at_rate(p, e, 1, 1e-6) <= 1e-5);
  }

  SUBCASE("non-decreasing in the rate and within [0, 1]") {
    double last = 0.0;
    for (double r : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
      const double a = optimal_error_at_rate(p, e, 1, r);
      CHECK(a >= last - 1e-7);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      last = a;
    }
  }
}

TEST_CASE("exponent and rate tables are constant in n") {
  const DensityOperator rho = make_density(diag2(0.9, 0.1));
  const DensityOperator tau = battery_gibbs(2.0);
  const ExponentTable table = exponent_and_rates(rho, tau, 0.2, {1, 2, 4});
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    CHECK(row.hoeffding_rate == doctest::Approx(table.rows[0].hoeffding_rate).epsilon(1e-12));
    CHECK(row.umegaki_rate == doctest::Approx(table.rows[0].umegaki_rate).epsilon(1e-12));
  }
  CHECK(table.rate_below_capacity);

  // Direct evaluation at each n agrees after normalization.
  for (int n : {1, 2, 4}) {
    CHECK(hoeffding_divergence(rho, tau, n, 0.2) / n ==
          doctest::Approx(table.rows[0].hoeffding_rate).epsilon(1e-9));
  }
  // Umegaki additivity on explicit tensor powers.
  CHECK(umegaki_relative_entropy(tensor_power(rho, 3), tensor_power(tau, 3)) / 3.0 ==
        doctest::Approx(table.rows[0].umegaki_rate).epsilon(1e-9));
}
