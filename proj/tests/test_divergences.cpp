/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "support/test_matrices.hpp"
#include "uqthermo/divergences.hpp"

using namespace uqthermo;
using namespace uqthermo::testsupport;

namespace {

StateSet singleton(const DensityOperator& rho) { return StateSet({rho}, HullKind::Finite); }

StateSet excited(int copies = 1) {
  return singleton(tensor_power(make_density(diag2(0.0, 1.0)), copies));
}

SolverOptions tight() {
  SolverOptions o;
  o.tol_gap = 1e-10;
  o.tol_feas = 1e-11;
  return o;
}

}  // namespace

TEST_CASE("d_min on the excited state versus batteries") {
  const double expected = -std::log2(0.45);  // 1.15200...

  SUBCASE("single battery") {
    const DivergenceResult r = d_min(excited(), singleton(battery_gibbs(2.0)), 0.1);
    CHECK(r.value_bits == doctest::Approx(expected).epsilon(1e-7));
    REQUIRE(r.test.has_value());
    CHECK(r.certificate.gap <= 1e-7);
  }

  SUBCASE("two batteries, optimum pinned at the flatter one") {
    StateSet e({battery_gibbs(2.0), battery_gibbs(3.0)}, HullKind::Finite);
    const DivergenceResult r = d_min(excited(), e, 0.1);
    CHECK(r.value_bits == doctest::Approx(expected).epsilon(1e-7));
    // Independent diagonal-test oracle on the same commuting instance.
    RVec rho(2), t2(2), t3(2);
    rho << 0.0, 1.0;
    t2 << 0.5, 0.5;
    t3 << 2.0 / 3.0, 1.0 / 3.0;
    const double oracle = dmin_diagonal_lp({rho}, {t2, t3}, 0.1);
    CHECK(r.value_bits == doctest::Approx(-std::log2(oracle)).epsilon(1e-7));
  }
}

TEST_CASE("d_min faithfulness on identical singletons") {
  std::mt19937 rng(2024);
  for (double eps : {0.1, 0.3}) {
    for (Index d : {2, 3}) {
      const DensityOperator rho = random_state(rng, d);
      const DivergenceResult r = d_min(singleton(rho), singleton(rho), eps);
      CHECK(r.value_bits == doctest::Approx(-std::log2(1.0 - eps)).epsilon(1e-6));
    }
  }
}

TEST_CASE("d_min_constrained") {
  StateSet e({battery_gibbs(2.0), battery_gibbs(3.0)}, HullKind::Finite);

  SUBCASE("K = E collapses to the oblivious-test value") {
    const DivergenceResult r = d_min_constrained(excited(), e, e, 0.1);
    CHECK(r.value_bits == doctest::Approx(-std::log2(0.9)).epsilon(1e-7));
  }

  SUBCASE("singleton K is vacuous") {
    StateSet k = singleton(battery_gibbs(5.0));
    const DivergenceResult constrained = d_min_constrained(excited(), e, k, 0.1);
    const DivergenceResult plain = d_min(excited(), e, 0.1);
    CHECK(constrained.value_bits == doctest::Approx(plain.value_bits).epsilon(1e-8));
  }

  SUBCASE("singleton E equals d_min") {
    StateSet e2 = singleton(battery_gibbs(2.0));
    const DivergenceResult constrained = d_min_constrained(excited(), e2, e2, 0.1);
    CHECK(constrained.value_bits == doctest::Approx(-std::log2(0.45)).epsilon(1e-7));
    CHECK(constrained.value_bits <= d_min(excited(), e2, 0.1).value_bits + 1e-6);
  }
}

TEST_CASE("d_max_pair") {
  SUBCASE("excited state against the flat battery") {
    const DivergenceResult r =
        d_max_pair(make_density(diag2(0.0, 1.0)), battery_gibbs(2.0), 0.1);
    CHECK(r.value_bits == doctest::Approx(1.0 + std::log2(0.9)).epsilon(1e-7));
    REQUIRE(r.maxpair.has_value());
    // Smoothed state should put weight 0.9 on the excited level.
    CHECK(r.maxpair->omega(1, 1).real() == doctest::Approx(0.9).epsilon(1e-5));
  }

  SUBCASE("identical states at zero smoothing") {
    std::mt19937 rng(9);
    const DensityOperator rho = random_state(rng, 3);
    const DivergenceResult r = d_max_pair(rho, rho, 0.0);
    CHECK(r.value_bits == doctest::Approx(0.0).epsilon(1e-7));
  }

  SUBCASE("commuting closed form at eps = 0") {
    const DivergenceResult r =
        d_max_pair(make_density(diag2(0.9, 0.1)), make_density(diag2(0.5, 0.5)), 0.0, tight());
    CHECK(r.value_bits == doctest::Approx(std::log2(1.8)).epsilon(1e-9));
  }

  SUBCASE("support mismatch beyond smoothing is certified infeasible") {
    const DivergenceResult r =
        d_max_pair(battery_gibbs(2.0), make_density(diag2(0.0, 1.0)), 0.0);
    CHECK(r.flag == DivergenceFlag::InfeasibleCertified);
    CHECK(std::isinf(r.value_bits));
    CHECK(r.certificate.infeasibility_margin >= 1e-9);
  }
}

TEST_CASE("d_max over sets") {
  SUBCASE("pairwise minimum picks the flatter battery") {
    StateSet e({battery_gibbs(2.0), battery_gibbs(3.0)}, HullKind::Finite);
    const DivergenceResult r = d_max(excited(), e, 0.1);
    CHECK(r.value_bits == doctest::Approx(1.0 + std::log2(0.9)).epsilon(1e-7));
    REQUIRE(r.maxpair.has_value());
    CHECK(r.maxpair->tau_index == 0);
  }

  SUBCASE("singletons reduce to the pair quantity") {
    std::mt19937 rng(31);
    const DensityOperator rho = random_state(rng, 2);
    const DensityOperator tau = random_state(rng, 2);
    const DivergenceResult sets = d_max(singleton(rho), singleton(tau), 0.2);
    const DivergenceResult pair = d_max_pair(rho, tau, 0.2);
    CHECK(sets.value_bits == doctest::Approx(pair.value_bits).epsilon(1e-8));
  }

  SUBCASE("two copies double the value") {
    StateSet e = singleton(tensor_power(battery_gibbs(2.0), 2));
    const DivergenceResult r = d_max(excited(2), e, 0.1);
    CHECK(r.value_bits == doctest::Approx(2.0 + std::log2(0.9)).epsilon(1e-6));
  }
}

TEST_CASE("d_max_segment") {
  SUBCASE("worked convex instance hits the 1-D geometry oracle") {
    // Diagonal geometry: E = {diag(a, 1-a) : a in [0.35, 0.5]}, omega level
    // a_w <= eps; the longest feasible initial portion is
    // lambda* = max_aw (0.5 - 0.35) / (1 - aw - 0.35) = 0.3/(1 - 2 aw) at aw = eps.
    const double lambda_star = 0.3 / (1.0 - 2.0 * 0.1);
    const double oracle_bits = std::log2(1.0 / lambda_star);  // log2(8/3)
    StateSet e({battery_gibbs(2.0), make_density(diag2(0.35, 0.65))}, HullKind::ConvexHull);
    const DivergenceResult r = d_max_segment(excited(), e, 0.1, 1e4, tight());
    CHECK(r.value_bits == doctest::Approx(oracle_bits).epsilon(1e-7));
    REQUIRE(r.segment.has_value());
    CHECK(r.segment->m == doctest::Approx(8.0 / 3.0).epsilon(1e-6));
    // gamma should sit at the flat end of the segment family.
    CHECK(r.segment->gamma(0, 0).real() == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(r.segment->omega(0, 0).real() == doctest::Approx(0.1).epsilon(1e-5));
  }

  SUBCASE("singleton outside the smoothing ball has divergent cost") {
    StateSet e({battery_gibbs(2.0)}, HullKind::ConvexHull);
    const DivergenceResult r = d_max_segment(excited(), e, 0.1, 1e4);
    CHECK(r.flag == DivergenceFlag::InfeasibleCertified);
    CHECK(std::isinf(r.value_bits));
  }

  SUBCASE("overlap with the smoothing ball gives zero cost") {
    StateSet e({make_density(diag2(0.05, 0.95)), battery_gibbs(2.0)}, HullKind::ConvexHull);
    const DivergenceResult r = d_max_segment(excited(), e, 0.1, 1e4);
    CHECK(r.value_bits == doctest::Approx(0.0).epsilon(1e-6));
  }

  SUBCASE("finite sets only admit degenerate segments") {
    StateSet far({battery_gibbs(2.0), battery_gibbs(3.0)}, HullKind::Finite);
    const DivergenceResult inf_r = d_max_segment(excited(), far, 0.1, 1e4);
    CHECK(inf_r.flag == DivergenceFlag::InfeasibleUpToCap);

    StateSet near({make_density(diag2(0.05, 0.95))}, HullKind::Finite);
    const DivergenceResult zero_r = d_max_segment(excited(), near, 0.1, 1e4);
    CHECK(zero_r.value_bits == doctest::Approx(0.0));
  }

  SUBCASE("affine-hull sets are rejected") {
    StateSet e({battery_gibbs(2.0), battery_gibbs(3.0)}, HullKind::AffineHull);
    CHECK_THROWS_AS(d_max_segment(excited(), e, 0.1, 1e4), Error);
  }
}

TEST_CASE("parametric segment backend on the one-parameter battery family") {
  // n = 1 family pi_M, M in [2, 2.5]: the curve is a straight diagonal
  // segment, so the cost has closed form M* = (0.9 - p_lo)/(0.5 - p_lo)
  // with p_lo = 1/2.5.
  StateSet e = materialize(StateSet::from_sampler(
      SamplerSpec::iid_power(SamplerSpec::battery_interval(2.0, 2.5, 2), 1, 9)));
  const DivergenceResult r = d_max_segment(excited(), e, 0.1, 1e4);
  const double p_lo = 1.0 / 2.5;
  const double m_star = (0.9 - p_lo) / (0.5 - p_lo);
  REQUIRE(r.flag == DivergenceFlag::Finite);
  CHECK(r.value_bits == doctest::Approx(std::log2(m_star)).epsilon(1e-4));
  CHECK(r.grid.backend == "segment-parametric");
  CHECK(r.grid.lambda_grid >= 64);

  // Two copies bend the curve: no segment fits at any scale up to the cap.
  StateSet e2 = materialize(StateSet::from_sampler(
      SamplerSpec::iid_power(SamplerSpec::battery_interval(2.0, 2.5, 2), 2, 9)));
  const DivergenceResult r2 = d_max_segment(excited(2), e2, 0.1, 1e4);
  CHECK(r2.flag == DivergenceFlag::InfeasibleUpToCap);
}

TEST_CASE("ordering chain on random instances") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 3);  // 2..4
    std::vector<DensityOperator> pg, eg;
    const int np = 1 + static_cast<int>(rng() % 3);
    const int ne = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < np; ++i) pg.push_back(random_state(rng, d));
    for (int j = 0; j < ne; ++j) eg.push_back(random_state(rng, d));
    StateSet p(pg, HullKind::Finite);
    StateSet e(eg, HullKind::Finite);
    StateSet e_conv(eg, HullKind::ConvexHull);
    const double eps = 0.15;

    const double dmin_c = d_min_constrained(p, e, e, eps).value_bits;
    const double dmin_v = d_min(p, e, eps).value_bits;
    CHECK(dmin_c <= dmin_v + 1e-6);

    const double dmax_v = d_max(p, e_conv, eps).value_bits;
    const double dseg = d_max_segment(p, e_conv, eps, 1e4).value_bits;
    CHECK(dmax_v <= dseg + 1e-6);
  }
}

TEST_CASE("monotonicity in the smoothing parameter") {
  // More smoothing can only help: the min-relative entropies (extractable
  // work) are non-decreasing in eps, the max-relative entropies (formation
  // cost) non-increasing.
  StateSet p = excited();
  StateSet e({battery_gibbs(2.0), battery_gibbs(3.0)}, HullKind::Finite);
  StateSet e_conv({battery_gibbs(2.0), make_density(diag2(0.35, 0.65))}, HullKind::ConvexHull);
  double last_min = 0.0, last_minc = 0.0, last_max = kInf, last_seg = kInf;
  for (double eps : {0.05, 0.15, 0.25, 0.35}) {
    const double v1 = d_min(p, e, eps).value_bits;
    const double v2 = d_min_constrained(p, e, e, eps).value_bits;
    const double v3 = d_max(p, e, eps).value_bits;
    const double v4 = d_max_segment(p, e_conv, eps, 1e4).value_bits;
    CHECK(v1 >= last_min - 1e-6);
    CHECK(v2 >= last_minc - 1e-6);
    CHECK(v3 <= last_max + 1e-6);
    CHECK(v4 <= last_seg + 1e-6);
    last_min = v1;
    last_minc = v2;
    last_max = v3;
    last_seg = v4;
  }
}

TEST_CASE("commuting oracle equivalence") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 7);  // 2..8
    std::vector<DensityOperator> pg, eg;
    std::vector<RVec> pr, er;
    const int np = 1 + static_cast<int>(rng() % 2);
    const int ne = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < np; ++i) {
      pg.push_back(random_diagonal_state(rng, d));
      pr.push_back(pg.back().matrix().diagonal().real());
    }
    for (int j = 0; j < ne; ++j) {
      eg.push_back(random_diagonal_state(rng, d));
      er.push_back(eg.back().matrix().diagonal().real());
    }
    const double eps = 0.2;
    const double sdp = d_min(StateSet(pg, HullKind::Finite), StateSet(eg, HullKind::Finite), eps,
                             tight())
                           .value_bits;
    const double lp = -std::log2(dmin_diagonal_lp(pr, er, eps));
    CHECK(sdp == doctest::Approx(lp).epsilon(1e-7));
  }
}

TEST_CASE("d_max_pair commuting closed form at eps = 0") {
  std::mt19937 rng(321);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 7);
    const DensityOperator p = random_diagonal_state(rng, d);
    const DensityOperator q = random_diagonal_state(rng, d);
    const double sdp = d_max_pair(p, q, 0.0, tight()).value_bits;
    const double closed =
        dmax_ratio_log2(p.matrix().diagonal().real(), q.matrix().diagonal().real());
    CHECK(sdp == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("umegaki relative entropy") {
  std::mt19937 rng(55);
  const DensityOperator rho = random_state(rng, 3);
  CHECK(umegaki_relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));

  const DensityOperator excited_state = make_density(diag2(0.0, 1.0));
  CHECK(umegaki_relative_entropy(excited_state, battery_gibbs(2.0)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::isinf(umegaki_relative_entropy(battery_gibbs(2.0), excited_state)));
}

TEST_CASE("quasi-entropy trace") {
  std::mt19937 rng(66);
  const DensityOperator rho = random_state(rng, 3);
  CHECK(trace_quasi(rho, rho, 0.37) == doctest::Approx(1.0).epsilon(1e-10));

  const DensityOperator excited_state = make_density(diag2(0.0, 1.0));
  CHECK(trace_quasi(excited_state, battery_gibbs(2.0), 0.5) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));

  // Multiplicativity under tensor powers.
  const DensityOperator tau = random_state(rng, 2);
  const DensityOperator sigma = random_state(rng, 2);
  const double single = trace_quasi(sigma, tau, 0.3);
  const double doubled = trace_quasi(tensor_power(sigma, 2), tensor_power(tau, 2), 0.3);
  CHECK(doubled == doctest::Approx(single * single).epsilon(1e-10));
}

TEST_CASE("hoeffding divergence") {
  const DensityOperator excited_state = make_density(diag2(0.0, 1.0));
  const DensityOperator pi2 = battery_gibbs(2.0);

  SUBCASE("diverges below the zero-error rate") {
    CHECK(std::isinf(hoeffding_divergence(excited_state, pi2, 1, 0.5)));
  }

  SUBCASE("normalized value independent of n") {
    const DensityOperator rho = make_density(diag2(0.9, 0.1));
    const double h1 = hoeffding_divergence(rho, pi2, 1, 0.2);
    for (int n : {2, 4}) {
      CHECK(hoeffding_divergence(rho, pi2, n, 0.2) / n == doctest::Approx(h1).epsilon(1e-9));
    }
  }

  SUBCASE("matches a dense alpha-grid oracle") {
    const DensityOperator rho = make_density(diag2(0.9, 0.1));
    const double r = 0.2;
    double oracle = -kInf;
    for (int i = 1; i < 100000; ++i) {
      const double a = static_cast<double>(i) / 100000.0;
      const double q = trace_quasi(rho, pi2, a);
      oracle = std::max(oracle, ((a - 1.0) * r - std::log2(q)) / a);
    }
    CHECK(hoeffding_divergence(rho, pi2, 1, r) == doctest::Approx(oracle).epsilon(1e-6));
  }
}
