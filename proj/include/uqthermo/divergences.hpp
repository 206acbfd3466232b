/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <optional>
#include <string>

#include "uqthermo/state_sets.hpp"

namespace uqthermo {

/// Measurement effect 0 <= E <= I, the variable of every hypothesis-testing
/// program. Eigenvalues are validated into [-1e-8, 1 + 1e-8].
class TestOperator {
 public:
  explicit TestOperator(HermitianOperator op);

  const HermitianOperator& op() const { return op_; }
  const CMat& matrix() const { return op_.matrix(); }

 private:
  HermitianOperator op_;
};

enum class DivergenceFlag {
  Finite,
  ThresholdInfinite,    // optimum at or below the positive cutoff 1e-12
  InfeasibleUpToCap,    // parametric or finite search exhausted m_cap
  InfeasibleCertified,  // solver produced a dual improving ray
};

struct MaxPairWitness {
  int tau_index = -1;  // -1: optimum over the hull of E
  CMat omega;          // smoothed state
};

struct SegmentWitness {
  CMat gamma;  // closure anchor
  CMat omega;  // smoothed state the segment points toward
  double m = 0.0;
};

struct GridMeta {
  int p_grid = 0;
  int e_grid = 0;
  std::string backend;
  double m_cap = 0.0;
  int lambda_grid = 0;
};

struct DivergenceResult {
  double value_bits = 0.0;  // +inf when flag != Finite
  DivergenceFlag flag = DivergenceFlag::Finite;
  std::optional<TestOperator> test;
  std::optional<MaxPairWitness> maxpair;
  std::optional<SegmentWitness> segment;
  SolveCertificate certificate;
  GridMeta grid;

  bool infinite() const { return flag != DivergenceFlag::Finite; }
};

/// Smoothed min-relative entropy between sets: minimize the worst-case
/// type-II overlap sup_tau tr[E tau] over tests with worst-case type-I error
/// sup_rho tr[(I-E) rho] <= eps. Hull replacement is free, so generators are
/// used directly. Value -log2 of the optimum, +inf below the 1e-12 cutoff.
DivergenceResult d_min(const StateSet& p, const StateSet& e, double eps,
                       const SolverOptions& opts = {});

/// Same program with the test forced orthogonal to V(K), the span of
/// differences of K. With K = E the type-II overlap is the same for every
/// candidate and the objective collapses to tr[E tau_0].
DivergenceResult d_min_constrained(const StateSet& p, const StateSet& e, const StateSet& k,
                                   double eps, const SolverOptions& opts = {});

/// Smoothed max-relative entropy of a state pair: least M with
/// M tau >= omega over states omega within trace distance eps of rho.
DivergenceResult d_max_pair(const DensityOperator& rho, const DensityOperator& tau, double eps,
                            const SolverOptions& opts = {});

/// Smoothed max-relative entropy between sets: the infimum of the pair
/// quantity over P x E. Convex-hulled sides are optimized jointly; finite
/// sides are enumerated (the pairwise identity is exact for finite sets).
DivergenceResult d_max(const StateSet& p, const StateSet& e, double eps,
                       const SolverOptions& opts = {});

/// Segment variant with K = E: least M <= m_cap such that the initial 1/M
/// portion of a half-open segment from a closure point of E toward a smoothed
/// state stays inside E. Backends: closed convex sets solve the cone
/// reformulation as an SDP; one-parameter families search the curve with
/// bisection on M and a lambda-grid membership check; plain finite sets admit
/// only degenerate segments. Affine-hull sets are unsupported.
DivergenceResult d_max_segment(const StateSet& p, const StateSet& e, double eps, double m_cap,
                               const SolverOptions& opts = {});

/// Umegaki relative entropy tr[rho (log rho - log tau)] in bits,
/// support-restricted; +inf on support violation.
double umegaki_relative_entropy(const DensityOperator& rho, const DensityOperator& tau);

/// Quasi-entropy trace tr[rho^alpha tau^(1-alpha)], alpha in (0,1),
/// zero-eigenvalue safe.
double trace_quasi(const DensityOperator& rho, const DensityOperator& tau, double alpha);

/// Hoeffding divergence at rate r for n i.i.d. copies:
/// sup_{alpha in (0,1)} (n/alpha) ((alpha-1) r - log2 tr[rho^alpha tau^(1-alpha)]).
/// Values beyond 1e6 are reported as +inf (the supremum genuinely diverges
/// for pure type-I states below rate).
double hoeffding_divergence(const DensityOperator& rho, const DensityOperator& tau, int n,
                            double r);

}  // namespace uqthermo
