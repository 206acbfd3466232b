/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "uqthermo/thermo.hpp"

namespace uqthermo {

enum class Provenance { ClosedForm, Solver, Both };

const char* to_string(Provenance p) noexcept;

/// One finite-size row of the irreversibility sweep: the n-copy excited
/// battery with capacity known only up to delta, all four work quantities,
/// and their closed-form cross-checks.
struct RateSweepRow {
  int n = 1;
  double eps = 0.1;
  double delta = 0.5;
  int grid = 9;

  double w_clean = 0.0;       // extractable work, clean battery
  double c_clean = 0.0;       // formation cost, clean battery
  double w_dirty = 0.0;       // extractable work, dirty battery
  double c_dirty = kInf;      // formation cost, dirty battery (often infinite)
  TaskVerdict c_dirty_status = TaskVerdict::InfeasibleUpToCap;
  bool c_dirty_analytic_infinite = false;  // polynomial-identity argument, n >= 2

  double w_clean_closed = 0.0;
  double c_clean_closed = 0.0;
  double w_dirty_closed = 0.0;
  Provenance provenance = Provenance::Both;
  bool closed_forms_valid = true;  // grid >= n + 1 so the interpolation holds

  double delta_w_clean() const { return w_clean - w_clean_closed; }
  double delta_c_clean() const { return c_clean - c_clean_closed; }
  double delta_w_dirty() const { return w_dirty - w_dirty_closed; }
};

/// Runs the n-copy sweep row: P_n the n-fold excited state, E_n the grid of
/// n-fold battery states with capacity in [2, 2 + delta]. Clean and dirty
/// work values are solved and cross-checked against -log2(1-eps),
/// n + log2(1-eps) and n - log2(1-eps); the dirty formation cost is searched
/// up to m_cap and, for n >= 2, flagged analytically infinite (the family is
/// an operator-polynomial curve that contains no line segment).
RateSweepRow irreversibility_example(int n, double eps, double delta, int grid,
                                     double m_cap = 1e4, const SolverOptions& opts = {});

/// Minimal worst-case type-I error over tests whose worst-case type-II
/// overlap stays within 2^(-n r).
double optimal_error_at_rate(const StateSet& p, const StateSet& e, int n, double r,
                             const SolverOptions& opts = {});

struct ExponentRow {
  int n = 1;
  double hoeffding_rate = 0.0;  // H_{n,r}/n, constant in n for i.i.d. pairs
  double umegaki_rate = 0.0;    // D(rho^n || tau^n)/n = D(rho || tau)
  Provenance provenance = Provenance::ClosedForm;
};

struct ExponentTable {
  std::vector<ExponentRow> rows;
  bool rate_below_capacity = true;  // r < D(rho || tau), reported not enforced
};

/// Per-n error-exponent and rate estimates for an i.i.d. singleton pair; both
/// normalized sequences are constant in n by multiplicativity/additivity.
ExponentTable exponent_and_rates(const DensityOperator& rho, const DensityOperator& tau, double r,
                                 const std::vector<int>& n_list);

}  // namespace uqthermo
