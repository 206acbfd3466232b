/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <vector>

#include "uqthermo/types.hpp"

// Independent oracles for cross-checking the interior-point path. The simplex
// below shares no code with the production solver.

namespace uqthermo::testsupport {

struct SimplexOutcome {
  enum Status { Optimal, Infeasible, Unbounded } status = Optimal;
  double value = 0.0;
  RVec x;
};

/// Dense two-phase primal simplex with Bland's rule for
///   min c.x  s.t.  A x = b, x >= 0.
inline SimplexOutcome simplex_standard(RMat a, RVec b, const RVec& c) {
  const Index m = a.rows();
  const Index n = a.cols();
  constexpr double kPivTol = 1e-11;

  for (Index i = 0; i < m; ++i) {
    if (b(i) < 0) {
      a.row(i) *= -1.0;
      b(i) *= -1.0;
    }
  }

  const Index total = n + m;  // original vars + artificials
  RMat t(m, total + 1);
  t.setZero();
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m) = RMat::Identity(m, m);
  t.col(total).head(m) = b;
  std::vector<Index> basis(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) basis[static_cast<size_t>(i)] = n + i;

  const auto pivot = [&](Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index i = 0; i < m; ++i) {
      if (i != row && std::abs(t(i, col)) > 0.0) t.row(i) -= t(i, col) * t.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  };

  // Runs Bland-rule iterations for the given cost vector over columns
  // [0, ncols); returns false when unbounded.
  const auto iterate = [&](const RVec& cost, Index ncols) -> bool {
    for (int guard = 0; guard < 100000; ++guard) {
      RVec cb(m);
      for (Index i = 0; i < m; ++i) cb(i) = cost(basis[static_cast<size_t>(i)]);
      Index enter = -1;
      for (Index j = 0; j < ncols; ++j) {
        const double reduced = cost(j) - cb.dot(t.col(j).head(m));
        if (reduced < -kPivTol) {
          enter = j;
          break;  // Bland: first improving column
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double best_ratio = 0.0;
      for (Index i = 0; i < m; ++i) {
        if (t(i, enter) > kPivTol) {
          const double ratio = t(i, total) / t(i, enter);
          if (leave < 0 || ratio < best_ratio - kPivTol ||
              (ratio < best_ratio + kPivTol && basis[static_cast<size_t>(i)] <
                                                   basis[static_cast<size_t>(leave)])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  };

  // Phase 1: minimize the artificial sum.
  RVec cost1 = RVec::Zero(total + 1);
  cost1.segment(n, m).setOnes();
  if (!iterate(cost1, total)) {
    SimplexOutcome out;
    out.status = SimplexOutcome::Unbounded;  // cannot happen for phase 1
    return out;
  }
  double phase1 = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] >= n) phase1 += t(i, total);
  }
  SimplexOutcome out;
  if (phase1 > 1e-8) {
    out.status = SimplexOutcome::Infeasible;
    return out;
  }
  // Drive leftover artificials out of the basis where possible.
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] >= n) {
      for (Index j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > kPivTol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 over the original columns only.
  RVec cost2 = RVec::Zero(total + 1);
  cost2.head(n) = c;
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] >= n) cost2(basis[static_cast<size_t>(i)]) = 0.0;
  }
  if (!iterate(cost2, n)) {
    out.status = SimplexOutcome::Unbounded;
    return out;
  }

  out.x = RVec::Zero(n);
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] < n) out.x(basis[static_cast<size_t>(i)]) = t(i, total);
  }
  out.value = c.dot(out.x);
  return out;
}

/// Exhaustive diagonal-test LP for the min-relative entropy on commuting
/// instances: variables (E_1..E_d, t), constraints sum_k E_k tau_jk <= t,
/// sum_k E_k rho_ik >= 1 - eps, 0 <= E_k <= 1. Returns the optimal t.
inline double dmin_diagonal_lp(const std::vector<RVec>& rhos, const std::vector<RVec>& taus,
                               double eps) {
  const Index d = rhos[0].size();
  const auto n_tau = static_cast<Index>(taus.size());
  const auto n_rho = static_cast<Index>(rhos.size());
  // Columns: E (d), t, slack per tau row, surplus per rho row, slack per bound.
  const Index n = d + 1 + n_tau + n_rho + d;
  const Index m = n_tau + n_rho + d;
  RMat a = RMat::Zero(m, n);
  RVec b = RVec::Zero(m);
  Index row = 0;
  for (Index j = 0; j < n_tau; ++j, ++row) {
    a.row(row).head(d) = taus[static_cast<size_t>(j)].transpose();
    a(row, d) = -1.0;
    a(row, d + 1 + j) = 1.0;
  }
  for (Index i = 0; i < n_rho; ++i, ++row) {
    a.row(row).head(d) = rhos[static_cast<size_t>(i)].transpose();
    a(row, d + 1 + n_tau + i) = -1.0;
    b(row) = 1.0 - eps;
  }
  for (Index k = 0; k < d; ++k, ++row) {
    a(row, k) = 1.0;
    a(row, d + 1 + n_tau + n_rho + k) = 1.0;
    b(row) = 1.0;
  }
  RVec c = RVec::Zero(n);
  c(d) = 1.0;
  const SimplexOutcome res = simplex_standard(a, b, c);
  return res.value;
}

/// Commuting closed form for the unsmoothed max-relative entropy.
inline double dmax_ratio_log2(const RVec& p, const RVec& q) {
  double best = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) > 1e-15) best = std::max(best, p(i) / q(i));
  }
  return std::log2(best);
}

}  // namespace uqthermo::testsupport
