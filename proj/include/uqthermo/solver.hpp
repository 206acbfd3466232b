/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <atomic>
#include <optional>
#include <utility>
#include <vector>

#include "uqthermo/basis.hpp"
#include "uqthermo/errors.hpp"
#include "uqthermo/types.hpp"

namespace uqthermo {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SolveStatus s) noexcept;

/// Certified solve outcome. Status Optimal is only stamped after the values
/// below have been recomputed from the returned point and pass the gap and
/// feasibility tolerances; a would-be-optimal point failing that check is
/// reported as MaxIter instead and counted in SolverStats.
struct SolveCertificate {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double infeasibility_margin = 0.0;  // improving-ray margin for Infeasible/Unbounded
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
};

struct SolverOptions {
  int max_iterations = 200;
  double tol_gap = tol::gap;
  double tol_feas = tol::feas;
  double infeas_margin = tol::infeas_margin;
};

/// Process-wide counters backing the certification audit: how many results
/// were stamped Optimal, and how many would-be-optimal points failed the
/// independent recomputation and were downgraded.
struct SolverStats {
  static std::atomic<long>& optimal_count();
  static std::atomic<long>& downgrade_count();
  static void reset();
};

// ---------------------------------------------------------------------------
// Standard-form conic program over (product of Hermitian PSD blocks) x R+^p:
//
//   minimize <C, X>  subject to  <A_i, X> = b_i,  X in cone.
//
// Rows reference blocks sparsely. Inequalities are added with an internal
// slack variable in the nonnegative block.
// ---------------------------------------------------------------------------

class ConeProgram {
 public:
  struct PsdTerm {
    int block;
    CMat coeff;  // Hermitian
  };
  struct LinTerm {
    int index;
    double coeff;
  };

  /// New Hermitian PSD block variable of dimension d; returns the block id.
  int add_psd_block(Index d);
  /// n new nonnegative scalar variables; returns the first index.
  int add_lin_vars(int n);

  void add_objective_psd(int block, const CMat& coeff);
  void add_objective_lin(int index, double coeff);
  /// Constant added to the reported primal/dual values (bound shifts).
  void add_objective_offset(double offset) { obj_offset_ += offset; }

  /// sum_k <coeff_k, X_k> + sum_j c_j x_j  (=|<=)  rhs
  void add_eq(std::vector<PsdTerm> psd, std::vector<LinTerm> lin, double rhs);
  void add_le(std::vector<PsdTerm> psd, std::vector<LinTerm> lin, double rhs);

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_blocks() const { return static_cast<int>(psd_dims_.size()); }
  Index block_dim(int k) const { return psd_dims_[static_cast<size_t>(k)]; }
  int lin_dim() const { return lin_dim_; }
  double objective_offset() const { return obj_offset_; }

 private:
  friend struct ConeSolver;

  struct Row {
    std::vector<PsdTerm> psd;
    std::vector<LinTerm> lin;
    double rhs = 0.0;
  };

  std::vector<Index> psd_dims_;
  int lin_dim_ = 0;
  std::vector<PsdTerm> obj_psd_;
  std::vector<LinTerm> obj_lin_;
  double obj_offset_ = 0.0;
  std::vector<Row> rows_;
};

struct ConeSolution {
  std::vector<CMat> psd;       // primal blocks
  RVec lin;                    // nonnegative part
  RVec y;                      // dual multipliers, one per row
  std::vector<CMat> dual_psd;  // dual slacks Z
  RVec dual_lin;
  SolveCertificate certificate;
};

/// Homogeneous self-dual interior-point solve with Nesterov-Todd scaling.
ConeSolution solve_cone(const ConeProgram& prog, const SolverOptions& opts = {});

// ---------------------------------------------------------------------------
// Problem-level interface: a Hermitian test variable E with the interval
// constraint 0 <= E <= I, optional extra PSD-constrained Hermitian matrix
// variables, and real scalar auxiliaries, tied by real-linear (in)equalities
//   Re tr[A E] + sum_k Re tr[B_k P_k] + row . scalars  (=|<=)  rhs.
// ---------------------------------------------------------------------------

struct ScalarBounds {
  double lo = 0.0;
  double hi = kInf;

  static ScalarBounds nonneg() { return {0.0, kInf}; }
  static ScalarBounds free() { return {-kInf, kInf}; }
  static ScalarBounds box(double lo, double hi) { return {lo, hi}; }
};

struct LinearExpr {
  CMat e_coeff;                                  // empty when unused
  std::vector<std::pair<int, CMat>> psd_coeffs;  // (psd variable index, coeff)
  std::vector<std::pair<int, double>> scalar_coeffs;
};

struct LinearConstraint {
  LinearExpr lhs;
  double rhs = 0.0;
};

struct SdpProblem {
  Index dim = 0;                  // interval variable E; 0 when absent
  std::vector<Index> psd_vars;    // dims of extra PSD matrix variables
  std::vector<ScalarBounds> scalars;
  LinearExpr objective;           // minimized
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> inequalities;

  int add_scalar(ScalarBounds b) {
    scalars.push_back(b);
    return static_cast<int>(scalars.size()) - 1;
  }
  int add_psd_var(Index d) {
    psd_vars.push_back(d);
    return static_cast<int>(psd_vars.size()) - 1;
  }
};

struct SdpPoint {
  CMat e;                 // empty when the problem has no interval variable
  std::vector<CMat> psd;  // extra PSD variables
  RVec scalars;
};

/// Solves an SdpProblem through the conic engine. Constraint operators are
/// validated Hermitian within tolerance and the interval dimension is guarded
/// to d <= 64.
std::pair<SdpPoint, SolveCertificate> solve_sdp(const SdpProblem& prob,
                                                const SolverOptions& opts = {});

/// Dense LP through the same engine restricted to the nonnegative block:
///   minimize c.x  s.t.  A_eq x = b_eq, A_ub x <= b_ub, bounds per variable.
std::pair<RVec, SolveCertificate> solve_lp(const RVec& c, const RMat& a_eq, const RVec& b_eq,
                                           const RMat& a_ub, const RVec& b_ub,
                                           const std::vector<ScalarBounds>& bounds,
                                           const SolverOptions& opts = {});

}  // namespace uqthermo
