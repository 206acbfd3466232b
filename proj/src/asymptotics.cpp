/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/asymptotics.hpp"

#include <cmath>

namespace uqthermo {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Solver: return "solver";
    case Provenance::Both: return "both";
  }
  return "solver";
}

RateSweepRow irreversibility_example(int n, double eps, double delta, int grid, double m_cap,
                                     const SolverOptions& opts) {
  if (n < 1 || n > 4) raise(ErrorKind::BadParameter, "n must lie in 1..4");
  if (!(eps >= 0.0) || !(eps < 0.5)) raise(ErrorKind::BadParameter, "eps must lie in [0, 1/2)");
  if (!(delta > 0.0)) raise(ErrorKind::BadParameter, "delta must be positive");
  if (grid < 2) raise(ErrorKind::BadParameter, "grid must be at least 2");

  RateSweepRow row;
  row.n = n;
  row.eps = eps;
  row.delta = delta;
  row.grid = grid;

  CMat excited = CMat::Zero(2, 2);
  excited(1, 1) = 1.0;
  StateSet p({tensor_power(DensityOperator::from_validated(std::move(excited)), n)},
             HullKind::Finite);
  StateSet e = materialize(StateSet::from_sampler(
      SamplerSpec::iid_power(SamplerSpec::battery_interval(2.0, 2.0 + delta, 2), n, grid)));

  row.w_clean = extractable_work(p, e, eps, BatteryKind::Clean, opts).value_bits;
  row.c_clean = formation_cost(p, e, eps, BatteryKind::Clean, m_cap, opts).value_bits;
  row.w_dirty = extractable_work(p, e, eps, BatteryKind::Dirty, opts).value_bits;
  const TaskReport dirty_formation = formation_cost(p, e, eps, BatteryKind::Dirty, m_cap, opts);
  row.c_dirty = dirty_formation.value_bits;
  row.c_dirty_status = dirty_formation.verdict;
  // The n-copy battery family is an operator polynomial of degree n in the
  // excitation probability; for n >= 2 a segment inside it would force the
  // polynomial to be affine, so the formation cost diverges analytically.
  row.c_dirty_analytic_infinite = n >= 2;

  row.w_clean_closed = -std::log2(1.0 - eps);
  row.c_clean_closed = n + std::log2(1.0 - eps);
  row.w_dirty_closed = n - std::log2(1.0 - eps);
  // The interpolation witness for the clean-battery collapse needs n+1 grid
  // points of the family.
  row.closed_forms_valid = grid >= n + 1;
  row.provenance = Provenance::Both;
  return row;
}

double optimal_error_at_rate(const StateSet& p, const StateSet& e, int n, double r,
                             const SolverOptions& opts) {
  p.require_materialized("optimal_error_at_rate");
  e.require_materialized("optimal_error_at_rate");
  if (p.dim() != e.dim()) raise(ErrorKind::DimMismatch, "sets of different dimension");
  if (p.dim() > 64) raise(ErrorKind::BadParameter, "dimension exceeds 64");
  if (n < 1) raise(ErrorKind::BadParameter, "n must be positive");
  if (!(r > 0.0)) raise(ErrorKind::BadParameter, "rate must be positive");

  const double budget = std::exp2(-static_cast<double>(n) * r);
  SdpProblem prob;
  prob.dim = p.dim();
  const int t_var = prob.add_scalar(ScalarBounds::box(0.0, 1.0));
  prob.objective.scalar_coeffs.emplace_back(t_var, 1.0);
  for (const auto& rho : p.generators()) {
    LinearConstraint c;  // tr[(I - E) rho] <= t
    c.lhs.e_coeff = -rho.matrix();
    c.lhs.scalar_coeffs.emplace_back(t_var, -1.0);
    c.rhs = -1.0;
    prob.inequalities.push_back(std::move(c));
  }
  for (const auto& tau : e.generators()) {
    LinearConstraint c;  // tr[E tau] <= 2^(-n r)
    c.lhs.e_coeff = tau.matrix();
    c.rhs = budget;
    prob.inequalities.push_back(std::move(c));
  }
  auto [point, cert] = solve_sdp(prob, opts);
  if (cert.status != SolveStatus::Optimal) {
    raise(ErrorKind::SolverFailure,
          std::string("error-at-rate SDP ended with status ") + to_string(cert.status));
  }
  return std::clamp(cert.primal_value, 0.0, 1.0);
}

ExponentTable exponent_and_rates(const DensityOperator& rho, const DensityOperator& tau, double r,
                                 const std::vector<int>& n_list) {
  if (rho.dim() != tau.dim()) raise(ErrorKind::DimMismatch, "pair of different dimension");
  ExponentTable table;
  const double d_rate = umegaki_relative_entropy(rho, tau);
  table.rate_below_capacity = r < d_rate;
  const double h_rate = hoeffding_divergence(rho, tau, 1, r);
  for (int n : n_list) {
    if (n < 1) raise(ErrorKind::BadParameter, "n must be positive");
    ExponentRow row;
    row.n = n;
    row.hoeffding_rate = h_rate;  // H_{n,r}/n by Q_alpha multiplicativity
    row.umegaki_rate = d_rate;    // additivity on product states
    row.provenance = Provenance::ClosedForm;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace uqthermo
