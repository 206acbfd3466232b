/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/divergences.hpp"

#include <cmath>

#include "uqthermo/basis.hpp"

namespace uqthermo {

namespace {

constexpr double kLog2 = 0.6931471805599453;

double log2_safe(double x) { return std::log(x) / kLog2; }

void check_eps(double eps) {
  if (!(eps >= 0.0) || !(eps < 1.0)) raise(ErrorKind::BadParameter, "eps must lie in [0, 1)");
}

void check_pair_dims(const StateSet& p, const StateSet& e) {
  if (p.dim() != e.dim()) raise(ErrorKind::DimMismatch, "sets of different dimension");
}

DivergenceResult finite_value(double bits) {
  DivergenceResult r;
  r.value_bits = bits;
  return r;
}

}  // namespace

TestOperator::TestOperator(HermitianOperator op) : op_(std::move(op)) {
  Eigen::SelfAdjointEigenSolver<CMat> es(op_.matrix(), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-8 || hi > 1.0 + 1e-8) {
    raise(ErrorKind::BadParameter, "test operator eigenvalues outside [0, 1] tolerance band");
  }
}

// ---------------------------------------------------------------------------
// Min-relative entropies
// ---------------------------------------------------------------------------

namespace {

DivergenceResult run_dmin(const StateSet& p, const StateSet& e,
                          const std::vector<CMat>& orth_constraints, double eps,
                          const SolverOptions& opts) {
  const Index d = p.dim();

  // With the orthogonality constraints covering all differences of E, the
  // type-II overlap is the same for every generator and the epigraph is
  // unnecessary.
  bool collapses = !orth_constraints.empty() || e.generators().size() == 1;
  if (!orth_constraints.empty()) {
    SubspaceBasis span;
    span.ops = orth_constraints;
    span.ambient_dim = d;
    const CMat& tau0 = e.generators()[0].matrix();
    for (const auto& g : e.generators()) {
      const double n2 = hs_inner(g.matrix() - tau0, g.matrix() - tau0);
      if (span.residual_outside(g.matrix() - tau0) > 1e-9 * std::max(1.0, n2)) {
        collapses = false;
        break;
      }
    }
  }

  SdpProblem prob;
  prob.dim = d;
  int t_var = -1;
  if (collapses) {
    prob.objective.e_coeff = e.generators()[0].matrix();
  } else {
    t_var = prob.add_scalar(ScalarBounds::box(0.0, 1.0));
    prob.objective.scalar_coeffs.emplace_back(t_var, 1.0);
    for (const auto& tau : e.generators()) {
      LinearConstraint c;  // tr[E tau] - t <= 0
      c.lhs.e_coeff = tau.matrix();
      c.lhs.scalar_coeffs.emplace_back(t_var, -1.0);
      c.rhs = 0.0;
      prob.inequalities.push_back(std::move(c));
    }
  }
  for (const auto& rho : p.generators()) {
    LinearConstraint c;  // tr[(I-E) rho] <= eps
    c.lhs.e_coeff = -rho.matrix();
    c.rhs = eps - 1.0;
    prob.inequalities.push_back(std::move(c));
  }
  for (const CMat& b : orth_constraints) {
    LinearConstraint c;
    c.lhs.e_coeff = b;
    c.rhs = 0.0;
    prob.equalities.push_back(std::move(c));
  }

  auto [point, cert] = solve_sdp(prob, opts);
  if (cert.status != SolveStatus::Optimal) {
    raise(ErrorKind::SolverFailure,
          std::string("min-relative-entropy SDP ended with status ") + to_string(cert.status));
  }

  DivergenceResult result;
  result.certificate = cert;
  result.test = TestOperator(HermitianOperator(point.e));
  result.grid.p_grid = p.grid_used();
  result.grid.e_grid = e.grid_used();
  result.grid.backend = collapses ? "sdp-collapsed" : "sdp-epigraph";
  const double t_star = cert.primal_value;
  if (t_star <= tol::positive_optimum) {
    result.flag = DivergenceFlag::ThresholdInfinite;
    result.value_bits = kInf;
  } else {
    result.value_bits = -log2_safe(t_star);
  }
  return result;
}

}  // namespace

DivergenceResult d_min(const StateSet& p, const StateSet& e, double eps,
                       const SolverOptions& opts) {
  check_eps(eps);
  p.require_materialized("d_min");
  e.require_materialized("d_min");
  check_pair_dims(p, e);
  return run_dmin(p, e, {}, eps, opts);
}

DivergenceResult d_min_constrained(const StateSet& p, const StateSet& e, const StateSet& k,
                                   double eps, const SolverOptions& opts) {
  check_eps(eps);
  p.require_materialized("d_min_constrained");
  e.require_materialized("d_min_constrained");
  k.require_materialized("d_min_constrained");
  check_pair_dims(p, e);
  if (k.dim() != p.dim()) raise(ErrorKind::DimMismatch, "K has mismatched dimension");
  const SubspaceBasis v = difference_subspace_basis(k);
  return run_dmin(p, e, v.ops, eps, opts);
}

// ---------------------------------------------------------------------------
// Max-relative entropies
// ---------------------------------------------------------------------------

namespace {

/// Adds the smoothing-ball membership of `omega_var`: omega is a state with
/// T(omega, anchor) <= eps, where the anchor is a fixed state or a convex
/// combination of `hull_anchors` when that list is nonempty.
void add_smoothing_ball(SdpProblem& prob, int omega_var, const CMat* fixed_anchor,
                        const std::vector<DensityOperator>* hull_anchors, double eps) {
  const Index d = fixed_anchor ? fixed_anchor->rows() : (*hull_anchors)[0].dim();
  const int dplus = prob.add_psd_var(d);
  const int dminus = prob.add_psd_var(d);
  std::vector<int> cvars;
  if (hull_anchors) {
    for (size_t i = 0; i < hull_anchors->size(); ++i) {
      cvars.push_back(prob.add_scalar(ScalarBounds::nonneg()));
    }
    LinearConstraint sum1;
    for (int v : cvars) sum1.lhs.scalar_coeffs.emplace_back(v, 1.0);
    sum1.rhs = 1.0;
    prob.equalities.push_back(std::move(sum1));
  }

  const auto& basis = hermitian_basis(d);
  for (const CMat& g : basis) {
    LinearConstraint row;  // omega - anchor = Delta+ - Delta-
    row.lhs.psd_coeffs.emplace_back(omega_var, g);
    row.lhs.psd_coeffs.emplace_back(dplus, CMat(-g));
    row.lhs.psd_coeffs.emplace_back(dminus, g);
    if (hull_anchors) {
      for (size_t i = 0; i < hull_anchors->size(); ++i) {
        row.lhs.scalar_coeffs.emplace_back(cvars[i], -hs_inner(g, (*hull_anchors)[i].matrix()));
      }
      row.rhs = 0.0;
    } else {
      row.rhs = hs_inner(g, *fixed_anchor);
    }
    prob.equalities.push_back(std::move(row));
  }

  {
    LinearConstraint tr1;  // tr omega = 1
    tr1.lhs.psd_coeffs.emplace_back(omega_var, CMat(CMat::Identity(d, d)));
    tr1.rhs = 1.0;
    prob.equalities.push_back(std::move(tr1));
  }
  {
    LinearConstraint budget;  // tr[Delta+ + Delta-] <= 2 eps
    budget.lhs.psd_coeffs.emplace_back(dplus, CMat(CMat::Identity(d, d)));
    budget.lhs.psd_coeffs.emplace_back(dminus, CMat(CMat::Identity(d, d)));
    budget.rhs = 2.0 * eps;
    prob.inequalities.push_back(std::move(budget));
  }
}

struct MaxProgramResult {
  bool feasible = false;
  double m = 0.0;
  CMat omega;
  SolveCertificate cert;
};

/// min M s.t. (M-weighted tau expression) - omega >= 0 and omega in the
/// eps-ball of the anchor. The tau side is either a fixed state (tau_hull
/// null) or sum_j atil_j tau_j with atil >= 0, M = sum atil.
MaxProgramResult run_dmax_program(const CMat* tau_fixed,
                                  const std::vector<DensityOperator>* tau_hull,
                                  const CMat* anchor_fixed,
                                  const std::vector<DensityOperator>* anchor_hull, double eps,
                                  const SolverOptions& opts) {
  const Index d = tau_fixed ? tau_fixed->rows() : (*tau_hull)[0].dim();
  SdpProblem prob;
  const int slack = prob.add_psd_var(d);  // M tau - omega
  const int omega = prob.add_psd_var(d);

  int m_var = -1;
  std::vector<int> avars;
  if (tau_hull) {
    for (size_t j = 0; j < tau_hull->size(); ++j) {
      avars.push_back(prob.add_scalar(ScalarBounds::nonneg()));
      prob.objective.scalar_coeffs.emplace_back(avars[j], 1.0);
    }
  } else {
    m_var = prob.add_scalar(ScalarBounds::nonneg());
    prob.objective.scalar_coeffs.emplace_back(m_var, 1.0);
  }

  const auto& basis = hermitian_basis(d);
  for (const CMat& g : basis) {
    LinearConstraint row;  // slack + omega - (M tau) = 0
    row.lhs.psd_coeffs.emplace_back(slack, g);
    row.lhs.psd_coeffs.emplace_back(omega, g);
    if (tau_hull) {
      for (size_t j = 0; j < tau_hull->size(); ++j) {
        row.lhs.scalar_coeffs.emplace_back(avars[j], -hs_inner(g, (*tau_hull)[j].matrix()));
      }
    } else {
      row.lhs.scalar_coeffs.emplace_back(m_var, -hs_inner(g, *tau_fixed));
    }
    row.rhs = 0.0;
    prob.equalities.push_back(std::move(row));
  }
  add_smoothing_ball(prob, omega, anchor_fixed, anchor_hull, eps);

  auto [point, cert] = solve_sdp(prob, opts);
  MaxProgramResult out;
  out.cert = cert;
  if (cert.status == SolveStatus::Optimal) {
    out.feasible = true;
    out.m = std::max(1.0, cert.primal_value);
    out.omega = point.psd[1];
  } else if (cert.status != SolveStatus::Infeasible) {
    raise(ErrorKind::SolverFailure,
          std::string("max-relative-entropy SDP ended with status ") + to_string(cert.status));
  }
  return out;
}

}  // namespace

DivergenceResult d_max_pair(const DensityOperator& rho, const DensityOperator& tau, double eps,
                            const SolverOptions& opts) {
  check_eps(eps);
  if (rho.dim() != tau.dim()) raise(ErrorKind::DimMismatch, "pair of different dimension");
  const CMat& t = tau.matrix();
  const CMat& r = rho.matrix();
  const MaxProgramResult res = run_dmax_program(&t, nullptr, &r, nullptr, eps, opts);

  DivergenceResult out;
  out.certificate = res.cert;
  out.grid.backend = "pair-sdp";
  if (!res.feasible) {
    out.flag = DivergenceFlag::InfeasibleCertified;
    out.value_bits = kInf;
    return out;
  }
  out.value_bits = std::max(0.0, log2_safe(res.m));
  out.maxpair = MaxPairWitness{0, res.omega};
  return out;
}

DivergenceResult d_max(const StateSet& p, const StateSet& e, double eps,
                       const SolverOptions& opts) {
  check_eps(eps);
  p.require_materialized("d_max");
  e.require_materialized("d_max");
  check_pair_dims(p, e);

  const bool p_hulled = p.hull() == HullKind::ConvexHull;
  const bool e_hulled = e.hull() == HullKind::ConvexHull;

  // Anchor configurations for the smoothing ball.
  std::vector<std::pair<const CMat*, const std::vector<DensityOperator>*>> anchors;
  if (p_hulled) {
    anchors.emplace_back(nullptr, &p.generators());
  } else {
    for (const auto& rho : p.generators()) anchors.emplace_back(&rho.matrix(), nullptr);
  }

  DivergenceResult best;
  best.value_bits = kInf;
  best.flag = DivergenceFlag::InfeasibleCertified;
  best.grid.p_grid = p.grid_used();
  best.grid.e_grid = e.grid_used();
  best.grid.backend = e_hulled ? "hull-joint-sdp" : "pairwise-sdp";

  const auto consider = [&](const MaxProgramResult& res, int tau_index) {
    if (!res.feasible) return;
    const double bits = std::max(0.0, log2_safe(res.m));
    if (best.flag != DivergenceFlag::Finite || bits < best.value_bits) {
      best.flag = DivergenceFlag::Finite;
      best.value_bits = bits;
      best.maxpair = MaxPairWitness{tau_index, res.omega};
      best.certificate = res.cert;
    }
  };

  for (const auto& [fixed, hull] : anchors) {
    if (e_hulled) {
      consider(run_dmax_program(nullptr, &e.generators(), fixed, hull, eps, opts), -1);
    } else {
      for (size_t j = 0; j < e.generators().size(); ++j) {
        const CMat& t = e.generators()[j].matrix();
        consider(run_dmax_program(&t, nullptr, fixed, hull, eps, opts), static_cast<int>(j));
      }
    }
  }
  if (best.flag != DivergenceFlag::Finite) best.value_bits = kInf;
  return best;
}

// ---------------------------------------------------------------------------
// Segment (subspace-constrained) max-relative entropy
// ---------------------------------------------------------------------------

namespace {

/// Convex-closed backend: cone reformulation over hull coefficients.
DivergenceResult segment_convex(const StateSet& p, const StateSet& e, double eps, double m_cap,
                                const SolverOptions& opts) {
  const Index d = e.dim();
  const auto& gens = e.generators();
  const bool p_hulled = p.hull() == HullKind::ConvexHull;

  std::vector<std::pair<const CMat*, const std::vector<DensityOperator>*>> anchors;
  if (p_hulled) {
    anchors.emplace_back(nullptr, &p.generators());
  } else {
    for (const auto& rho : p.generators()) anchors.emplace_back(&rho.matrix(), nullptr);
  }

  DivergenceResult best;
  best.value_bits = kInf;
  best.flag = DivergenceFlag::InfeasibleCertified;
  best.grid.backend = "segment-cone-sdp";
  best.grid.m_cap = m_cap;
  best.grid.p_grid = p.grid_used();
  best.grid.e_grid = e.grid_used();

  for (const auto& [fixed, hull] : anchors) {
    SdpProblem prob;
    const int omega = prob.add_psd_var(d);
    std::vector<int> avars, uvars;  // M tau_end = sum a_j g_j ; cone coeffs u
    for (size_t j = 0; j < gens.size(); ++j) {
      avars.push_back(prob.add_scalar(ScalarBounds::nonneg()));
      prob.objective.scalar_coeffs.emplace_back(avars[j], 1.0);
    }
    for (size_t k = 0; k < gens.size(); ++k) uvars.push_back(prob.add_scalar(ScalarBounds::nonneg()));

    const auto& basis = hermitian_basis(d);
    for (const CMat& g : basis) {
      LinearConstraint row;  // sum_j a_j g_j - omega - sum_k u_k g_k = 0
      row.lhs.psd_coeffs.emplace_back(omega, CMat(-g));
      for (size_t j = 0; j < gens.size(); ++j) {
        row.lhs.scalar_coeffs.emplace_back(avars[j], hs_inner(g, gens[j].matrix()));
        row.lhs.scalar_coeffs.emplace_back(uvars[j], -hs_inner(g, gens[j].matrix()));
      }
      row.rhs = 0.0;
      prob.equalities.push_back(std::move(row));
    }
    add_smoothing_ball(prob, omega, fixed, hull, eps);

    auto [point, cert] = solve_sdp(prob, opts);
    if (cert.status == SolveStatus::Infeasible) continue;
    if (cert.status != SolveStatus::Optimal) {
      raise(ErrorKind::SolverFailure,
            std::string("segment SDP ended with status ") + to_string(cert.status));
    }
    const double m = std::max(1.0, cert.primal_value);
    if (m > m_cap) {
      if (best.flag == DivergenceFlag::InfeasibleCertified) {
        best.flag = DivergenceFlag::InfeasibleUpToCap;
        best.certificate = cert;
      }
      continue;
    }
    const double bits = std::max(0.0, log2_safe(m));
    if (best.flag != DivergenceFlag::Finite || bits < best.value_bits) {
      best.flag = DivergenceFlag::Finite;
      best.value_bits = bits;
      best.certificate = cert;
      // gamma from the cone part; degenerate segments anchor at omega.
      CMat cone_sum = CMat::Zero(d, d);
      double usum = 0.0;
      for (size_t k = 0; k < gens.size(); ++k) {
        const double uk = point.scalars(static_cast<Index>(gens.size() + k));
        cone_sum += uk * gens[k].matrix();
        usum += uk;
      }
      SegmentWitness w;
      w.m = m;
      w.omega = point.psd[0];
      w.gamma = usum > 1e-9 ? CMat(cone_sum / usum) : w.omega;
      best.segment = std::move(w);
    }
  }
  if (best.flag != DivergenceFlag::Finite) best.value_bits = kInf;
  return best;
}

/// Distance from omega to the admissible smoothing anchors of P.
double ball_distance(const CMat& omega, const StateSet& p, const SolverOptions& opts) {
  if (p.hull() == HullKind::ConvexHull) {
    StateSet point({DensityOperator::from_validated(omega)}, HullKind::Finite);
    return set_geometry(point, p, opts).separation;
  }
  double dist = kInf;
  for (const auto& rho : p.generators()) {
    dist = std::min(dist, trace_distance(omega, rho.matrix()));
  }
  return dist;
}

/// Parametric backend for one-parameter families: feasibility of a given M by
/// scanning anchor/endpoint parameters on the curve, then bisection on M.
class ParametricSegment {
 public:
  ParametricSegment(const StateSet& p, const StateSet& e, double eps, double m_cap,
                    const SolverOptions& opts)
      : p_(p), e_(e), fam_(*e.sampler()), eps_(eps), m_cap_(m_cap), opts_(opts) {
    n_param_ = std::max(65, e.grid_used());
    const double lo = fam_.param_lo(), hi = fam_.param_hi();
    params_.resize(static_cast<size_t>(n_param_));
    for (int i = 0; i < n_param_; ++i) {
      params_[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n_param_ - 1);
    }
  }

  struct Candidate {
    bool ok = false;
    CMat gamma, omega;
  };

  /// Violation of the candidate built from anchor s0 and endpoint s1 at scale
  /// M; <= tol means a feasible segment.
  double violation(double m, double s0, double s1, Candidate* cand) const {
    const CMat gamma = fam_.point(s0);
    const CMat end = fam_.point(s1);
    const CMat omega = m * end - (m - 1.0) * gamma;
    Eigen::SelfAdjointEigenSolver<CMat> es(omega, Eigen::EigenvaluesOnly);
    double v = -es.eigenvalues().minCoeff();          // PSD violation
    v = std::max(v, ball_distance(omega, p_, opts_) - eps_);
    if (v <= 1e-9) {
      // Lambda-grid membership along the segment, endpoint included.
      for (int t = 1; t <= kLambdaGrid; ++t) {
        const double lam = (static_cast<double>(t) / kLambdaGrid) / m;
        const CMat x = (1.0 - lam) * gamma + lam * omega;
        if (!fam_.member(x, 1e-8)) {
          v = std::max(v, 1.0);
          break;
        }
      }
    }
    if (cand && v <= 1e-9) {
      cand->ok = true;
      cand->gamma = gamma;
      cand->omega = omega;
    }
    return v;
  }

  bool feasible(double m, Candidate* cand) const {
    for (double s0 : params_) {
      // Coarse scan of the endpoint parameter, then golden-section refinement.
      double best_v = kInf, best_s1 = s0;
      for (double s1 : params_) {
        const double v = violation(m, s0, s1, nullptr);
        if (v < best_v) {
          best_v = v;
          best_s1 = s1;
        }
      }
      if (best_v <= 1e-9) {
        violation(m, s0, best_s1, cand);
        return true;
      }
      const double h = (params_.back() - params_.front()) / (n_param_ - 1);
      double lo = std::max(params_.front(), best_s1 - h);
      double hi = std::min(params_.back(), best_s1 + h);
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = lo, b = hi;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = violation(m, s0, x1, nullptr), f2 = violation(m, s0, x2, nullptr);
      for (int it = 0; it < 60 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 <= f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = violation(m, s0, x1, nullptr);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = violation(m, s0, x2, nullptr);
        }
      }
      const double s1_ref = f1 <= f2 ? x1 : x2;
      if (violation(m, s0, s1_ref, cand) <= 1e-9) return true;
    }
    return false;
  }

  DivergenceResult run() const {
    DivergenceResult out;
    out.grid.backend = "segment-parametric";
    out.grid.m_cap = m_cap_;
    out.grid.lambda_grid = kLambdaGrid;
    out.grid.p_grid = p_.grid_used();
    out.grid.e_grid = e_.grid_used();

    Candidate cand;
    if (!feasible(m_cap_, &cand)) {
      out.flag = DivergenceFlag::InfeasibleUpToCap;
      out.value_bits = kInf;
      return out;
    }
    double lo = 1.0 + 1e-12, hi = m_cap_;
    if (feasible(lo, &cand)) {
      hi = lo;
    } else {
      // Bisect the smallest feasible scale.
      for (int it = 0; it < 80 && (hi - lo) > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid, nullptr)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    Candidate final_cand;
    feasible(hi, &final_cand);
    out.value_bits = std::max(0.0, log2_safe(hi));
    SegmentWitness w;
    w.m = hi;
    w.gamma = final_cand.gamma;
    w.omega = final_cand.omega;
    out.segment = std::move(w);
    return out;
  }

  static constexpr int kLambdaGrid = 64;

 private:
  const StateSet& p_;
  const StateSet& e_;
  SamplerSpec fam_;
  double eps_;
  double m_cap_;
  SolverOptions opts_;
  int n_param_;
  std::vector<double> params_;
};

/// Finite sets admit only degenerate segments: all points coincide with a
/// generator inside the smoothing ball.
DivergenceResult segment_finite(const StateSet& p, const StateSet& e, double eps, double m_cap,
                                const SolverOptions& opts) {
  DivergenceResult out;
  out.grid.backend = "segment-finite-degenerate";
  out.grid.m_cap = m_cap;
  out.grid.p_grid = p.grid_used();
  out.grid.e_grid = e.grid_used();
  for (const auto& tau : e.generators()) {
    if (ball_distance(tau.matrix(), p, opts) <= eps + 1e-9) {
      out.value_bits = 0.0;
      SegmentWitness w;
      w.m = 1.0;
      w.gamma = tau.matrix();
      w.omega = tau.matrix();
      out.segment = std::move(w);
      return out;
    }
  }
  out.flag = DivergenceFlag::InfeasibleUpToCap;
  out.value_bits = kInf;
  return out;
}

}  // namespace

DivergenceResult d_max_segment(const StateSet& p, const StateSet& e, double eps, double m_cap,
                               const SolverOptions& opts) {
  check_eps(eps);
  if (!(m_cap > 1.0)) raise(ErrorKind::BadParameter, "m_cap must exceed 1");
  p.require_materialized("d_max_segment");
  e.require_materialized("d_max_segment");
  check_pair_dims(p, e);

  switch (e.hull()) {
    case HullKind::ConvexHull: return segment_convex(p, e, eps, m_cap, opts);
    case HullKind::Finite:
      if (e.sampler() && e.sampler()->one_parameter()) {
        return ParametricSegment(p, e, eps, m_cap, opts).run();
      }
      return segment_finite(p, e, eps, m_cap, opts);
    case HullKind::AffineHull:
      raise(ErrorKind::BackendUnavailable,
            "segment quantity undefined for affine-hull sets (non-convex, non-parametric)");
  }
  raise(ErrorKind::BackendUnavailable, "unhandled hull kind");
}

// ---------------------------------------------------------------------------
// Umegaki, quasi-entropy trace, Hoeffding
// ---------------------------------------------------------------------------

double umegaki_relative_entropy(const DensityOperator& rho, const DensityOperator& tau) {
  if (rho.dim() != tau.dim()) raise(ErrorKind::DimMismatch, "pair of different dimension");
  const Spectrum sr = eig(rho.op());
  const Spectrum st = eig(tau.op());

  // Support violation: weight of rho outside supp(tau).
  double leak = 0.0;
  for (Index j = 0; j < st.eigenvalues.size(); ++j) {
    if (st.eigenvalues(j) <= tol::support_umegaki) {
      const CVec u = st.eigenvectors.col(j);
      leak += std::real((u.adjoint() * rho.matrix() * u)(0));
    }
  }
  if (leak > tol::support_umegaki) return kInf;

  double s_rho = 0.0;
  for (Index i = 0; i < sr.eigenvalues.size(); ++i) {
    const double lam = sr.eigenvalues(i);
    if (lam > tol::support_umegaki) s_rho += lam * std::log(lam);
  }
  double s_cross = 0.0;
  for (Index j = 0; j < st.eigenvalues.size(); ++j) {
    const double mu = st.eigenvalues(j);
    if (mu > tol::support_umegaki) {
      const CVec u = st.eigenvectors.col(j);
      s_cross += std::log(mu) * std::real((u.adjoint() * rho.matrix() * u)(0));
    }
  }
  return (s_rho - s_cross) / kLog2;
}

double trace_quasi(const DensityOperator& rho, const DensityOperator& tau, double alpha) {
  if (rho.dim() != tau.dim()) raise(ErrorKind::DimMismatch, "pair of different dimension");
  if (!(alpha > 0.0) || !(alpha < 1.0)) raise(ErrorKind::BadParameter, "alpha must be in (0, 1)");
  const HermitianOperator ra = herm_function(rho.op(), ScalarFunction::power(alpha));
  const HermitianOperator tb = herm_function(tau.op(), ScalarFunction::power(1.0 - alpha));
  return (ra.matrix() * tb.matrix()).trace().real();
}

double hoeffding_divergence(const DensityOperator& rho, const DensityOperator& tau, int n,
                            double r) {
  if (n < 1) raise(ErrorKind::BadParameter, "n must be a positive integer");
  if (!(r > 0.0)) raise(ErrorKind::BadParameter, "rate r must be positive");
  if (rho.dim() != tau.dim()) raise(ErrorKind::DimMismatch, "pair of different dimension");

  // Per-copy objective; the i.i.d. structure scales it by n at the end.
  const auto g = [&](double alpha) {
    const double q = trace_quasi(rho, tau, alpha);
    if (!(q > 1e-300)) return kInf;
    return ((alpha - 1.0) * r - log2_safe(q)) / alpha;
  };

  const double a_lo = 0.001, a_hi = 0.999;
  const int n_grid = 256;
  double best = -kInf;
  int best_i = 0;
  for (int i = 0; i < n_grid; ++i) {
    const double a = a_lo + (a_hi - a_lo) * static_cast<double>(i) / (n_grid - 1);
    const double v = g(a);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (std::isinf(best) || static_cast<double>(n) * best > 1e6) return kInf;

  // A maximum on the low boundary signals the 1/alpha divergence of the
  // pure type-I case; probe toward zero until the cutoff decides.
  if (best_i == 0) {
    for (double a = a_lo; a > 1e-12; a *= 0.1) {
      const double v = g(a);
      if (std::isinf(v) || static_cast<double>(n) * v > 1e6) return kInf;
      best = std::max(best, v);
    }
  }

  // Golden-section refinement on the bracketing interval.
  const double step = (a_hi - a_lo) / (n_grid - 1);
  double a = std::max(a_lo, a_lo + (best_i - 1) * step);
  double b = std::min(a_hi, a_lo + (best_i + 1) * step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = g(x2);
    }
  }
  best = std::max(best, std::max(f1, f2));
  const double h = static_cast<double>(n) * best;
  return h > 1e6 ? kInf : h;
}

}  // namespace uqthermo
