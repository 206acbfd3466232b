/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/thermo.hpp"

#include <cmath>

namespace uqthermo {

const char* to_string(BatteryKind k) noexcept {
  return k == BatteryKind::Clean ? "clean" : "dirty";
}

const char* to_string(TaskVerdict v) noexcept {
  switch (v) {
    case TaskVerdict::Pass: return "pass";
    case TaskVerdict::Fail: return "fail";
    case TaskVerdict::InfeasibleUpToCap: return "infeasible-up-to-cap";
    case TaskVerdict::Infinite: return "infinite";
  }
  return "fail";
}

const char* to_string(NogoKind k) noexcept {
  switch (k) {
    case NogoKind::TriviallyAchievable: return "trivially-achievable";
    case NogoKind::Impossible: return "impossible";
    case NogoKind::TheoremSilent: return "theorem-silent";
  }
  return "theorem-silent";
}

namespace {

DensityOperator excited_qubit() {
  CMat m = CMat::Zero(2, 2);
  m(1, 1) = 1.0;
  return DensityOperator::from_validated(std::move(m));
}

}  // namespace

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

ChannelSpec::ChannelSpec(Kind kind, std::vector<TestOperator> effects,
                         std::vector<DensityOperator> outputs)
    : kind_(kind), effects_(std::move(effects)), outputs_(std::move(outputs)) {
  if (effects_.empty() || effects_.size() != outputs_.size()) {
    raise(ErrorKind::BadParameter, "channel needs matching effect/output lists");
  }
  const Index din = effects_[0].op().dim();
  const Index dout = outputs_[0].dim();
  CMat sum = CMat::Zero(din, din);
  for (const auto& e : effects_) {
    if (e.op().dim() != din) raise(ErrorKind::DimMismatch, "effect dimensions differ");
    sum += e.op().matrix();
  }
  for (const auto& o : outputs_) {
    if (o.dim() != dout) raise(ErrorKind::DimMismatch, "output dimensions differ");
  }
  if ((sum - CMat::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-8) {
    raise(ErrorKind::BadParameter, "channel effects do not resolve the identity");
  }
}

ChannelSpec ChannelSpec::replacer(const DensityOperator& target) {
  std::vector<TestOperator> effects;
  effects.emplace_back(HermitianOperator(CMat::Identity(target.dim(), target.dim())));
  return ChannelSpec(Kind::Replacer, std::move(effects), {target});
}

DensityOperator ChannelSpec::apply(const CMat& state) const {
  if (state.rows() != input_dim()) raise(ErrorKind::DimMismatch, "channel input dimension");
  CMat out = CMat::Zero(output_dim(), output_dim());
  for (size_t k = 0; k < effects_.size(); ++k) {
    const double w = (effects_[k].matrix().adjoint() * state).trace().real();
    out += w * outputs_[k].matrix();
  }
  return DensityOperator::from_validated(std::move(out));
}

ChannelVerification verify_channel(const ChannelSpec& ch, const StateSet& p, const StateSet& e,
                                   const StateSet& target_p, const StateSet& target_e, double eps,
                                   double gibbs_tol) {
  p.require_materialized("verify_channel");
  e.require_materialized("verify_channel");
  target_p.require_materialized("verify_channel");
  target_e.require_materialized("verify_channel");
  if (p.dim() != ch.input_dim() || e.dim() != ch.input_dim()) {
    raise(ErrorKind::DimMismatch, "channel input does not match the source sets");
  }
  if (target_p.dim() != ch.output_dim() || target_e.dim() != ch.output_dim()) {
    raise(ErrorKind::DimMismatch, "channel output does not match the target sets");
  }

  ChannelVerification v;
  v.gibbs_tolerance = gibbs_tol;
  v.state_tolerance = eps + 1e-7;
  v.pass = true;
  for (const auto& tau : e.generators()) {
    const DensityOperator out = ch.apply(tau);
    double best = kInf;
    for (const auto& t : target_e.generators()) best = std::min(best, trace_distance(out, t));
    v.gibbs_residuals.push_back(best);
    if (best > v.gibbs_tolerance) v.pass = false;
  }
  for (const auto& rho : p.generators()) {
    const DensityOperator out = ch.apply(rho);
    double best = kInf;
    for (const auto& t : target_p.generators()) best = std::min(best, trace_distance(out, t));
    v.state_errors.push_back(best);
    if (best > v.state_tolerance) v.pass = false;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Work extraction
// ---------------------------------------------------------------------------

TaskReport extractable_work(const StateSet& p, const StateSet& e, double eps, BatteryKind battery,
                            const SolverOptions& opts) {
  TaskReport report;
  report.divergence = battery == BatteryKind::Clean ? d_min_constrained(p, e, e, eps, opts)
                                                    : d_min(p, e, eps, opts);
  report.value_bits = report.divergence.value_bits;
  if (report.divergence.infinite()) {
    // Unbounded extraction: any capacity is reachable, no single channel to
    // pin down (the optimal test has zero overlap with every candidate).
    report.verdict = TaskVerdict::Pass;
    report.verification.pass = true;
    return report;
  }

  const CMat& test = report.divergence.test->matrix();
  const Index d = p.dim();
  std::vector<TestOperator> effects;
  effects.emplace_back(HermitianOperator(CMat(CMat::Identity(d, d) - test)));
  effects.emplace_back(HermitianOperator(test));
  ChannelSpec channel(ChannelSpec::Kind::MeasurePrepare, std::move(effects),
                      {DensityOperator::from_validated(CMat(CMat::Identity(2, 2) -
                                                            excited_qubit().matrix())),
                       excited_qubit()});

  const double m_star = std::exp2(report.value_bits);
  ChannelVerification v;
  v.state_tolerance = eps + 1e-7;
  v.gibbs_tolerance = 1e-7;
  v.pass = true;
  if (battery == BatteryKind::Clean) {
    const DensityOperator target = battery_gibbs(m_star);
    for (const auto& tau : e.generators()) {
      const double r = trace_distance(channel.apply(tau), target);
      v.gibbs_residuals.push_back(r);
      if (r > v.gibbs_tolerance) v.pass = false;
    }
  } else {
    // Dirty battery: each candidate lands on its own Gibbs state pi_{M_j}
    // with M_j >= M*; the residual is the distance to that battery state.
    for (const auto& tau : e.generators()) {
      const DensityOperator out = channel.apply(tau);
      const double overlap = out.matrix()(1, 1).real();
      const double m_j = overlap > 0.0 ? 1.0 / overlap : kInf;
      const double r = std::isinf(m_j) ? 0.0 : trace_distance(out, battery_gibbs(m_j));
      v.gibbs_residuals.push_back(r);
      if (r > v.gibbs_tolerance || m_j < m_star - 1e-6) v.pass = false;
    }
  }
  for (const auto& rho : p.generators()) {
    const double err = trace_distance(channel.apply(rho), excited_qubit());
    v.state_errors.push_back(err);
    if (err > v.state_tolerance) v.pass = false;
  }

  report.channel = std::move(channel);
  report.verification = std::move(v);
  report.verdict = report.verification.pass ? TaskVerdict::Pass : TaskVerdict::Fail;
  return report;
}

// ---------------------------------------------------------------------------
// Work of formation
// ---------------------------------------------------------------------------

namespace {

/// Distance of a state to the target equilibrium representation: analytic
/// family inversion when available, hull membership for convex sets,
/// otherwise nearest generator.
double target_set_distance(const CMat& out, const StateSet& e, const SolverOptions& opts) {
  if (e.sampler() && e.sampler()->one_parameter()) {
    const auto& fam = *e.sampler();
    const Index d = out.rows();
    const int copies = fam.family == SamplerSpec::Family::IidPower ? fam.copies : 1;
    const double pexc = out(d - 1, d - 1).real();
    if (pexc > 0.0) {
      double m_hat = std::pow(pexc, -1.0 / copies);
      m_hat = std::clamp(m_hat, fam.param_lo(), fam.param_hi());
      return trace_distance(out, fam.point(m_hat));
    }
  }
  if (e.hull() == HullKind::ConvexHull) {
    StateSet point({DensityOperator::from_validated(out)}, HullKind::Finite);
    return set_geometry(point, StateSet(e.generators(), HullKind::ConvexHull), opts).separation;
  }
  double best = kInf;
  for (const auto& g : e.generators()) best = std::min(best, trace_distance(out, g.matrix()));
  return best;
}

}  // namespace

TaskReport formation_cost(const StateSet& p, const StateSet& e, double eps, BatteryKind battery,
                          double m_cap, const SolverOptions& opts) {
  TaskReport report;
  if (battery == BatteryKind::Clean) {
    report.divergence = d_max(p, e, eps, opts);
    report.value_bits = report.divergence.value_bits;
    switch (report.divergence.flag) {
      case DivergenceFlag::Finite:
        report.verdict = TaskVerdict::Pass;
        report.verification.pass = true;
        break;
      case DivergenceFlag::InfeasibleCertified:
        report.verdict = TaskVerdict::Infinite;
        break;
      default: report.verdict = TaskVerdict::InfeasibleUpToCap; break;
    }
    return report;
  }

  report.divergence = d_max_segment(p, e, eps, m_cap, opts);
  report.value_bits = report.divergence.value_bits;
  if (report.divergence.infinite()) {
    report.verdict = report.divergence.flag == DivergenceFlag::InfeasibleCertified
                         ? TaskVerdict::Infinite
                         : TaskVerdict::InfeasibleUpToCap;
    return report;
  }

  const SegmentWitness& w = *report.divergence.segment;
  ChannelSpec channel(
      ChannelSpec::Kind::MeasurePrepare,
      {TestOperator(HermitianOperator(CMat(CMat::Identity(2, 2) - excited_qubit().matrix()))),
       TestOperator(HermitianOperator(excited_qubit().matrix()))},
      {make_density(w.gamma), make_density(w.omega)});

  // The channel must map every admissible battery pi_M', M' in [M*, cap],
  // into the target equilibrium representation.
  ChannelVerification v;
  v.gibbs_tolerance = 1e-7;
  v.state_tolerance = eps + 1e-7;
  v.pass = true;
  const int samples = 9;
  for (int i = 0; i < samples; ++i) {
    const double mp =
        w.m * std::pow(m_cap / w.m, static_cast<double>(i) / (samples - 1));
    const DensityOperator out = channel.apply(battery_gibbs(mp));
    const double r = target_set_distance(out.matrix(), e, opts);
    v.gibbs_residuals.push_back(r);
    if (r > v.gibbs_tolerance) v.pass = false;
  }
  // The excited battery must land inside the smoothing ball of P.
  {
    const DensityOperator out = channel.apply(excited_qubit());
    double best = kInf;
    for (const auto& rho : p.generators()) best = std::min(best, trace_distance(out, rho));
    v.state_errors.push_back(best);
    if (best > v.state_tolerance) v.pass = false;
  }

  report.channel = std::move(channel);
  report.verification = std::move(v);
  report.verdict = report.verification.pass ? TaskVerdict::Pass : TaskVerdict::Fail;
  return report;
}

// ---------------------------------------------------------------------------
// No-go verdicts, truncation, lower bound
// ---------------------------------------------------------------------------

NogoVerdict nogo_purification(const StateSet& p, const StateSet& e,
                              const DensityOperator& target_rho,
                              const DensityOperator& target_tau, double eps,
                              const SolverOptions& opts) {
  if (!(eps >= 0.0) || !(eps < 1.0)) raise(ErrorKind::BadParameter, "eps must lie in [0, 1)");
  if (target_rho.dim() != target_tau.dim()) {
    raise(ErrorKind::DimMismatch, "target pair of different dimension");
  }
  NogoVerdict verdict;
  verdict.target_distance = trace_distance(target_rho, target_tau);
  verdict.intersection = conv_aff_intersection(p, e, IntersectionMode::ConvAff, opts);
  if (!verdict.intersection.feasible) {
    verdict.kind = NogoKind::TheoremSilent;
    return verdict;
  }
  if (eps >= verdict.target_distance) {
    verdict.kind = NogoKind::TriviallyAchievable;
    verdict.channel = ChannelSpec::replacer(target_tau);
  } else {
    verdict.kind = NogoKind::Impossible;
  }
  return verdict;
}

TruncationResult truncation(double m, double n, double eps) {
  if (!(m > 1.0) || !(n > 1.0)) raise(ErrorKind::BadParameter, "capacities must exceed 1");
  if (!(eps >= 0.0) || !(eps < 1.0)) raise(ErrorKind::BadParameter, "eps must lie in [0, 1)");

  TruncationResult result;
  result.feasible = m >= n * (1.0 - eps);
  if (!result.feasible) return result;

  const DensityOperator pi_n = battery_gibbs(n);
  if (eps >= 1.0 - 1.0 / n) {
    result.channel = ChannelSpec::replacer(pi_n);
    result.q = 1.0 / n;
  } else {
    result.q = (m - n * (1.0 - eps)) / (n * (m - 1.0));
    CMat gamma0 = CMat::Zero(2, 2);
    gamma0(0, 0) = 1.0 - result.q;
    gamma0(1, 1) = result.q;
    CMat gamma1 = CMat::Zero(2, 2);
    gamma1(0, 0) = eps;
    gamma1(1, 1) = 1.0 - eps;
    CMat ground = CMat::Zero(2, 2);
    ground(0, 0) = 1.0;
    result.channel = ChannelSpec(
        ChannelSpec::Kind::MeasurePrepare,
        {TestOperator(HermitianOperator(ground)),
         TestOperator(HermitianOperator(excited_qubit().matrix()))},
        {DensityOperator::from_validated(std::move(gamma0)),
         DensityOperator::from_validated(std::move(gamma1))});
  }
  result.gibbs_residual = trace_distance(result.channel->apply(battery_gibbs(m)), pi_n);
  result.state_error = trace_distance(result.channel->apply(excited_qubit()), excited_qubit());
  if (result.gibbs_residual > 1e-10) {
    raise(ErrorKind::VerificationFailed, "truncation channel misses the target Gibbs state");
  }
  return result;
}

DirtyTruncationVerdict dirty_truncation_nogo(double m1, double m2, double n, double eps,
                                             const SolverOptions& opts) {
  if (!(m2 > m1) || !(m1 >= n) || !(n > 1.0)) {
    raise(ErrorKind::BadParameter, "need m2 > m1 >= n > 1");
  }
  if (!(eps >= 0.0) || !(eps < 1.0)) raise(ErrorKind::BadParameter, "eps must lie in [0, 1)");
  DirtyTruncationVerdict verdict;
  verdict.threshold = 1.0 - 1.0 / n;
  verdict.achievable = eps >= verdict.threshold;
  // |1><1| lies in the affine hull of {pi_m1, pi_m2}, so the purification
  // no-go applies verbatim with target (|1><1|, pi_n).
  StateSet p({excited_qubit()}, HullKind::Finite);
  StateSet e({battery_gibbs(m1), battery_gibbs(m2)}, HullKind::Finite);
  verdict.cross_check = nogo_purification(p, e, excited_qubit(), battery_gibbs(n), eps, opts);
  return verdict;
}

FormationBound formation_lower_bound(const StateSet& p, const StateSet& e, double eps,
                                     const SolverOptions& opts) {
  if (!(eps >= 0.0) || !(eps < 1.0)) raise(ErrorKind::BadParameter, "eps must lie in [0, 1)");
  FormationBound bound;
  bound.geometry = set_geometry(p, e, opts);
  if (bound.geometry.separation <= eps) {
    bound.kind = BoundKind::Zero;
    bound.value_bits = 0.0;
  } else if (bound.geometry.diameter <= 1e-12) {
    bound.kind = BoundKind::Infinite;
    bound.value_bits = kInf;
  } else {
    bound.kind = BoundKind::Bound;
    bound.value_bits = std::log2((bound.geometry.separation - eps) / bound.geometry.diameter);
  }
  return bound;
}

}  // namespace uqthermo
