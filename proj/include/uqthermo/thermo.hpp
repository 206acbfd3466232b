/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "uqthermo/divergences.hpp"
#include "uqthermo/gibbs.hpp"
#include "uqthermo/state_sets.hpp"

namespace uqthermo {

enum class BatteryKind { Clean, Dirty };

const char* to_string(BatteryKind k) noexcept;

struct BatterySpec {
  double m = 2.0;
  BatteryKind kind = BatteryKind::Clean;
};

/// Measure-and-prepare channel sum_k tr[E_k .] sigma_k. Effects must resolve
/// the identity within 1e-8; a replacer is the single-effect special case.
class ChannelSpec {
 public:
  enum class Kind { MeasurePrepare, Replacer };

  ChannelSpec(Kind kind, std::vector<TestOperator> effects, std::vector<DensityOperator> outputs);

  static ChannelSpec replacer(const DensityOperator& target);

  Kind kind() const { return kind_; }
  const std::vector<TestOperator>& effects() const { return effects_; }
  const std::vector<DensityOperator>& outputs() const { return outputs_; }
  Index input_dim() const { return effects_[0].op().dim(); }
  Index output_dim() const { return outputs_[0].dim(); }

  DensityOperator apply(const CMat& state) const;
  DensityOperator apply(const DensityOperator& state) const { return apply(state.matrix()); }

 private:
  Kind kind_;
  std::vector<TestOperator> effects_;
  std::vector<DensityOperator> outputs_;
};

struct ChannelVerification {
  std::vector<double> gibbs_residuals;  // per E generator
  std::vector<double> state_errors;     // per P generator
  double gibbs_tolerance = 0.0;
  double state_tolerance = 0.0;
  bool pass = false;
};

enum class TaskVerdict { Pass, Fail, InfeasibleUpToCap, Infinite };

const char* to_string(TaskVerdict v) noexcept;

struct TaskReport {
  double value_bits = 0.0;  // +inf for Infinite / InfeasibleUpToCap
  TaskVerdict verdict = TaskVerdict::Fail;
  std::optional<ChannelSpec> channel;
  ChannelVerification verification;
  DivergenceResult divergence;  // value provenance: witness + certificate
};

/// Applies the channel to every generator: Gibbs-preservation residual is the
/// distance of each transformed E generator to the target equilibrium set,
/// state error the distance of each transformed P generator to the target
/// nonequilibrium set (must be <= eps + 1e-7). `gibbs_tol` defaults to the
/// exact-representation tolerance 1e-7; pass a grid resolution for sampled
/// targets.
ChannelVerification verify_channel(const ChannelSpec& ch, const StateSet& p, const StateSet& e,
                                   const StateSet& target_p, const StateSet& target_e, double eps,
                                   double gibbs_tol = 1e-7);

/// One-shot extractable work in bits. Clean batteries use the oblivious-test
/// value (test orthogonal to V(E)); dirty batteries the plain smoothed
/// min-relative entropy. The optimal test is synthesized into a
/// measure-and-prepare channel and verified on the instance.
TaskReport extractable_work(const StateSet& p, const StateSet& e, double eps, BatteryKind battery,
                            const SolverOptions& opts = {});

/// One-shot work cost in bits. Clean batteries: smoothed max-relative entropy
/// (witness pair reported, no constructive channel). Dirty batteries: segment
/// quantity, with the two-effect preparation channel synthesized and checked
/// against the target family at sampled input capacities.
TaskReport formation_cost(const StateSet& p, const StateSet& e, double eps, BatteryKind battery,
                          double m_cap = 1e4, const SolverOptions& opts = {});

enum class NogoKind { TriviallyAchievable, Impossible, TheoremSilent };

const char* to_string(NogoKind k) noexcept;

struct NogoVerdict {
  NogoKind kind = NogoKind::TheoremSilent;
  double target_distance = 0.0;          // T(rho', tau')
  std::optional<ChannelSpec> channel;    // replacer when trivially achievable
  IntersectionWitness intersection;
};

/// Decides convertibility of (P, E) into the definite target (rho', tau'):
/// under the hull-intersection condition the conversion is achievable iff
/// eps >= T(rho', tau'), by the replacer onto tau'; without the condition no
/// claim is made.
NogoVerdict nogo_purification(const StateSet& p, const StateSet& e,
                              const DensityOperator& target_rho,
                              const DensityOperator& target_tau, double eps,
                              const SolverOptions& opts = {});

struct TruncationResult {
  bool feasible = false;
  double q = 0.0;  // excited weight of the ground-effect output
  std::optional<ChannelSpec> channel;
  double gibbs_residual = 0.0;  // trace distance of F(pi_M) to pi_N
  double state_error = 0.0;     // trace distance of F(|1><1|) to |1><1|
};

/// Battery energy truncation pi_M -> pi_N with excited states preserved up to
/// eps: feasible iff M >= N(1 - eps). Builds the explicit two-effect channel
/// (or the replacer once eps >= 1 - 1/N) and verifies it to 1e-10.
TruncationResult truncation(double m, double n, double eps);

struct DirtyTruncationVerdict {
  bool achievable = false;
  double threshold = 0.0;  // 1 - 1/n
  NogoVerdict cross_check;
};

/// Universal truncation from the two-point dirty battery {pi_m1, pi_m2} to a
/// clean battery of capacity n: achievable iff eps >= 1 - 1/n. Cross-checked
/// through the purification no-go on the equivalent instance.
DirtyTruncationVerdict dirty_truncation_nogo(double m1, double m2, double n, double eps,
                                             const SolverOptions& opts = {});

enum class BoundKind { Zero, Infinite, Bound, NotApplicable };

struct FormationBound {
  BoundKind kind = BoundKind::NotApplicable;
  double value_bits = 0.0;
  SetGeometry geometry;
};

/// Geometric lower bound on the dirty-battery formation cost: 0 when the
/// smoothing ball reaches E, +inf when E is a point beyond reach, otherwise
/// log2((T(P,E) - eps)/diam(E)).
FormationBound formation_lower_bound(const StateSet& p, const StateSet& e, double eps,
                                     const SolverOptions& opts = {});

}  // namespace uqthermo
