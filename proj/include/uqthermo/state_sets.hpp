/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uqthermo/gibbs.hpp"
#include "uqthermo/operators.hpp"
#include "uqthermo/solver.hpp"

namespace uqthermo {

enum class HullKind { Finite, ConvexHull, AffineHull };

const char* to_string(HullKind h) noexcept;
HullKind hull_from_string(const std::string& s);

/// Parametric state family discretized by materialize(). Battery families and
/// their i.i.d. powers are one-parameter curves in the capacity M; the qubit
/// field ball is a three-parameter neighborhood sampled on a Fibonacci sphere.
struct SamplerSpec {
  enum class Family { BatteryInterval, BatteryRay, QubitFieldBall, IidPower };

  Family family = Family::BatteryInterval;
  int grid = 0;

  double m_lo = 2.0, m_hi = 3.0;     // battery interval
  double m_cap = 1e6;                // battery ray truncation
  bool ray_limit_point = true;       // append the M -> inf limit |0><0|
  double h0 = 1.0, delta = 0.1, beta = 1.0;  // qubit field ball
  std::shared_ptr<SamplerSpec> base;         // iid power
  int copies = 1;

  static SamplerSpec battery_interval(double lo, double hi, int grid);
  static SamplerSpec battery_ray(double lo, int grid, double cap = 1e6, bool limit = true);
  static SamplerSpec qubit_field_ball(double h0, double delta, double beta, int grid);
  static SamplerSpec iid_power(SamplerSpec base, int n, int grid);

  Index dim() const;
  std::string name() const;
  std::vector<DensityOperator> sample() const;

  /// One-parameter curves support the parametric segment backend.
  bool one_parameter() const;
  double param_lo() const;
  double param_hi() const;
  CMat point(double m) const;
  /// Membership in the continuous family (not just the grid): inverts the
  /// parameter from the fastest-decaying diagonal entry and compares.
  bool member(const CMat& x, double entry_tol, double* m_hat = nullptr) const;
};

/// Uncertainty set: finite generators, a hull interpretation flag, and an
/// optional parametric sampler. Geometric queries require materialization.
class StateSet {
 public:
  StateSet(std::vector<DensityOperator> generators, HullKind hull);
  StateSet(std::vector<DensityOperator> generators, HullKind hull, SamplerSpec sampler);
  static StateSet from_sampler(SamplerSpec sampler, HullKind hull = HullKind::Finite);

  const std::vector<DensityOperator>& generators() const { return generators_; }
  HullKind hull() const { return hull_; }
  const std::optional<SamplerSpec>& sampler() const { return sampler_; }
  bool materialized() const { return materialized_; }
  Index dim() const;
  int grid_used() const { return grid_used_; }

  void require_materialized(const char* what) const;

 private:
  friend StateSet materialize(const StateSet& set);

  std::vector<DensityOperator> generators_;
  HullKind hull_;
  std::optional<SamplerSpec> sampler_;
  bool materialized_ = false;
  int grid_used_ = 0;
};

/// Extends the generator list with the sampler grid. Idempotent; grids of
/// fewer than two points are rejected.
StateSet materialize(const StateSet& set);

/// Orthonormal (Hilbert-Schmidt) Hermitian basis of span{g_i - g_0}.
struct SubspaceBasis {
  std::vector<CMat> ops;
  Index ambient_dim = 0;

  int dimension() const { return static_cast<int>(ops.size()); }
  /// Squared norm of the component of x outside the span.
  double residual_outside(const CMat& x) const;
};

SubspaceBasis difference_subspace_basis(const StateSet& k);

enum class IntersectionMode { ConvAff, AffAff };

struct IntersectionWitness {
  bool feasible = false;
  RVec p_coeffs;  // convex (or affine) weights on the P generators
  RVec e_coeffs;  // affine weights on the E generators
  double reconstruction_residual = 0.0;
  SolveCertificate certificate;
};

/// LP feasibility of conv(P) meeting aff(E) (or aff-aff for exact
/// conversion), imposed on the orthonormal Hermitian coordinate basis.
IntersectionWitness conv_aff_intersection(const StateSet& p, const StateSet& e,
                                          IntersectionMode mode = IntersectionMode::ConvAff,
                                          const SolverOptions& opts = {});

struct SetGeometry {
  double separation = 0.0;  // T(P, E)
  double diameter = 0.0;    // diam(E); 0 for singletons
  bool p_over_hull = false;
  bool e_over_hull = false;
  std::optional<SolveCertificate> separation_certificate;
};

/// Trace-distance separation and diameter. Sets flagged ConvexHull are
/// measured over their hulls (separation by SDP over hull coefficients);
/// diameters are always attained at generators.
SetGeometry set_geometry(const StateSet& p, const StateSet& e, const SolverOptions& opts = {});

}  // namespace uqthermo
