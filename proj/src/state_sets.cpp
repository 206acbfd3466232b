/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/state_sets.hpp"

#include <cmath>

#include "uqthermo/basis.hpp"

namespace uqthermo {

const char* to_string(HullKind h) noexcept {
  switch (h) {
    case HullKind::Finite: return "finite";
    case HullKind::ConvexHull: return "convex";
    case HullKind::AffineHull: return "affine";
  }
  return "finite";
}

HullKind hull_from_string(const std::string& s) {
  if (s == "finite") return HullKind::Finite;
  if (s == "convex") return HullKind::ConvexHull;
  if (s == "affine") return HullKind::AffineHull;
  raise(ErrorKind::SchemaError, "unknown hull kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// SamplerSpec
// ---------------------------------------------------------------------------

SamplerSpec SamplerSpec::battery_interval(double lo, double hi, int grid) {
  if (!(lo > 1.0) || !(hi >= lo)) raise(ErrorKind::BadParameter, "need 1 < m_lo <= m_hi");
  SamplerSpec s;
  s.family = Family::BatteryInterval;
  s.m_lo = lo;
  s.m_hi = hi;
  s.grid = grid;
  return s;
}

SamplerSpec SamplerSpec::battery_ray(double lo, int grid, double cap, bool limit) {
  if (!(lo > 1.0) || !(cap > lo)) raise(ErrorKind::BadParameter, "need 1 < m_lo < m_cap");
  SamplerSpec s;
  s.family = Family::BatteryRay;
  s.m_lo = lo;
  s.m_hi = cap;
  s.m_cap = cap;
  s.ray_limit_point = limit;
  s.grid = grid;
  return s;
}

SamplerSpec SamplerSpec::qubit_field_ball(double h0, double delta, double beta, int grid) {
  if (!(delta > 0.0) || !(beta > 0.0)) raise(ErrorKind::BadParameter, "need delta, beta > 0");
  SamplerSpec s;
  s.family = Family::QubitFieldBall;
  s.h0 = h0;
  s.delta = delta;
  s.beta = beta;
  s.grid = grid;
  return s;
}

SamplerSpec SamplerSpec::iid_power(SamplerSpec base, int n, int grid) {
  if (n < 1) raise(ErrorKind::BadParameter, "iid power needs n >= 1");
  if (base.family == Family::IidPower) raise(ErrorKind::BadParameter, "nested iid power");
  SamplerSpec s;
  s.family = Family::IidPower;
  s.base = std::make_shared<SamplerSpec>(std::move(base));
  s.copies = n;
  s.grid = grid;
  return s;
}

Index SamplerSpec::dim() const {
  switch (family) {
    case Family::BatteryInterval:
    case Family::BatteryRay:
    case Family::QubitFieldBall: return 2;
    case Family::IidPower: {
      Index d = 1;
      for (int i = 0; i < copies; ++i) d *= base->dim();
      return d;
    }
  }
  return 2;
}

std::string SamplerSpec::name() const {
  switch (family) {
    case Family::BatteryInterval: return "battery_interval";
    case Family::BatteryRay: return "battery_ray";
    case Family::QubitFieldBall: return "qubit_field_ball";
    case Family::IidPower: return "iid_power(" + base->name() + ")";
  }
  return "unknown";
}

std::vector<DensityOperator> SamplerSpec::sample() const {
  if (grid < 2) raise(ErrorKind::GridTooCoarse, "sampler grid must be at least 2");
  std::vector<DensityOperator> out;
  switch (family) {
    case Family::BatteryInterval: {
      for (int k = 0; k < grid; ++k) {
        const double m = m_lo + (m_hi - m_lo) * static_cast<double>(k) / (grid - 1);
        out.push_back(battery_gibbs(m));
      }
      break;
    }
    case Family::BatteryRay: {
      const double ratio = m_cap / m_lo;
      for (int k = 0; k < grid; ++k) {
        const double m = m_lo * std::pow(ratio, static_cast<double>(k) / (grid - 1));
        out.push_back(battery_gibbs(m));
      }
      if (ray_limit_point) {
        CMat ground = CMat::Zero(2, 2);
        ground(0, 0) = 1.0;
        out.push_back(DensityOperator::from_validated(std::move(ground)));
      }
      break;
    }
    case Family::QubitFieldBall: {
      // Fibonacci sphere of radius delta around the nominal field h0 z.
      const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < grid; ++i) {
        const double zc = 1.0 - 2.0 * (i + 0.5) / grid;
        const double rc = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const double phi = golden_angle * i;
        const std::array<double, 3> h = {delta * rc * std::cos(phi), delta * rc * std::sin(phi),
                                         h0 + delta * zc};
        out.push_back(qubit_field_gibbs(h, beta));
      }
      out.push_back(qubit_field_gibbs({0.0, 0.0, h0}, beta));
      break;
    }
    case Family::IidPower: {
      SamplerSpec base_at_grid = *base;
      base_at_grid.grid = grid;
      for (const DensityOperator& g : base_at_grid.sample()) {
        out.push_back(tensor_power(g, copies));
      }
      break;
    }
  }
  return out;
}

bool SamplerSpec::one_parameter() const {
  switch (family) {
    case Family::BatteryInterval:
    case Family::BatteryRay: return true;
    case Family::IidPower: return base->one_parameter();
    case Family::QubitFieldBall: return false;
  }
  return false;
}

double SamplerSpec::param_lo() const { return family == Family::IidPower ? base->param_lo() : m_lo; }

double SamplerSpec::param_hi() const {
  if (family == Family::IidPower) return base->param_hi();
  return family == Family::BatteryRay ? m_cap : m_hi;
}

CMat SamplerSpec::point(double m) const {
  if (family == Family::IidPower) return tensor_power(base->point(m), copies);
  return battery_gibbs(m).matrix();
}

bool SamplerSpec::member(const CMat& x, double entry_tol, double* m_hat) const {
  if (!one_parameter()) return false;
  const Index d = dim();
  if (x.rows() != d) return false;
  const int n = family == Family::IidPower ? copies : 1;
  const double p = x(d - 1, d - 1).real();  // <1..1|x|1..1> = m^{-n} on the curve
  if (!(p > 0.0)) return false;
  const double m = std::pow(p, -1.0 / n);
  const double slack = 1e-9 * std::max(1.0, param_hi());
  if (m < param_lo() - slack || m > param_hi() + slack) return false;
  if ((x - point(m)).cwiseAbs().maxCoeff() > entry_tol) return false;
  if (m_hat) *m_hat = m;
  return true;
}

// ---------------------------------------------------------------------------
// StateSet
// ---------------------------------------------------------------------------

namespace {

void check_same_dim(const std::vector<DensityOperator>& gens) {
  for (size_t i = 1; i < gens.size(); ++i) {
    if (gens[i].dim() != gens[0].dim()) {
      raise(ErrorKind::DimMismatch, "state set generators have mixed dimensions");
    }
  }
}

}  // namespace

StateSet::StateSet(std::vector<DensityOperator> generators, HullKind hull)
    : generators_(std::move(generators)), hull_(hull), materialized_(true) {
  if (generators_.empty()) raise(ErrorKind::BadParameter, "state set needs generators");
  check_same_dim(generators_);
}

StateSet::StateSet(std::vector<DensityOperator> generators, HullKind hull, SamplerSpec sampler)
    : generators_(std::move(generators)),
      hull_(hull),
      sampler_(std::move(sampler)),
      materialized_(false) {
  check_same_dim(generators_);
  for (const auto& g : generators_) {
    if (g.dim() != sampler_->dim()) {
      raise(ErrorKind::DimMismatch, "generator dimension differs from sampler family");
    }
  }
}

StateSet StateSet::from_sampler(SamplerSpec sampler, HullKind hull) {
  return StateSet({}, hull, std::move(sampler));
}

Index StateSet::dim() const {
  if (!generators_.empty()) return generators_[0].dim();
  if (sampler_) return sampler_->dim();
  raise(ErrorKind::BadParameter, "empty state set");
}

void StateSet::require_materialized(const char* what) const {
  if (!materialized_) {
    raise(ErrorKind::BadParameter,
          std::string(what) + " requires a materialized state set (call materialize first)");
  }
  if (generators_.empty()) raise(ErrorKind::BadParameter, "state set has no generators");
}

StateSet materialize(const StateSet& set) {
  if (set.materialized()) return set;
  StateSet out = set;
  const auto sampled = set.sampler()->sample();
  out.generators_.insert(out.generators_.end(), sampled.begin(), sampled.end());
  check_same_dim(out.generators_);
  out.materialized_ = true;
  out.grid_used_ = set.sampler()->grid;
  return out;
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

double SubspaceBasis::residual_outside(const CMat& x) const {
  double norm2 = hs_inner(x, x);
  for (const CMat& g : ops) {
    const double c = hs_inner(g, x);
    norm2 -= c * c;
  }
  return std::max(0.0, norm2);
}

SubspaceBasis difference_subspace_basis(const StateSet& k) {
  k.require_materialized("difference_subspace_basis");
  const auto& gens = k.generators();
  const Index d = k.dim();
  SubspaceBasis basis;
  basis.ambient_dim = d;
  if (gens.size() < 2) return basis;  // singleton: V(K) = {0}

  const Index ncoord = d * d;
  RMat diffs(ncoord, static_cast<Index>(gens.size() - 1));
  for (size_t i = 1; i < gens.size(); ++i) {
    diffs.col(static_cast<Index>(i - 1)) = herm_coords(gens[i].matrix() - gens[0].matrix());
  }
  Eigen::JacobiSVD<RMat> svd(diffs, Eigen::ComputeThinU);
  const double cut = tol::rank_cut * svd.singularValues().maxCoeff();
  for (Index r = 0; r < svd.singularValues().size(); ++r) {
    if (svd.singularValues()(r) > cut) {
      basis.ops.push_back(from_herm_coords(svd.matrixU().col(r), d));
    }
  }
  return basis;
}

IntersectionWitness conv_aff_intersection(const StateSet& p, const StateSet& e,
                                          IntersectionMode mode, const SolverOptions& opts) {
  p.require_materialized("conv_aff_intersection");
  e.require_materialized("conv_aff_intersection");
  if (p.dim() != e.dim()) raise(ErrorKind::DimMismatch, "sets of different dimension");

  const Index d = p.dim();
  const auto np = static_cast<Index>(p.generators().size());
  const auto ne = static_cast<Index>(e.generators().size());
  const auto& basis = hermitian_basis(d);
  const auto ncoord = static_cast<Index>(basis.size());

  RMat a_eq = RMat::Zero(ncoord + 2, np + ne);
  RVec b_eq = RVec::Zero(ncoord + 2);
  for (Index k = 0; k < ncoord; ++k) {
    for (Index i = 0; i < np; ++i) {
      a_eq(k, i) = hs_inner(basis[static_cast<size_t>(k)], p.generators()[static_cast<size_t>(i)].matrix());
    }
    for (Index j = 0; j < ne; ++j) {
      a_eq(k, np + j) =
          -hs_inner(basis[static_cast<size_t>(k)], e.generators()[static_cast<size_t>(j)].matrix());
    }
  }
  a_eq.row(ncoord).head(np).setOnes();
  b_eq(ncoord) = 1.0;
  a_eq.row(ncoord + 1).tail(ne).setOnes();
  b_eq(ncoord + 1) = 1.0;

  std::vector<ScalarBounds> bounds;
  for (Index i = 0; i < np; ++i) {
    bounds.push_back(mode == IntersectionMode::ConvAff ? ScalarBounds::nonneg()
                                                       : ScalarBounds::free());
  }
  for (Index j = 0; j < ne; ++j) bounds.push_back(ScalarBounds::free());

  auto [x, cert] = solve_lp(RVec::Zero(np + ne), a_eq, b_eq, RMat(), RVec(), bounds, opts);

  IntersectionWitness w;
  w.certificate = cert;
  if (cert.status == SolveStatus::Optimal) {
    w.feasible = true;
    w.p_coeffs = x.head(np);
    w.e_coeffs = x.tail(ne);
    CMat lhs = CMat::Zero(d, d);
    for (Index i = 0; i < np; ++i) lhs += w.p_coeffs(i) * p.generators()[static_cast<size_t>(i)].matrix();
    CMat rhs = CMat::Zero(d, d);
    for (Index j = 0; j < ne; ++j) rhs += w.e_coeffs(j) * e.generators()[static_cast<size_t>(j)].matrix();
    w.reconstruction_residual = (lhs - rhs).cwiseAbs().maxCoeff();
  } else if (cert.status == SolveStatus::Infeasible) {
    w.feasible = false;
  } else {
    raise(ErrorKind::SolverFailure,
          std::string("intersection LP ended with status ") + to_string(cert.status));
  }
  return w;
}

namespace {

/// min_{c in simplex(P'), a in simplex(E')} T(sum c rho, sum a tau), where a
/// side may instead be a single fixed state. Solved as a trace-norm epigraph.
double hull_separation(const std::vector<DensityOperator>& ps,
                       const std::vector<DensityOperator>& es, const SolverOptions& opts,
                       SolveCertificate* cert_out) {
  const Index d = ps[0].dim();
  SdpProblem prob;
  const int dplus = prob.add_psd_var(d);
  const int dminus = prob.add_psd_var(d);
  std::vector<int> cvars, avars;
  for (size_t i = 0; i < ps.size(); ++i) cvars.push_back(prob.add_scalar(ScalarBounds::nonneg()));
  for (size_t j = 0; j < es.size(); ++j) avars.push_back(prob.add_scalar(ScalarBounds::nonneg()));

  // Delta+ - Delta- - sum_i c_i rho_i + sum_j a_j tau_j = 0, coordinatewise.
  const auto& basis = hermitian_basis(d);
  for (const CMat& g : basis) {
    LinearConstraint row;
    row.lhs.psd_coeffs.emplace_back(dplus, g);
    row.lhs.psd_coeffs.emplace_back(dminus, CMat(-g));
    for (size_t i = 0; i < ps.size(); ++i) {
      row.lhs.scalar_coeffs.emplace_back(cvars[i], -hs_inner(g, ps[i].matrix()));
    }
    for (size_t j = 0; j < es.size(); ++j) {
      row.lhs.scalar_coeffs.emplace_back(avars[j], hs_inner(g, es[j].matrix()));
    }
    row.rhs = 0.0;
    prob.equalities.push_back(std::move(row));
  }
  for (auto vars : {&cvars, &avars}) {
    LinearConstraint sum1;
    for (int v : *vars) sum1.lhs.scalar_coeffs.emplace_back(v, 1.0);
    sum1.rhs = 1.0;
    prob.equalities.push_back(std::move(sum1));
  }
  LinearExpr obj;
  obj.psd_coeffs.emplace_back(dplus, CMat(0.5 * CMat::Identity(d, d)));
  obj.psd_coeffs.emplace_back(dminus, CMat(0.5 * CMat::Identity(d, d)));
  prob.objective = std::move(obj);

  auto [point, cert] = solve_sdp(prob, opts);
  if (cert.status != SolveStatus::Optimal) {
    raise(ErrorKind::SolverFailure,
          std::string("separation SDP ended with status ") + to_string(cert.status));
  }
  if (cert_out) *cert_out = cert;
  return cert.primal_value;
}

}  // namespace

SetGeometry set_geometry(const StateSet& p, const StateSet& e, const SolverOptions& opts) {
  p.require_materialized("set_geometry");
  e.require_materialized("set_geometry");
  if (p.dim() != e.dim()) raise(ErrorKind::DimMismatch, "sets of different dimension");

  SetGeometry geom;
  geom.p_over_hull = p.hull() == HullKind::ConvexHull;
  geom.e_over_hull = e.hull() == HullKind::ConvexHull;

  // Diameter of E: trace distance is convex in each argument, so the maximum
  // over the hull is attained at generator pairs.
  const auto& egens = e.generators();
  for (size_t i = 0; i < egens.size(); ++i) {
    for (size_t j = i + 1; j < egens.size(); ++j) {
      geom.diameter = std::max(geom.diameter, trace_distance(egens[i], egens[j]));
    }
  }

  const auto& pgens = p.generators();
  if (!geom.p_over_hull && !geom.e_over_hull) {
    double sep = kInf;
    for (const auto& rho : pgens) {
      for (const auto& tau : egens) sep = std::min(sep, trace_distance(rho, tau));
    }
    geom.separation = sep;
  } else if (geom.p_over_hull && geom.e_over_hull) {
    SolveCertificate cert;
    geom.separation = hull_separation(pgens, egens, opts, &cert);
    geom.separation_certificate = cert;
  } else {
    // Enumerate the raw side, optimize over the hulled side.
    const bool p_raw = !geom.p_over_hull;
    const auto& raw = p_raw ? pgens : egens;
    const auto& hulled = p_raw ? egens : pgens;
    double sep = kInf;
    SolveCertificate cert;
    for (const auto& fixed : raw) {
      SolveCertificate c;
      const double v = p_raw ? hull_separation({fixed}, hulled, opts, &c)
                             : hull_separation(hulled, {fixed}, opts, &c);
      if (v < sep) {
        sep = v;
        cert = c;
      }
    }
    geom.separation = sep;
    geom.separation_certificate = cert;
  }
  return geom;
}

}  // namespace uqthermo
