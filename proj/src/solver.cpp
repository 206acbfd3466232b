/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/solver.hpp"

#include <algorithm>
#include <cmath>

#include "uqthermo/operators.hpp"

namespace uqthermo {

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

std::atomic<long>& SolverStats::optimal_count() {
  static std::atomic<long> n{0};
  return n;
}
std::atomic<long>& SolverStats::downgrade_count() {
  static std::atomic<long> n{0};
  return n;
}
void SolverStats::reset() {
  optimal_count() = 0;
  downgrade_count() = 0;
}

// ---------------------------------------------------------------------------
// ConeProgram assembly
// ---------------------------------------------------------------------------

int ConeProgram::add_psd_block(Index d) {
  if (d < 1) raise(ErrorKind::BadParameter, "PSD block dimension must be positive");
  psd_dims_.push_back(d);
  return static_cast<int>(psd_dims_.size()) - 1;
}

int ConeProgram::add_lin_vars(int n) {
  const int first = lin_dim_;
  lin_dim_ += n;
  return first;
}

void ConeProgram::add_objective_psd(int block, const CMat& coeff) {
  obj_psd_.push_back({block, coeff});
}

void ConeProgram::add_objective_lin(int index, double coeff) {
  obj_lin_.push_back({index, coeff});
}

void ConeProgram::add_eq(std::vector<PsdTerm> psd, std::vector<LinTerm> lin, double rhs) {
  rows_.push_back({std::move(psd), std::move(lin), rhs});
}

void ConeProgram::add_le(std::vector<PsdTerm> psd, std::vector<LinTerm> lin, double rhs) {
  const int slack = add_lin_vars(1);
  lin.push_back({slack, 1.0});
  rows_.push_back({std::move(psd), std::move(lin), rhs});
}

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point solver with NT scaling.
//
// Standard form: min <C,X> s.t. <A_i,X> = b_i, X in (PSD blocks) x R+^p.
// The embedding tracks (X, y, Z, tau, kappa); tau > 0 at convergence yields
// an optimal pair, kappa > 0 yields a primal or dual improving ray.
// ---------------------------------------------------------------------------

namespace {

double hs(const CMat& a, const CMat& b) { return a.conjugate().cwiseProduct(b).sum().real(); }

CMat chol_lower(const CMat& s) {
  Eigen::LLT<CMat> llt(s);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Spectrum sp = eig(s);
  const double floor_val = 1e-14 * std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
  RVec lam = sp.eigenvalues.cwiseMax(floor_val);
  CMat fixed = sp.eigenvectors * lam.asDiagonal() * sp.eigenvectors.adjoint();
  Eigen::LLT<CMat> llt2(fixed);
  return llt2.matrixL();
}

/// Largest a with S + a*D >= 0, given the Cholesky factor L of S.
double step_to_boundary(const CMat& l, const CMat& d) {
  const CMat half = l.triangularView<Eigen::Lower>().solve(d);
  const CMat g = l.triangularView<Eigen::Lower>().solve(half.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min >= -1e-14) return kInf;
  return -1.0 / lam_min;
}

struct BlockRef {
  int row;
  CMat coeff;
};

}  // namespace

struct ConeSolver {
  const ConeProgram& prog;
  SolverOptions opts;

  int m = 0;  // rows
  int nblk = 0;
  int p = 0;  // nonnegative scalars
  double nu = 0.0;

  std::vector<std::vector<BlockRef>> block_rows;  // per block: touching rows
  std::vector<CMat> c_blk;
  RMat a_lin;  // m x p
  RVec c_lin;
  RVec b;
  double data_scale = 1.0;

  // iterate
  std::vector<CMat> X, Z;
  RVec x, z, y;
  double tau = 1.0, kappa = 1.0;

  mutable RMat flat_a_;  // lazily built flattened constraints for ray polishing

  // per-iteration scaling state
  std::vector<CMat> W, Lx, Lz, Zinv;
  RVec w2;

  explicit ConeSolver(const ConeProgram& pr, const SolverOptions& o) : prog(pr), opts(o) {
    m = prog.num_rows();
    nblk = prog.num_blocks();
    p = prog.lin_dim();
    if (nblk == 0 && p == 0) raise(ErrorKind::BadParameter, "empty cone program");

    block_rows.assign(static_cast<size_t>(nblk), {});
    c_blk.resize(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) {
      c_blk[static_cast<size_t>(k)] = CMat::Zero(prog.block_dim(k), prog.block_dim(k));
    }
    a_lin = RMat::Zero(m, p);
    c_lin = RVec::Zero(p);
    b = RVec::Zero(m);

    for (int i = 0; i < m; ++i) {
      const auto& row = prog.rows_[static_cast<size_t>(i)];
      b(i) = row.rhs;
      for (const auto& t : row.psd) block_rows[static_cast<size_t>(t.block)].push_back({i, t.coeff});
      for (const auto& t : row.lin) a_lin(i, t.index) += t.coeff;
    }
    for (const auto& t : prog.obj_psd_) c_blk[static_cast<size_t>(t.block)] += t.coeff;
    for (const auto& t : prog.obj_lin_) c_lin(t.index) += t.coeff;

    nu = static_cast<double>(p);
    for (int k = 0; k < nblk; ++k) nu += static_cast<double>(prog.block_dim(k));

    double sc = 1.0;
    sc = std::max(sc, m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    if (p > 0) {
      sc = std::max(sc, c_lin.cwiseAbs().maxCoeff());
      if (m > 0) sc = std::max(sc, a_lin.cwiseAbs().maxCoeff());
    }
    for (int k = 0; k < nblk; ++k) {
      sc = std::max(sc, c_blk[static_cast<size_t>(k)].cwiseAbs().maxCoeff());
      for (const auto& r : block_rows[static_cast<size_t>(k)]) {
        sc = std::max(sc, r.coeff.cwiseAbs().maxCoeff());
      }
    }
    data_scale = sc;
  }

  // A applied to a cone point.
  RVec apply_a(const std::vector<CMat>& xb, const RVec& xl) const {
    RVec out = RVec::Zero(m);
    for (int k = 0; k < nblk; ++k) {
      for (const auto& r : block_rows[static_cast<size_t>(k)]) {
        out(r.row) += hs(r.coeff, xb[static_cast<size_t>(k)]);
      }
    }
    if (p > 0) out += a_lin * xl;
    return out;
  }

  // Adjoint of A on the PSD block k.
  CMat apply_at_block(const RVec& yv, int k) const {
    CMat out = CMat::Zero(prog.block_dim(k), prog.block_dim(k));
    for (const auto& r : block_rows[static_cast<size_t>(k)]) out += yv(r.row) * r.coeff;
    return out;
  }

  RVec apply_at_lin(const RVec& yv) const { return p > 0 ? RVec(a_lin.transpose() * yv) : RVec(); }

  double inner_c(const std::vector<CMat>& xb, const RVec& xl) const {
    double v = 0.0;
    for (int k = 0; k < nblk; ++k) v += hs(c_blk[static_cast<size_t>(k)], xb[static_cast<size_t>(k)]);
    if (p > 0) v += c_lin.dot(xl);
    return v;
  }

  void init_point() {
    X.resize(static_cast<size_t>(nblk));
    Z.resize(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) {
      X[static_cast<size_t>(k)] = CMat::Identity(prog.block_dim(k), prog.block_dim(k));
      Z[static_cast<size_t>(k)] = CMat::Identity(prog.block_dim(k), prog.block_dim(k));
    }
    x = RVec::Ones(p);
    z = RVec::Ones(p);
    y = RVec::Zero(m);
    tau = 1.0;
    kappa = 1.0;
  }

  double mu() const {
    double s = tau * kappa;
    for (int k = 0; k < nblk; ++k) s += hs(X[static_cast<size_t>(k)], Z[static_cast<size_t>(k)]);
    if (p > 0) s += x.dot(z);
    return s / (nu + 1.0);
  }

  void update_scaling() {
    W.resize(static_cast<size_t>(nblk));
    Lx.resize(static_cast<size_t>(nblk));
    Lz.resize(static_cast<size_t>(nblk));
    Zinv.resize(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      Lx[uk] = chol_lower(X[uk]);
      Lz[uk] = chol_lower(Z[uk]);
      const CMat prod = Lz[uk].adjoint() * Lx[uk];
      Eigen::JacobiSVD<CMat> svd(prod, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const CMat lxv = Lx[uk] * svd.matrixV();
      RVec sv = svd.singularValues();
      for (Index i = 0; i < sv.size(); ++i) sv(i) = 1.0 / std::max(sv(i), 1e-150);
      CMat w = lxv * sv.asDiagonal() * lxv.adjoint();
      W[uk] = 0.5 * (w + w.adjoint());
      const Index d = prog.block_dim(k);
      const CMat linv = Lz[uk].triangularView<Eigen::Lower>().solve(CMat::Identity(d, d));
      CMat zi = linv.adjoint() * linv;
      Zinv[uk] = 0.5 * (zi + zi.adjoint());
    }
    if (p > 0) w2 = x.cwiseQuotient(z);
  }

  struct Direction {
    std::vector<CMat> dX, dZ;
    RVec dx, dz, dy;
    double dtau = 0.0, dkappa = 0.0;
  };

  struct SchurFactor {
    RMat m_raw;
    Eigen::LDLT<RMat> ldlt;
    RVec q2;      // M^{-1} (v + b)
    RVec v;       // A(W C W, w2 .* c)
    double wc = 0.0;
    bool ok = false;

    /// LDLT solve; the shifted factor acts as a preconditioner and iterative
    /// refinement against the unregularized matrix removes the bias.
    RVec solve(const RVec& rhs) const {
      RVec q = ldlt.solve(rhs);
      const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
      for (int pass = 0; pass < 6; ++pass) {
        const RVec resid = rhs - m_raw * q;
        if (resid.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
        const RVec corr = ldlt.solve(resid);
        if (!corr.allFinite()) break;
        q += corr;
      }
      return q;
    }
  };

  SchurFactor factor_schur(double shift_boost = 1.0) {
    SchurFactor f;
    RMat M = RMat::Zero(m, m);
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      const auto& rows = block_rows[uk];
      std::vector<CMat> t(rows.size());
      for (size_t j = 0; j < rows.size(); ++j) t[j] = W[uk] * rows[j].coeff * W[uk];
      for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j <= i; ++j) {
          const double val = hs(rows[i].coeff, t[j]);
          M(rows[i].row, rows[j].row) += val;
          if (rows[i].row != rows[j].row) M(rows[j].row, rows[i].row) += val;
        }
      }
    }
    if (p > 0) M.noalias() += a_lin * w2.asDiagonal() * a_lin.transpose();

    // v_i = <A_i, W C W> (+ linear part), wc = <C, W C W> (+ linear part)
    f.v = RVec::Zero(m);
    f.wc = 0.0;
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      const CMat wcw = W[uk] * c_blk[uk] * W[uk];
      for (const auto& r : block_rows[uk]) f.v(r.row) += hs(r.coeff, wcw);
      f.wc += hs(c_blk[uk], wcw);
    }
    if (p > 0) {
      const RVec w2c = w2.cwiseProduct(c_lin);
      f.v += a_lin * w2c;
      f.wc += c_lin.dot(w2c);
    }

    f.m_raw = M;
    double shift = 1e-14 * std::max(1.0, M.trace() / std::max(1, m)) * shift_boost;
    for (int attempt = 0; attempt < 6; ++attempt) {
      RMat reg = M + shift * RMat::Identity(m, m);
      f.ldlt.compute(reg);
      if (f.ldlt.info() == Eigen::Success) {
        f.q2 = f.solve(f.v + b);
        if (f.q2.allFinite()) {
          f.ok = true;
          return f;
        }
      }
      shift *= 1e3;
    }
    return f;
  }

  // Solve the Newton system for given linear rhs (fp, Fd, fg) and
  // complementarity targets (Rc per block, rc on LP, rtk on tau*kappa).
  Direction solve_newton(const SchurFactor& f, const RVec& fp, const std::vector<CMat>& fd,
                         const RVec& fd_lin, double fg, const std::vector<CMat>& rc,
                         const RVec& rc_lin, double rtk) {
    Direction d;
    // h = A(Rc - W Fd W, rc - w2 .* fd_lin), e0 = <C, same>
    RVec h = RVec::Zero(m);
    double e0 = 0.0;
    std::vector<CMat> base(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      base[uk] = rc[uk] - W[uk] * fd[uk] * W[uk];
      for (const auto& r : block_rows[uk]) h(r.row) += hs(r.coeff, base[uk]);
      e0 += hs(c_blk[uk], base[uk]);
    }
    RVec base_lin;
    if (p > 0) {
      base_lin = rc_lin - w2.cwiseProduct(fd_lin);
      h += a_lin * base_lin;
      e0 += c_lin.dot(base_lin);
    }

    const RVec q1 = f.solve(fp - h);
    const double rhs2 = fg + e0 + rtk / tau;
    const double denom = f.wc + kappa / tau + (b - f.v).dot(f.q2);
    d.dtau = (rhs2 - (b - f.v).dot(q1)) / denom;
    d.dy = q1 + d.dtau * f.q2;

    d.dZ.resize(static_cast<size_t>(nblk));
    d.dX.resize(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      CMat dz = fd[uk] - apply_at_block(d.dy, k) + c_blk[uk] * d.dtau;
      d.dZ[uk] = 0.5 * (dz + dz.adjoint());
      CMat dx = rc[uk] - W[uk] * d.dZ[uk] * W[uk];
      d.dX[uk] = 0.5 * (dx + dx.adjoint());
    }
    if (p > 0) {
      d.dz = fd_lin - apply_at_lin(d.dy) + c_lin * d.dtau;
      d.dx = rc_lin - w2.cwiseProduct(d.dz);
    }
    d.dkappa = (rtk - kappa * d.dtau) / tau;
    return d;
  }

  double max_step(const Direction& d) const {
    double a = kInf;
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      a = std::min(a, step_to_boundary(Lx[uk], d.dX[uk]));
      a = std::min(a, step_to_boundary(Lz[uk], d.dZ[uk]));
    }
    for (Index j = 0; j < p; ++j) {
      if (d.dx(j) < 0) a = std::min(a, -x(j) / d.dx(j));
      if (d.dz(j) < 0) a = std::min(a, -z(j) / d.dz(j));
    }
    if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
    if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
    return a;
  }

  bool direction_finite(const Direction& d) const {
    if (!std::isfinite(d.dtau) || !std::isfinite(d.dkappa)) return false;
    if (m > 0 && !d.dy.allFinite()) return false;
    if (p > 0 && (!d.dx.allFinite() || !d.dz.allFinite())) return false;
    for (int k = 0; k < nblk; ++k) {
      if (!d.dX[static_cast<size_t>(k)].allFinite() || !d.dZ[static_cast<size_t>(k)].allFinite())
        return false;
    }
    return true;
  }

  /// Applies the step, halving it if the iterate leaves the representable
  /// range. Returns false when no usable step remains.
  bool try_step(const Direction& d, double a) {
    const auto x_save = X;
    const auto z_save = Z;
    const RVec xl_save = x, zl_save = z, y_save = y;
    const double tau_save = tau, kappa_save = kappa;
    for (int attempt = 0; attempt < 6; ++attempt) {
      for (int k = 0; k < nblk; ++k) {
        const auto uk = static_cast<size_t>(k);
        X[uk] += a * d.dX[uk];
        Z[uk] += a * d.dZ[uk];
        X[uk] = 0.5 * (X[uk] + X[uk].adjoint());
        Z[uk] = 0.5 * (Z[uk] + Z[uk].adjoint());
      }
      if (p > 0) {
        x += a * d.dx;
        z += a * d.dz;
      }
      y += a * d.dy;
      tau += a * d.dtau;
      kappa += a * d.dkappa;
      if (iterate_finite()) return true;
      X = x_save;
      Z = z_save;
      x = xl_save;
      z = zl_save;
      y = y_save;
      tau = tau_save;
      kappa = kappa_save;
      a *= 0.5;
    }
    return false;
  }

  // Residuals of the scaled-back candidate solution.
  void candidate_residuals(double& pres, double& dres, double& pobj, double& dobj) const {
    const double inv_tau = 1.0 / tau;
    std::vector<CMat> xs(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) xs[static_cast<size_t>(k)] = X[static_cast<size_t>(k)] * inv_tau;
    const RVec xl = p > 0 ? RVec(x * inv_tau) : RVec();
    pres = m > 0 ? (apply_a(xs, xl) - b).cwiseAbs().maxCoeff() : 0.0;

    dres = 0.0;
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      const CMat r = c_blk[uk] - apply_at_block(y, k) * inv_tau - Z[uk] * inv_tau;
      dres = std::max(dres, r.cwiseAbs().maxCoeff());
    }
    if (p > 0) {
      const RVec r = c_lin - apply_at_lin(y) * inv_tau - z * inv_tau;
      dres = std::max(dres, r.cwiseAbs().maxCoeff());
    }
    pobj = inner_c(xs, xl);
    dobj = m > 0 ? b.dot(y) * inv_tau : 0.0;
  }

  /// Flattened constraint matrix over real coordinates (blocks via the
  /// orthonormal Hermitian basis, then the LP part) with b as the last row.
  const RMat& flat_constraints() const {
    if (flat_a_.size() == 0) {
      Index dim_total = p;
      for (int k = 0; k < nblk; ++k) dim_total += prog.block_dim(k) * prog.block_dim(k);
      RMat f = RMat::Zero(dim_total + 1, m);
      Index off = 0;
      for (int k = 0; k < nblk; ++k) {
        const Index sq = prog.block_dim(k) * prog.block_dim(k);
        for (const auto& r : block_rows[static_cast<size_t>(k)]) {
          f.col(r.row).segment(off, sq) += herm_coords(r.coeff);
        }
        off += sq;
      }
      if (p > 0) f.block(off, 0, p, m) = a_lin.transpose();
      f.row(dim_total) = b.transpose();
      flat_a_ = std::move(f);
    }
    return flat_a_;
  }

  /// Rebuilds a minimum-norm dual improving ray from the raw iterate and
  /// verifies it from scratch: -A^T(y) must be PSD up to clipping and the
  /// scaled margin <b, y> must clear the configured threshold.
  std::optional<SolveCertificate> polish_primal_infeasible(double by_raw, int iter) const {
    const RMat& f = flat_constraints();
    // Target A^T(y') = -Z / <b,y> and <b, y'> = 1, taken from the iterate
    // identity rather than from y itself (whose null-space drift cancels
    // catastrophically).
    RVec g = RVec::Zero(f.rows());
    Index off = 0;
    for (int k = 0; k < nblk; ++k) {
      const Index sq = prog.block_dim(k) * prog.block_dim(k);
      g.segment(off, sq) = -herm_coords(Z[static_cast<size_t>(k)]) / by_raw;
      off += sq;
    }
    if (p > 0) g.segment(off, p) = -z / by_raw;
    g(f.rows() - 1) = 1.0;  // normalize the margin to one
    Eigen::JacobiSVD<RMat> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec ray = svd.solve(g);
    if (!ray.allFinite()) return std::nullopt;

    double violation = 0.0;  // positive part of A^T(ray) (dual slack must be -A^T(ray) >= 0)
    double zmax = 0.0;
    for (int k = 0; k < nblk; ++k) {
      const CMat at = apply_at_block(ray, k);
      Eigen::SelfAdjointEigenSolver<CMat> es(at, Eigen::EigenvaluesOnly);
      violation = std::max(violation, es.eigenvalues().maxCoeff());
      zmax = std::max(zmax, at.cwiseAbs().maxCoeff());
    }
    if (p > 0) {
      const RVec at = apply_at_lin(ray);
      violation = std::max(violation, at.maxCoeff());
      zmax = std::max(zmax, at.cwiseAbs().maxCoeff());
    }
    const double by = b.dot(ray);
    const double scale = std::max({1.0, ray.cwiseAbs().maxCoeff(), zmax});
    if (by <= 0.0) return std::nullopt;
    const double margin = by / scale;
    if (margin < opts.infeas_margin || violation > 1e-9 * std::max(1.0, data_scale) * scale) {
      return std::nullopt;
    }
    SolveCertificate cert;
    cert.status = SolveStatus::Infeasible;
    cert.infeasibility_margin = margin;
    cert.iterations = iter;
    return cert;
  }

  // Improving-ray tests on the raw iterate. Returns a stamped certificate
  // when an infeasibility direction with sufficient margin exists.
  std::optional<SolveCertificate> ray_certificates(int iter) const {
    // Primal infeasible: A^T(y) + Z ~ 0, Z >= 0, <b,y> > 0. The raw iterate
    // may carry a large null-space drift, so the test is relative to the
    // margin and the declared certificate is re-derived at minimum norm.
    const double by_raw = m > 0 ? b.dot(y) : 0.0;
    if (by_raw > 0) {
      double resid = 0.0;
      for (int k = 0; k < nblk; ++k) {
        const auto uk = static_cast<size_t>(k);
        resid = std::max(resid, (apply_at_block(y, k) + Z[uk]).cwiseAbs().maxCoeff());
      }
      if (p > 0) resid = std::max(resid, (apply_at_lin(y) + z).cwiseAbs().maxCoeff());
      if (resid <= 1e-9 * std::max(1.0, data_scale) * by_raw) {
        if (auto cert = polish_primal_infeasible(by_raw, iter)) return cert;
      }
    }
    // Dual infeasible (primal unbounded ray): A(X) ~ 0, X >= 0, <C,X> < 0.
    double xscale = 1e-300;
    for (int k = 0; k < nblk; ++k) {
      xscale = std::max(xscale, X[static_cast<size_t>(k)].cwiseAbs().maxCoeff());
    }
    if (p > 0) xscale = std::max(xscale, x.cwiseAbs().maxCoeff());
    const double cx = inner_c(X, x) / xscale;
    if (cx < 0) {
      const double resid =
          m > 0 ? apply_a(X, x).cwiseAbs().maxCoeff() / xscale : 0.0;
      if (-cx >= opts.infeas_margin && resid <= 1e-9 * std::max(1.0, data_scale) &&
          -cx >= 10.0 * resid) {
        SolveCertificate cert;
        cert.status = SolveStatus::Unbounded;
        cert.infeasibility_margin = -cx;
        cert.iterations = iter;
        return cert;
      }
    }
    return std::nullopt;
  }

  ConeSolution run() {
    init_point();
    ConeSolution sol;
    SolveCertificate cert;
    int iter = 0;
    int stall = 0;
    bool converged = false;

    for (; iter < opts.max_iterations; ++iter) {
      // Convergence of the scaled-back candidate.
      double pres, dres, pobj, dobj;
      candidate_residuals(pres, dres, pobj, dobj);
      const double gap = std::abs(pobj - dobj);
      if (pres <= opts.tol_feas && dres <= opts.tol_feas && gap <= opts.tol_gap) {
        converged = true;
        break;
      }
      if (auto ray = ray_certificates(iter)) {
        cert = *ray;
        finalize(sol, cert);
        return sol;
      }

      const double mu_now = mu();
      if (mu_now < 1e-16) break;  // double precision exhausted

      update_scaling();
      const SchurFactor f = factor_schur();
      if (!f.ok) {
        raise(ErrorKind::IllConditioned,
              "KKT system factorization failed beyond regularization");
      }

      // Residual vectors.
      std::vector<CMat> res_d(static_cast<size_t>(nblk));
      for (int k = 0; k < nblk; ++k) {
        const auto uk = static_cast<size_t>(k);
        res_d[uk] = c_blk[uk] * tau - apply_at_block(y, k) - Z[uk];
      }
      RVec res_d_lin;
      if (p > 0) res_d_lin = c_lin * tau - apply_at_lin(y) - z;
      RVec res_p = b * tau - apply_a(X, x);
      const double res_g = kappa + inner_c(X, x) - (m > 0 ? b.dot(y) : 0.0);

      // Predictor: pure Newton toward complementarity zero.
      std::vector<CMat> rc_aff(static_cast<size_t>(nblk));
      for (int k = 0; k < nblk; ++k) rc_aff[static_cast<size_t>(k)] = -X[static_cast<size_t>(k)];
      const RVec rc_aff_lin = p > 0 ? RVec(-x) : RVec();
      Direction aff = solve_newton(f, res_p, res_d, res_d_lin, res_g, rc_aff, rc_aff_lin,
                                   -tau * kappa);
      const double a_aff = std::min(1.0, max_step(aff));

      // Mehrotra centering weight from the affine trial point.
      double mu_aff = (tau + a_aff * aff.dtau) * (kappa + a_aff * aff.dkappa);
      for (int k = 0; k < nblk; ++k) {
        const auto uk = static_cast<size_t>(k);
        mu_aff += hs(X[uk] + a_aff * aff.dX[uk], Z[uk] + a_aff * aff.dZ[uk]);
      }
      if (p > 0) mu_aff += (x + a_aff * aff.dx).dot(z + a_aff * aff.dz);
      mu_aff /= (nu + 1.0);
      double sigma = std::pow(std::max(0.0, mu_aff / mu_now), 3.0);
      sigma = std::clamp(sigma, 1e-6, 0.999);

      // Combined corrector step.
      const double eta = 1.0 - sigma;
      std::vector<CMat> rc(static_cast<size_t>(nblk));
      for (int k = 0; k < nblk; ++k) {
        const auto uk = static_cast<size_t>(k);
        rc[uk] = sigma * mu_now * Zinv[uk] - X[uk];
      }
      RVec rc_lin;
      if (p > 0) {
        rc_lin = (sigma * mu_now) * z.cwiseInverse() - x -
                 aff.dx.cwiseProduct(aff.dz).cwiseQuotient(z);
      }
      const double rtk = sigma * mu_now - tau * kappa - aff.dtau * aff.dkappa;

      Direction dir = solve_newton(f, eta * res_p, scale_blocks(res_d, eta),
                                   p > 0 ? RVec(eta * res_d_lin) : RVec(), eta * res_g, rc,
                                   rc_lin, rtk);
      if (!direction_finite(dir)) {
        // Retry once with a heavier-regularized factorization.
        const SchurFactor f2 = factor_schur(1e6);
        if (!f2.ok) break;
        dir = solve_newton(f2, eta * res_p, scale_blocks(res_d, eta),
                           p > 0 ? RVec(eta * res_d_lin) : RVec(), eta * res_g, rc, rc_lin, rtk);
        if (!direction_finite(dir)) break;
      }
      double alpha = std::min(1.0, 0.98 * max_step(dir));
      if (!std::isfinite(alpha) || alpha <= 0.0) alpha = 0.0;
      if (alpha < 1e-9) {
        if (++stall >= 3) break;
      } else {
        stall = 0;
      }
      if (!try_step(dir, alpha)) break;
    }

    cert.iterations = iter;
    finalize(sol, cert);

    // Independent recomputation decides the stamped status.
    double pres, dres, pobj, dobj;
    candidate_residuals(pres, dres, pobj, dobj);
    cert.primal_value = pobj + prog.objective_offset();
    cert.dual_value = dobj + prog.objective_offset();
    cert.gap = std::abs(pobj - dobj);
    cert.primal_residual = pres;
    cert.dual_residual = dres;
    if (pres <= opts.tol_feas && dres <= opts.tol_feas && cert.gap <= opts.tol_gap) {
      cert.status = SolveStatus::Optimal;
      SolverStats::optimal_count()++;
    } else {
      if (converged) SolverStats::downgrade_count()++;
      cert.status = SolveStatus::MaxIter;
      if (auto ray = ray_certificates(iter)) {
        cert.status = ray->status;
        cert.infeasibility_margin = ray->infeasibility_margin;
      }
    }
    sol.certificate = cert;
    return sol;
  }

  static std::vector<CMat> scale_blocks(const std::vector<CMat>& v, double s) {
    std::vector<CMat> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
    return out;
  }

  bool iterate_finite() const {
    if (!std::isfinite(tau) || !std::isfinite(kappa)) return false;
    if (m > 0 && !y.allFinite()) return false;
    if (p > 0 && (!x.allFinite() || !z.allFinite())) return false;
    for (int k = 0; k < nblk; ++k) {
      if (!X[static_cast<size_t>(k)].allFinite() || !Z[static_cast<size_t>(k)].allFinite())
        return false;
    }
    return true;
  }

  void finalize(ConeSolution& sol, const SolveCertificate& cert) const {
    const double inv_tau = 1.0 / std::max(tau, 1e-300);
    const bool scaled = cert.status != SolveStatus::Infeasible &&
                        cert.status != SolveStatus::Unbounded;
    const double s = scaled ? inv_tau : 1.0;
    sol.psd.resize(static_cast<size_t>(nblk));
    sol.dual_psd.resize(static_cast<size_t>(nblk));
    for (int k = 0; k < nblk; ++k) {
      const auto uk = static_cast<size_t>(k);
      sol.psd[uk] = X[uk] * s;
      sol.dual_psd[uk] = Z[uk] * s;
    }
    sol.lin = p > 0 ? RVec(x * s) : RVec();
    sol.dual_lin = p > 0 ? RVec(z * s) : RVec();
    sol.y = m > 0 ? RVec(y * s) : RVec();
    sol.certificate = cert;
  }
};

ConeSolution solve_cone(const ConeProgram& prog, const SolverOptions& opts) {
  ConeSolver solver(prog, opts);
  return solver.run();
}

// ---------------------------------------------------------------------------
// SdpProblem lowering
// ---------------------------------------------------------------------------

namespace {

CMat validated_herm(const CMat& a, const char* where) {
  if (a.rows() != a.cols()) raise(ErrorKind::BadParameter, std::string(where) + ": not square");
  const double asym = (0.5 * (a - a.adjoint())).cwiseAbs().maxCoeff();
  if (asym > 1e-9) {
    raise(ErrorKind::BadParameter,
          std::string(where) + ": constraint operator not Hermitian, asymmetry " +
              std::to_string(asym));
  }
  return 0.5 * (a + a.adjoint());
}

struct ScalarMap {
  int pos = -1;   // LP index of the (shifted) variable
  int neg = -1;   // second LP index for free variables
  double shift = 0.0;
  double sign = 1.0;
};

}  // namespace

std::pair<SdpPoint, SolveCertificate> solve_sdp(const SdpProblem& prob,
                                                const SolverOptions& opts) {
  if (prob.dim > 64) raise(ErrorKind::BadParameter, "interval variable dimension exceeds 64");
  if (prob.dim < 0) raise(ErrorKind::BadParameter, "negative dimension");

  ConeProgram cone;

  int blk_e = -1, blk_f = -1;
  if (prob.dim > 0) {
    blk_e = cone.add_psd_block(prob.dim);
    blk_f = cone.add_psd_block(prob.dim);
  }
  std::vector<int> blk_extra;
  for (Index d : prob.psd_vars) blk_extra.push_back(cone.add_psd_block(d));

  std::vector<ScalarMap> smap(prob.scalars.size());
  std::vector<std::pair<int, double>> box_rows;  // (lp index, width) to add later
  for (size_t i = 0; i < prob.scalars.size(); ++i) {
    const ScalarBounds& sb = prob.scalars[i];
    ScalarMap& map = smap[i];
    const bool lo_fin = std::isfinite(sb.lo);
    const bool hi_fin = std::isfinite(sb.hi);
    if (lo_fin && hi_fin && sb.lo > sb.hi) raise(ErrorKind::BadParameter, "empty scalar bounds");
    if (lo_fin) {
      map.pos = cone.add_lin_vars(1);
      map.shift = sb.lo;
      map.sign = 1.0;
      if (hi_fin) box_rows.emplace_back(map.pos, sb.hi - sb.lo);
    } else if (hi_fin) {
      map.pos = cone.add_lin_vars(1);
      map.shift = sb.hi;
      map.sign = -1.0;
    } else {
      map.pos = cone.add_lin_vars(1);
      map.neg = cone.add_lin_vars(1);
    }
  }
  for (const auto& [idx, width] : box_rows) cone.add_le({}, {{idx, 1.0}}, width);

  const auto expand = [&](const LinearExpr& expr, std::vector<ConeProgram::PsdTerm>& psd,
                          std::vector<ConeProgram::LinTerm>& lin, double& shift_total) {
    if (expr.e_coeff.size() > 0) {
      if (prob.dim == 0) raise(ErrorKind::BadParameter, "E coefficient without interval variable");
      if (expr.e_coeff.rows() != prob.dim) {
        raise(ErrorKind::DimMismatch, "E coefficient dimension mismatch");
      }
      psd.push_back({blk_e, validated_herm(expr.e_coeff, "E coefficient")});
    }
    for (const auto& [vi, coeff] : expr.psd_coeffs) {
      if (vi < 0 || vi >= static_cast<int>(prob.psd_vars.size())) {
        raise(ErrorKind::BadParameter, "PSD variable index out of range");
      }
      if (coeff.rows() != prob.psd_vars[static_cast<size_t>(vi)]) {
        raise(ErrorKind::DimMismatch, "PSD coefficient dimension mismatch");
      }
      psd.push_back({blk_extra[static_cast<size_t>(vi)], validated_herm(coeff, "PSD coefficient")});
    }
    for (const auto& [si, coeff] : expr.scalar_coeffs) {
      if (si < 0 || si >= static_cast<int>(prob.scalars.size())) {
        raise(ErrorKind::BadParameter, "scalar index out of range");
      }
      const ScalarMap& map = smap[static_cast<size_t>(si)];
      shift_total += coeff * map.shift;
      lin.push_back({map.pos, coeff * map.sign});
      if (map.neg >= 0) lin.push_back({map.neg, -coeff});
    }
  };

  {
    std::vector<ConeProgram::PsdTerm> psd;
    std::vector<ConeProgram::LinTerm> lin;
    double shift = 0.0;
    expand(prob.objective, psd, lin, shift);
    for (auto& t : psd) cone.add_objective_psd(t.block, t.coeff);
    for (auto& t : lin) cone.add_objective_lin(t.index, t.coeff);
    cone.add_objective_offset(shift);
  }

  if (prob.dim > 0) {
    // E + F = I on the orthonormal Hermitian coordinate basis.
    const auto& basis = hermitian_basis(prob.dim);
    for (const CMat& g : basis) {
      cone.add_eq({{blk_e, g}, {blk_f, g}}, {}, g.real().trace());
    }
  }

  for (const LinearConstraint& c : prob.equalities) {
    std::vector<ConeProgram::PsdTerm> psd;
    std::vector<ConeProgram::LinTerm> lin;
    double shift = 0.0;
    expand(c.lhs, psd, lin, shift);
    cone.add_eq(std::move(psd), std::move(lin), c.rhs - shift);
  }
  for (const LinearConstraint& c : prob.inequalities) {
    std::vector<ConeProgram::PsdTerm> psd;
    std::vector<ConeProgram::LinTerm> lin;
    double shift = 0.0;
    expand(c.lhs, psd, lin, shift);
    cone.add_le(std::move(psd), std::move(lin), c.rhs - shift);
  }

  ConeSolution sol = solve_cone(cone, opts);

  SdpPoint point;
  if (prob.dim > 0) point.e = sol.psd[static_cast<size_t>(blk_e)];
  for (int bk : blk_extra) point.psd.push_back(sol.psd[static_cast<size_t>(bk)]);
  point.scalars = RVec::Zero(static_cast<Index>(prob.scalars.size()));
  for (size_t i = 0; i < prob.scalars.size(); ++i) {
    const ScalarMap& map = smap[i];
    double v = map.shift + map.sign * sol.lin(map.pos);
    if (map.neg >= 0) v -= sol.lin(map.neg);
    point.scalars(static_cast<Index>(i)) = v;
  }
  return {std::move(point), sol.certificate};
}

std::pair<RVec, SolveCertificate> solve_lp(const RVec& c, const RMat& a_eq, const RVec& b_eq,
                                           const RMat& a_ub, const RVec& b_ub,
                                           const std::vector<ScalarBounds>& bounds,
                                           const SolverOptions& opts) {
  const Index n = c.size();
  if (n > 10000) raise(ErrorKind::BadParameter, "LP exceeds 10000 variables");
  if (static_cast<Index>(bounds.size()) != n) {
    raise(ErrorKind::BadParameter, "bounds size mismatch");
  }
  if ((a_eq.size() > 0 && a_eq.cols() != n) || (a_ub.size() > 0 && a_ub.cols() != n)) {
    raise(ErrorKind::DimMismatch, "LP constraint matrix width mismatch");
  }
  if (!c.allFinite() || !a_eq.allFinite() || !b_eq.allFinite() || !a_ub.allFinite() ||
      !b_ub.allFinite()) {
    raise(ErrorKind::BadParameter, "LP data must be finite");
  }

  SdpProblem prob;
  for (Index j = 0; j < n; ++j) prob.add_scalar(bounds[static_cast<size_t>(j)]);
  for (Index j = 0; j < n; ++j) {
    if (c(j) != 0.0) prob.objective.scalar_coeffs.emplace_back(static_cast<int>(j), c(j));
  }
  for (Index i = 0; i < a_eq.rows(); ++i) {
    LinearConstraint row;
    for (Index j = 0; j < n; ++j) {
      if (a_eq(i, j) != 0.0) row.lhs.scalar_coeffs.emplace_back(static_cast<int>(j), a_eq(i, j));
    }
    row.rhs = b_eq(i);
    prob.equalities.push_back(std::move(row));
  }
  for (Index i = 0; i < a_ub.rows(); ++i) {
    LinearConstraint row;
    for (Index j = 0; j < n; ++j) {
      if (a_ub(i, j) != 0.0) row.lhs.scalar_coeffs.emplace_back(static_cast<int>(j), a_ub(i, j));
    }
    row.rhs = b_ub(i);
    prob.inequalities.push_back(std::move(row));
  }

  auto [point, cert] = solve_sdp(prob, opts);
  return {std::move(point.scalars), cert};
}

}  // namespace uqthermo
