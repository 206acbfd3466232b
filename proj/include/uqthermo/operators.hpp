/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "uqthermo/errors.hpp"
#include "uqthermo/types.hpp"

namespace uqthermo {

/// Dense Hermitian operator. The stored matrix is exactly Hermitian: the
/// constructor symmetrizes its input and rejects asymmetries beyond repair.
class HermitianOperator {
 public:
  /// Symmetrizes `raw` to (A + A^dag)/2. Throws NotSquare, or NotHermitian
  /// when the largest entry of the anti-Hermitian part exceeds 1e-6.
  explicit HermitianOperator(const CMat& raw);

  Index dim() const { return mat_.rows(); }
  const CMat& matrix() const { return mat_; }

  double trace() const { return mat_.trace().real(); }

 private:
  struct AlreadyHermitian {};
  HermitianOperator(CMat m, AlreadyHermitian) : mat_(std::move(m)) {}

  CMat mat_;

  friend HermitianOperator herm_unchecked(CMat m);
};

/// Internal fast path for matrices that are Hermitian by construction.
inline HermitianOperator herm_unchecked(CMat m) {
  return HermitianOperator(std::move(m), HermitianOperator::AlreadyHermitian{});
}

/// Eigendecomposition of a Hermitian operator, eigenvalues descending,
/// eigenvectors as the matching columns of a unitary.
struct Spectrum {
  RVec eigenvalues;
  CMat eigenvectors;

  CMat reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
  }
};

Spectrum eig(const CMat& hermitian);
inline Spectrum eig(const HermitianOperator& h) { return eig(h.matrix()); }

/// Validated quantum state: PSD within 1e-9 (clipped), unit trace within
/// repair tolerance (renormalized). Negative eigenvalues in [-1e-6, -1e-9)
/// are clipped with a warning flag; below -1e-6 the input is rejected.
class DensityOperator {
 public:
  explicit DensityOperator(const HermitianOperator& h);

  Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const CMat& matrix() const { return op_.matrix(); }

  /// Set when construction clipped an eigenvalue in [-1e-6, -1e-9).
  bool clip_warning() const { return clip_warning_; }

  /// Fast path for matrices that satisfy the invariants by construction
  /// (exact tensor products, spectral rebuilds). No eigendecomposition.
  static DensityOperator from_validated(CMat m);

 private:
  DensityOperator(HermitianOperator op, bool warn) : op_(std::move(op)), clip_warning_(warn) {}

  HermitianOperator op_;
  bool clip_warning_ = false;
};

/// Symmetrize, clip, renormalize. Rejects non-square input, asymmetry
/// beyond 1e-6, eigenvalues below -1e-6, and |trace - 1| above 1e-6.
DensityOperator make_density(const CMat& raw);

/// T(X, Y) = (1/2) ||X - Y||_1 via the eigenvalues of the difference.
double trace_distance(const HermitianOperator& a, const HermitianOperator& b);
double trace_distance(const DensityOperator& a, const DensityOperator& b);
double trace_distance(const CMat& a, const CMat& b);

/// Kronecker product, row-major index convention (first factor = slow index).
CMat kron(const CMat& a, const CMat& b);

/// n-fold Kronecker power. Guarded to output dimension <= 4096.
DensityOperator tensor_power(const DensityOperator& rho, int n);
CMat tensor_power(const CMat& m, int n);

/// Named scalar functions applied through the spectral decomposition.
struct ScalarFunction {
  enum class Kind { Power, Log, Exp };

  Kind kind = Kind::Exp;
  double alpha = 1.0;             // exponent for Power
  bool support_restricted = false;  // Log only: map eigenvalues <= cutoff to 0

  static ScalarFunction power(double a) { return {Kind::Power, a, false}; }
  static ScalarFunction log(bool restricted = false) { return {Kind::Log, 1.0, restricted}; }
  static ScalarFunction exp() { return {Kind::Exp, 1.0, false}; }
};

/// U f(Lambda) U^dag. Power maps eigenvalues below the support cutoff to 0
/// (fractional powers of genuinely negative eigenvalues are a DomainError);
/// Log outside support-restricted mode rejects numerically zero eigenvalues.
HermitianOperator herm_function(const HermitianOperator& h, const ScalarFunction& f);

}  // namespace uqthermo
