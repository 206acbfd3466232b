/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/operators.hpp"

#include <cmath>

namespace uqthermo {

HermitianOperator::HermitianOperator(const CMat& raw) {
  if (raw.rows() != raw.cols()) {
    raise(ErrorKind::NotSquare,
          "matrix is " + std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  }
  if (raw.rows() < 1) raise(ErrorKind::NotSquare, "empty matrix");
  const CMat anti = 0.5 * (raw - raw.adjoint());
  const double asym = anti.cwiseAbs().maxCoeff();
  if (asym > tol::herm_reject) {
    raise(ErrorKind::NotHermitian, "asymmetry " + std::to_string(asym) + " exceeds 1e-6");
  }
  mat_ = 0.5 * (raw + raw.adjoint());
}

Spectrum eig(const CMat& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian);
  const Index d = hermitian.rows();
  Spectrum s;
  s.eigenvalues.resize(d);
  s.eigenvectors.resize(d, d);
  // Eigen returns ascending order; flip to descending.
  for (Index i = 0; i < d; ++i) {
    s.eigenvalues(i) = es.eigenvalues()(d - 1 - i);
    s.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return s;
}

DensityOperator::DensityOperator(const HermitianOperator& h) : op_(h) {
  Spectrum s = eig(h);
  const double lambda_min = s.eigenvalues.minCoeff();
  if (lambda_min < -tol::psd_reject) {
    raise(ErrorKind::NotPSD, "eigenvalue " + std::to_string(lambda_min) + " below -1e-6");
  }
  const double tr = h.trace();
  if (std::abs(tr - 1.0) > tol::trace_reject) {
    raise(ErrorKind::TraceMismatch, "trace " + std::to_string(tr) + " not 1 within 1e-6");
  }
  clip_warning_ = lambda_min < -tol::psd_clip;
  RVec clipped = s.eigenvalues.cwiseMax(0.0);
  clipped /= clipped.sum();
  op_ = herm_unchecked(s.eigenvectors * clipped.asDiagonal() * s.eigenvectors.adjoint());
}

DensityOperator DensityOperator::from_validated(CMat m) {
  return DensityOperator(herm_unchecked(std::move(m)), false);
}

DensityOperator make_density(const CMat& raw) {
  return DensityOperator(HermitianOperator(raw));
}

double trace_distance(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    raise(ErrorKind::DimMismatch, "trace_distance on unequal dimensions");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  return trace_distance(a.matrix(), b.matrix());
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  return trace_distance(a.matrix(), b.matrix());
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat tensor_power(const CMat& m, int n) {
  if (n < 1) raise(ErrorKind::BadParameter, "tensor power requires n >= 1");
  double out_dim = 1.0;
  for (int i = 0; i < n; ++i) {
    out_dim *= static_cast<double>(m.rows());
    if (out_dim > 4096.0) {
      raise(ErrorKind::DimTooLarge, "tensor power output dimension exceeds 4096");
    }
  }
  CMat out = m;
  for (int i = 1; i < n; ++i) out = kron(out, m);
  return out;
}

DensityOperator tensor_power(const DensityOperator& rho, int n) {
  // Trace 1 and PSD are preserved exactly by the Kronecker construction.
  return DensityOperator::from_validated(tensor_power(rho.matrix(), n));
}

HermitianOperator herm_function(const HermitianOperator& h, const ScalarFunction& f) {
  Spectrum s = eig(h);
  RVec mapped(s.eigenvalues.size());
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double lam = s.eigenvalues(i);
    switch (f.kind) {
      case ScalarFunction::Kind::Power: {
        const bool integral = std::abs(f.alpha - std::round(f.alpha)) < 1e-14;
        if (lam <= tol::support) {
          if (lam < -tol::support && !integral) {
            raise(ErrorKind::DomainError,
                  "fractional power of negative eigenvalue " + std::to_string(lam));
          }
          mapped(i) = integral && lam < 0 ? std::pow(lam, f.alpha) : 0.0;
        } else {
          mapped(i) = std::pow(lam, f.alpha);
        }
        break;
      }
      case ScalarFunction::Kind::Log:
        if (lam <= tol::support) {
          if (!f.support_restricted) {
            raise(ErrorKind::DomainError,
                  "log of numerically zero eigenvalue " + std::to_string(lam));
          }
          mapped(i) = 0.0;
        } else {
          mapped(i) = std::log(lam);
        }
        break;
      case ScalarFunction::Kind::Exp:
        mapped(i) = std::exp(lam);
        break;
    }
  }
  return herm_unchecked(s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.adjoint());
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::TraceMismatch: return "TraceMismatch";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DimTooLarge: return "DimTooLarge";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "UnknownError";
}

}  // namespace uqthermo
