/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/gibbs.hpp"

#include <cmath>

namespace uqthermo {

DensityOperator gibbs_from_hamiltonian(const HermitianOperator& h, double beta,
                                       bool* rescale_warning) {
  if (!(beta > 0.0) || !std::isfinite(beta)) raise(ErrorKind::BadParameter, "beta must be > 0");
  if (!h.matrix().allFinite()) raise(ErrorKind::BadParameter, "Hamiltonian entries must be finite");

  const Spectrum s = eig(h);
  const double e_min = s.eigenvalues.minCoeff();
  const double range = s.eigenvalues.maxCoeff() - e_min;
  if (rescale_warning) *rescale_warning = beta * range > 700.0;

  RVec w(s.eigenvalues.size());
  for (Index i = 0; i < w.size(); ++i) w(i) = std::exp(-beta * (s.eigenvalues(i) - e_min));
  w /= w.sum();
  return DensityOperator::from_validated(s.eigenvectors * w.asDiagonal() *
                                         s.eigenvectors.adjoint());
}

DensityOperator battery_gibbs(double m) {
  if (!(m > 1.0) || !std::isfinite(m)) {
    raise(ErrorKind::BadParameter, "battery capacity must satisfy m > 1");
  }
  CMat g = CMat::Zero(2, 2);
  g(0, 0) = 1.0 - 1.0 / m;
  g(1, 1) = 1.0 / m;
  return DensityOperator::from_validated(std::move(g));
}

HermitianOperator battery_hamiltonian(double m, double beta) {
  if (!(m > 1.0)) raise(ErrorKind::BadParameter, "battery capacity must satisfy m > 1");
  if (!(beta > 0.0)) raise(ErrorKind::BadParameter, "beta must be > 0");
  CMat h = CMat::Zero(2, 2);
  h(1, 1) = std::log(m - 1.0) / beta;
  return HermitianOperator(h);
}

DensityOperator qubit_field_gibbs(const std::array<double, 3>& h, double beta) {
  if (!(beta > 0.0)) raise(ErrorKind::BadParameter, "beta must be > 0");
  const double norm = std::sqrt(h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
  CMat rho = 0.5 * CMat::Identity(2, 2);
  if (norm > 0.0) {
    const double r = std::tanh(beta * norm) / norm;
    const double rx = r * h[0], ry = r * h[1], rz = r * h[2];
    rho(0, 0) += 0.5 * rz;
    rho(1, 1) -= 0.5 * rz;
    rho(0, 1) += 0.5 * Complex(rx, -ry);
    rho(1, 0) += 0.5 * Complex(rx, ry);
  }
  return DensityOperator::from_validated(std::move(rho));
}

}  // namespace uqthermo
