/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <random>

#include "uqthermo/operators.hpp"

namespace uqthermo::testsupport {

inline CMat diag2(double a, double b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline CMat diagn(const std::vector<double>& d) {
  CMat m = CMat::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return m;
}

/// |k><k| in dimension d.
inline CMat ket_projector(Index k, Index d) {
  CMat m = CMat::Zero(d, d);
  m(k, k) = 1.0;
  return m;
}

inline CMat random_hermitian(std::mt19937& rng, Index d, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  CMat a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  return 0.5 * (a + a.adjoint());
}

/// Full-rank random state via G G^dag normalization.
inline DensityOperator random_state(std::mt19937& rng, Index d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  CMat rho = g * g.adjoint() + 1e-6 * CMat::Identity(d, d);
  rho /= rho.trace();
  return make_density(rho);
}

/// Random diagonal state with entries bounded away from zero.
inline DensityOperator random_diagonal_state(std::mt19937& rng, Index d, double floor_p = 0.02) {
  std::uniform_real_distribution<double> unif(floor_p, 1.0);
  RVec v(d);
  for (Index i = 0; i < d; ++i) v(i) = unif(rng);
  v /= v.sum();
  CMat m = CMat::Zero(d, d);
  for (Index i = 0; i < d; ++i) m(i, i) = v(i);
  return make_density(m);
}

}  // namespace uqthermo::testsupport
