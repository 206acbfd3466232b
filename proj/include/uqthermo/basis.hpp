/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <vector>

#include "uqthermo/types.hpp"

namespace uqthermo {

/// Hilbert-Schmidt inner product, real on Hermitian pairs.
inline double hs_inner(const CMat& a, const CMat& b) {
  return (a.adjoint() * b).trace().real();
}

/// Orthonormal Hermitian basis of d x d operators under the Hilbert-Schmidt
/// inner product: I/sqrt(d) first, then the diagonal generalized Gell-Mann
/// elements, then the symmetric and antisymmetric off-diagonal pairs. The
/// ordering is fixed, so coordinates are reproducible.
const std::vector<CMat>& hermitian_basis(Index d);

/// Real coordinates x_k = <G_k, X> of a Hermitian X in hermitian_basis(d).
RVec herm_coords(const CMat& x);

/// Inverse of herm_coords.
CMat from_herm_coords(const RVec& coords, Index d);

}  // namespace uqthermo
