/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "uqthermo/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace uqthermo {

namespace {

std::vector<CMat> build_basis(Index d) {
  std::vector<CMat> basis;
  basis.reserve(static_cast<size_t>(d * d));

  basis.push_back(CMat::Identity(d, d) / std::sqrt(static_cast<double>(d)));

  // Diagonal elements: diag(1,...,1,-k,0,...)/sqrt(k(k+1)) with k leading ones.
  for (Index k = 1; k < d; ++k) {
    CMat g = CMat::Zero(d, d);
    for (Index i = 0; i < k; ++i) g(i, i) = 1.0;
    g(k, k) = -static_cast<double>(k);
    basis.push_back(g / std::sqrt(static_cast<double>(k * (k + 1))));
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      CMat sym = CMat::Zero(d, d);
      sym(i, j) = inv_sqrt2;
      sym(j, i) = inv_sqrt2;
      basis.push_back(sym);

      CMat anti = CMat::Zero(d, d);
      anti(i, j) = Complex(0.0, -inv_sqrt2);
      anti(j, i) = Complex(0.0, inv_sqrt2);
      basis.push_back(anti);
    }
  }
  return basis;
}

}  // namespace

const std::vector<CMat>& hermitian_basis(Index d) {
  static std::mutex mutex;
  static std::map<Index, std::vector<CMat>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, build_basis(d)).first;
  return it->second;
}

RVec herm_coords(const CMat& x) {
  const Index d = x.rows();
  const auto& basis = hermitian_basis(d);
  RVec coords(static_cast<Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) {
    coords(static_cast<Index>(k)) = hs_inner(basis[k], x);
  }
  return coords;
}

CMat from_herm_coords(const RVec& coords, Index d) {
  const auto& basis = hermitian_basis(d);
  CMat x = CMat::Zero(d, d);
  for (size_t k = 0; k < basis.size(); ++k) {
    x += coords(static_cast<Index>(k)) * basis[k];
  }
  return x;
}

}  // namespace uqthermo
