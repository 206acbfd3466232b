/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <array>

#include "uqthermo/operators.hpp"

namespace uqthermo {

/// exp(-beta H) / tr exp(-beta H) via the spectral decomposition. The
/// spectrum is shifted internally so the exponential never overflows; when
/// beta * (spectral range) exceeds 700 the optional flag reports that deep
/// underflow truncated the high-energy weights.
DensityOperator gibbs_from_hamiltonian(const HermitianOperator& h, double beta,
                                       bool* rescale_warning = nullptr);

/// Two-level battery Gibbs state diag(1 - 1/m, 1/m), m > 1.
DensityOperator battery_gibbs(double m);

/// Battery Hamiltonian diag(0, ln(m-1)/beta) whose Gibbs state is battery_gibbs(m).
HermitianOperator battery_hamiltonian(double m, double beta);

/// Qubit in an external field: Gibbs state with Bloch vector
/// tanh(beta |h|) h/|h|; the zero-field limit is I/2.
DensityOperator qubit_field_gibbs(const std::array<double, 3>& h, double beta);

}  // namespace uqthermo
