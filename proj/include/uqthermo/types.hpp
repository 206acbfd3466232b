/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace uqthermo {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance profile shared across the library. Values are absolute.
namespace tol {
inline constexpr double herm = 1e-10;          // symmetrization tolerance
inline constexpr double herm_reject = 1e-6;    // asymmetry beyond repair
inline constexpr double psd_clip = 1e-9;       // silent eigenvalue clip
inline constexpr double psd_reject = 1e-6;     // eigenvalue below -> reject
inline constexpr double trace_reject = 1e-6;   // |tr-1| beyond repair
inline constexpr double support = 1e-12;       // spectral support cutoff
inline constexpr double support_umegaki = 1e-10;
inline constexpr double rank_cut = 1e-9;       // relative SVD rank cutoff
inline constexpr double gap = 1e-7;            // certified duality gap
inline constexpr double feas = 1e-8;           // certified feasibility residual
inline constexpr double infeas_margin = 1e-9;  // dual improving-ray margin
inline constexpr double positive_optimum = 1e-12;  // below this, value -> +inf
}  // namespace tol

}  // namespace uqthermo
