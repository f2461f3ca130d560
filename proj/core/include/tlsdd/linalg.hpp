#pragma once

#include <span>

#include <Eigen/Core>

#include "tlsdd/model.hpp"

namespace tlsdd {

using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;

/// exp(−i 2π H t) for Hermitian H (GHz) and t (ns).
///
/// Matrices that only couple the pairs {|0g>,|1e>} and {|1g>,|0e>} (every
/// Hamiltonian the model builds) use closed-form 2×2 exponentials; anything
/// else goes through a Hermitian eigendecomposition.
Matrix4c expm_hermitian(const Matrix4c& h, double t);

/// True when H only couples |0g>↔|1e> and |1g>↔|0e>.
bool is_pair_structured(const Matrix4c& h);

/// General matrix exponential exp(M).
Matrix16c expm(const Matrix16c& m);

/// Pairwise (cascade) summation; the result does not depend on thread count.
double pairwise_sum(std::span<const double> values);

}  // namespace tlsdd
