#pragma once

#include "qsrc/types.hpp"

#include <optional>
#include <span>

namespace qsrc {

// ---------------------------------------------------------------------------
// Spectral helpers
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct EigenSystem {
  Eigen::VectorXd values;
  Matrix vectors;  // column i pairs with values[i]
};

EigenSystem eigh(const Matrix& hermitian);

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// [-kPsdTol, 0) are clipped; more negative values throw.
Matrix sqrtm_psd(const Matrix& hermitian);

// ---------------------------------------------------------------------------
// Metrics and entropy
// ---------------------------------------------------------------------------

/// Uhlmann fidelity F(rho, omega) = (tr sqrt(sqrt(omega) rho sqrt(omega)))^2.
double fidelity(const DensityOperator& rho, const DensityOperator& omega);

/// Pure-state shortcut <psi|rho|psi>.
double fidelity(const StateVector& psi, const DensityOperator& rho);
double fidelity(const StateVector& psi, const StateVector& phi);

/// Sum of absolute eigenvalues of a Hermitian operator.
double trace_norm(const HermitianOperator& delta);
double trace_norm(const Matrix& hermitian);

/// (1/2) ||rho - omega||_1.
double trace_distance(const DensityOperator& rho, const DensityOperator& omega);

/// -tr rho log2 rho, with 0 log 0 := 0. Result in bits.
double von_neumann_entropy(const DensityOperator& rho);

/// Entropy of a classical distribution in bits; zero entries are skipped.
double shannon_entropy(std::span<const double> probs);

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

StateVector tensor(const StateVector& a, const StateVector& b);
Matrix tensor(const Matrix& a, const Matrix& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Partial trace keeping the listed factors, in their original order.
MultipartiteState partial_trace(const MultipartiteState& m,
                                std::span<const Eigen::Index> keep);

/// Reduced density operator of the listed factors.
DensityOperator reduced_state(const MultipartiteState& m,
                              std::span<const Eigen::Index> keep);

/// Purification on dim^2: sum_i sqrt(l_i) |e_i>|i>, system first.
StateVector purify(const DensityOperator& rho);

// ---------------------------------------------------------------------------
// Multipartite entropies (bits); index sets must be disjoint.
// ---------------------------------------------------------------------------

double subsystem_entropy(const MultipartiteState& m, std::span<const Eigen::Index> part);

/// S(A|B) = S(A,B) - S(B).
double conditional_entropy(const MultipartiteState& m,
                           std::span<const Eigen::Index> a,
                           std::span<const Eigen::Index> b);

/// S(A:B) = S(A) + S(B) - S(A,B).
double mutual_entropy(const MultipartiteState& m,
                      std::span<const Eigen::Index> a,
                      std::span<const Eigen::Index> b);

/// S(A:B|C) = S(A|C) + S(B|C) - S(A,B|C).
double conditional_mutual(const MultipartiteState& m,
                          std::span<const Eigen::Index> a,
                          std::span<const Eigen::Index> b,
                          std::span<const Eigen::Index> c);

}  // namespace qsrc
