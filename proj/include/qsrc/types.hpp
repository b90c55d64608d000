#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qsrc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Construction tolerances for the core value types.
inline constexpr double kNormTol = 1e-10;
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

/// Unit vector in a finite-dimensional Hilbert space.
class StateVector {
public:
  explicit StateVector(Vector amplitudes);

  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }

  /// Computational basis state |i> in dimension d.
  static StateVector basis(Eigen::Index d, Eigen::Index i);

private:
  Vector amps_;
};

/// Dense Hermitian operator. The stored matrix is symmetrized on input.
class HermitianOperator {
public:
  explicit HermitianOperator(const Matrix& m);

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

private:
  Matrix mat_;
};

/// Unit-trace positive semidefinite Hermitian operator.
///
/// Eigenvalues in [-kPsdTol, 0) are treated as rounding and clipped to zero
/// wherever spectra are consumed; anything more negative is rejected here.
class DensityOperator {
public:
  explicit DensityOperator(const Matrix& m);

  static DensityOperator pure(const StateVector& psi);
  static DensityOperator maximally_mixed(Eigen::Index d);

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

  /// Eigenvalues clipped to [0, 1], ascending.
  Eigen::VectorXd spectrum() const;

private:
  Matrix mat_;
};

/// Density operator together with a tensor-factor structure.
/// Factor 0 is the leftmost (most significant) tensor slot.
class MultipartiteState {
public:
  MultipartiteState(DensityOperator op, std::vector<Eigen::Index> dims);

  const DensityOperator& state() const { return op_; }
  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index factors() const { return static_cast<Eigen::Index>(dims_.size()); }

private:
  DensityOperator op_;
  std::vector<Eigen::Index> dims_;
};

}  // namespace qsrc
