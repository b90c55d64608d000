#include "qsrc/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace qsrc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

StateVector::StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
  require(amps_.size() > 0, "StateVector: empty amplitude vector");
  const double norm = amps_.norm();
  require(std::abs(norm - 1.0) <= kNormTol,
          "StateVector: norm " + std::to_string(norm) + " is not 1");
}

StateVector StateVector::basis(Eigen::Index d, Eigen::Index i) {
  require(d > 0 && i >= 0 && i < d, "StateVector::basis: index out of range");
  Vector v = Vector::Zero(d);
  v[i] = 1.0;
  return StateVector(std::move(v));
}

HermitianOperator::HermitianOperator(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() > 0,
          "HermitianOperator: matrix must be square and non-empty");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  require(asym <= kHermTol,
          "HermitianOperator: not Hermitian, max asymmetry " + std::to_string(asym));
  mat_ = 0.5 * (m + m.adjoint().eval());
}

DensityOperator::DensityOperator(const Matrix& m) {
  HermitianOperator h(m);  // checks shape and hermiticity, symmetrizes
  mat_ = h.matrix();
  const double tr = mat_.trace().real();
  require(std::abs(tr - 1.0) <= kTraceTol,
          "DensityOperator: trace " + std::to_string(tr) + " is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  require(min_eig >= -kPsdTol,
          "DensityOperator: negative eigenvalue " + std::to_string(min_eig));
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index d) {
  require(d > 0, "maximally_mixed: dimension must be positive");
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
}

Eigen::VectorXd DensityOperator::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
}

MultipartiteState::MultipartiteState(DensityOperator op, std::vector<Eigen::Index> dims)
    : op_(std::move(op)), dims_(std::move(dims)) {
  require(!dims_.empty(), "MultipartiteState: empty factor list");
  Eigen::Index prod = 1;
  for (Eigen::Index d : dims_) {
    require(d > 0, "MultipartiteState: factor dimensions must be positive");
    prod *= d;
  }
  require(prod == op_.dim(), "MultipartiteState: factor dimensions do not multiply to dim");
}

}  // namespace qsrc
