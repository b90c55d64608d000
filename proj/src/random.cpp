#include "qsrc/random.hpp"

#include "qsrc/channels.hpp"
#include "qsrc/ensembles.hpp"

#include <Eigen/QR>

#include <cmath>

namespace qsrc {

Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 over (seed, stream); decorrelates chunk streams cheaply.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

namespace {

Matrix ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

}  // namespace

StateVector random_state(Rng& rng, Eigen::Index d) {
  Vector v = ginibre(rng, d, 1).col(0);
  v.normalize();
  return StateVector(std::move(v));
}

DensityOperator random_density(Rng& rng, Eigen::Index d, Eigen::Index rank) {
  if (rank <= 0 || rank > d) rank = d;
  const Matrix g = ginibre(rng, d, rank);
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  return DensityOperator(w);
}

Matrix random_unitary(Rng& rng, Eigen::Index d) {
  return random_isometry(rng, d, d);
}

Matrix random_isometry(Rng& rng, Eigen::Index rows, Eigen::Index d) {
  if (rows < d) throw std::invalid_argument("random_isometry: rows < cols");
  const Matrix g = ginibre(rng, rows, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, d);
  const Matrix r = qr.matrixQR().topLeftCorner(d, d).template triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

std::vector<double> random_distribution(Rng& rng, int n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(static_cast<size_t>(n));
  double total = 0.0;
  for (auto& x : p) {
    x = expo(rng);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

KrausChannel random_channel(Rng& rng, Eigen::Index in_dim, Eigen::Index out_dim,
                            Eigen::Index kraus_count) {
  const Matrix v = random_isometry(rng, out_dim * kraus_count, in_dim);
  std::vector<Matrix> ops;
  ops.reserve(static_cast<size_t>(kraus_count));
  // Stinespring slices: K_m = (I_out x <m|_env) V with env the second factor.
  for (Eigen::Index m = 0; m < kraus_count; ++m) {
    Matrix k(out_dim, in_dim);
    for (Eigen::Index o = 0; o < out_dim; ++o) k.row(o) = v.row(o * kraus_count + m);
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

Ensemble random_ensemble(Rng& rng, Eigen::Index dim, int num_states) {
  std::vector<StateVector> states;
  states.reserve(static_cast<size_t>(num_states));
  for (int i = 0; i < num_states; ++i) states.push_back(random_state(rng, dim));
  return Ensemble(std::move(states), random_distribution(rng, num_states));
}

MixedEnsemble random_mixed_ensemble(Rng& rng, Eigen::Index dim, int num_states) {
  std::vector<DensityOperator> states;
  states.reserve(static_cast<size_t>(num_states));
  for (int i = 0; i < num_states; ++i) states.push_back(random_density(rng, dim));
  return MixedEnsemble(std::move(states), random_distribution(rng, num_states));
}

}  // namespace qsrc
