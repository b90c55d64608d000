#include <doctest.h>

#include "qsrc/qcore.hpp"
#include "qsrc/random.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>

using namespace qsrc;

namespace {

// Independent fidelity oracle: maximal squared overlap over joint
// purifications, i.e. the squared nuclear norm of sqrt(rho) sqrt(omega).
double fidelity_purification_oracle(const DensityOperator& rho,
                                    const DensityOperator& omega) {
  const Matrix prod = sqrtm_psd(rho.matrix()) * sqrtm_psd(omega.matrix());
  Eigen::JacobiSVD<Matrix> svd(prod);
  const double nuc = svd.singularValues().sum();
  return nuc * nuc;
}

StateVector ket(std::initializer_list<Complex> amps) {
  Vector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (const Complex& a : amps) v[i++] = a;
  v.normalize();
  return StateVector(std::move(v));
}

const StateVector kZero = ket({1.0, 0.0});
const StateVector kOne = ket({0.0, 1.0});
const StateVector kPlus = ket({1.0, 1.0});

MultipartiteState bell_pair() {
  Vector v(4);
  v << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  return {DensityOperator::pure(StateVector(v)), {2, 2}};
}

}  // namespace

TEST_CASE("state and density construction enforce invariants") {
  Vector bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(StateVector{bad}, std::invalid_argument);

  Matrix not_herm(2, 2);
  not_herm << 1.0, Complex(0.0, 0.5), Complex(0.0, 0.5), 0.0;
  CHECK_THROWS_AS(HermitianOperator{not_herm}, std::invalid_argument);

  Matrix bad_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator{bad_trace}, std::invalid_argument);

  Matrix neg(2, 2);
  neg << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityOperator{neg}, std::invalid_argument);

  // Rounding-level negativity is absorbed.
  Matrix nearly(2, 2);
  nearly << 1.0 + 5e-11, 0.0, 0.0, -5e-11;
  CHECK_NOTHROW(DensityOperator{nearly});
}

TEST_CASE("fidelity identity and textbook overlap") {
  Rng rng = make_rng(11);
  const DensityOperator rho = random_density(rng, 3);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));

  const DensityOperator z = DensityOperator::pure(kZero);
  const DensityOperator p = DensityOperator::pure(kPlus);
  CHECK(fidelity(z, p) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fidelity(kZero, p) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fidelity matches the purification-maximization oracle") {
  Rng rng = make_rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const DensityOperator rho = random_density(rng, d);
    const DensityOperator omega = random_density(rng, d);
    const double f = fidelity(rho, omega);
    const double oracle = fidelity_purification_oracle(rho, omega);
    CHECK(f == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(fidelity(omega, rho) == doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("fidelity is invariant under joint unitary conjugation") {
  Rng rng = make_rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const DensityOperator rho = random_density(rng, d);
    const DensityOperator omega = random_density(rng, d);
    const Matrix u = random_unitary(rng, d);
    const DensityOperator rho_u(u * rho.matrix() * u.adjoint());
    const DensityOperator omega_u(u * omega.matrix() * u.adjoint());
    CHECK(fidelity(rho_u, omega_u) == doctest::Approx(fidelity(rho, omega)).epsilon(1e-9));
  }
}

TEST_CASE("fidelity rejects bad inputs") {
  Rng rng = make_rng(3);
  const DensityOperator a = random_density(rng, 2);
  const DensityOperator b = random_density(rng, 3);
  CHECK_THROWS_AS(fidelity(a, b), std::invalid_argument);
}

TEST_CASE("trace norm basics") {
  CHECK(trace_norm(Matrix(Matrix::Zero(3, 3))) == doctest::Approx(0.0));
  Matrix delta = Matrix::Zero(2, 2);
  delta(0, 0) = 1.0;
  delta(1, 1) = -1.0;
  CHECK(trace_norm(delta) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("trace norm vs fidelity relation on random pairs") {
  Rng rng = make_rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const DensityOperator rho = random_density(rng, d);
    const DensityOperator omega = random_density(rng, d);
    const double tn = trace_norm(Matrix(rho.matrix() - omega.matrix()));
    const double bound = 2.0 * std::sqrt(std::max(0.0, 1.0 - fidelity(rho, omega)));
    CHECK(tn <= bound + 1e-9);
  }
}

TEST_CASE("von Neumann entropy on pinned spectra") {
  CHECK(von_neumann_entropy(DensityOperator::pure(kPlus)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(DensityOperator::maximally_mixed(2)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.853553;
  diag(1, 1) = 0.146447;
  // Direct -sum lambda log2 lambda evaluation of the same spectrum.
  const double expected = -(0.853553 * std::log2(0.853553) + 0.146447 * std::log2(0.146447));
  CHECK(expected == doctest::Approx(0.600876).epsilon(2e-5));
  CHECK(von_neumann_entropy(DensityOperator(diag)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("entropy is additive over tensor products") {
  Rng rng = make_rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator a = random_density(rng, 2 + trial % 2);
    const DensityOperator b = random_density(rng, 2 + (trial / 2) % 3);
    CHECK(von_neumann_entropy(tensor(a, b)) ==
          doctest::Approx(von_neumann_entropy(a) + von_neumann_entropy(b)).epsilon(1e-9));
  }
}

TEST_CASE("eigendecomposition reconstructs the input") {
  Rng rng = make_rng(64);
  for (Eigen::Index d : {2, 3, 8, 17, 64}) {
    const DensityOperator rho = random_density(rng, d);
    EigenSystem es = eigh(rho.matrix());
    const Matrix rebuilt = es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
    CHECK((rebuilt - rho.matrix()).norm() <= 1e-10);
  }
}

TEST_CASE("tensor and partial trace round trips") {
  Rng rng = make_rng(7);
  const DensityOperator a = random_density(rng, 2);
  const DensityOperator b = random_density(rng, 3);
  MultipartiteState ab{tensor(a, b), {2, 3}};

  const std::array<Eigen::Index, 1> keep_a{0}, keep_b{1};
  CHECK((reduced_state(ab, keep_a).matrix() - a.matrix()).norm() <= 1e-10);
  CHECK((reduced_state(ab, keep_b).matrix() - b.matrix()).norm() <= 1e-10);

  // Partial trace preserves trace.
  CHECK(reduced_state(ab, keep_a).matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  const MultipartiteState bell = bell_pair();
  const std::array<Eigen::Index, 1> keep{0};
  CHECK((reduced_state(bell, keep).matrix() - Matrix::Identity(2, 2) / 2.0).norm() <= 1e-10);
}

TEST_CASE("purification round trip") {
  Rng rng = make_rng(9);
  for (Eigen::Index d : {2, 3, 5}) {
    const DensityOperator rho = random_density(rng, d);
    const StateVector psi = purify(rho);
    MultipartiteState joint{DensityOperator::pure(psi), {d, d}};
    const std::array<Eigen::Index, 1> keep{0};
    CHECK((reduced_state(joint, keep).matrix() - rho.matrix()).norm() <= 1e-10);
  }
}

TEST_CASE("multipartite entropies on product and Bell states") {
  Rng rng = make_rng(33);
  const DensityOperator a = random_density(rng, 2);
  const DensityOperator b = random_density(rng, 3);
  MultipartiteState prod{tensor(a, b), {2, 3}};
  const std::array<Eigen::Index, 1> A{0}, B{1};
  CHECK(mutual_entropy(prod, A, B) == doctest::Approx(0.0).epsilon(1e-10));

  const MultipartiteState bell = bell_pair();
  CHECK(mutual_entropy(bell, A, B) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(conditional_entropy(bell, A, B) == doctest::Approx(-1.0).epsilon(1e-10));

  CHECK_THROWS_AS(mutual_entropy(bell, A, A), std::invalid_argument);
}

TEST_CASE("mutual information chain rule on random tripartite states") {
  Rng rng = make_rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 2 + trial % 2;
    MultipartiteState m{random_density(rng, d * d * d), {d, d, d}};
    const std::array<Eigen::Index, 1> A1{0}, A2{1}, B{2};
    const std::array<Eigen::Index, 2> A12{0, 1};
    // S(A1,A2 : B) against the chain rule sum, each side from its own
    // subsystem entropies.
    const double joint = mutual_entropy(m, A12, B);
    const double chained = mutual_entropy(m, A1, B) + conditional_mutual(m, A2, B, A1);
    CHECK(joint == doctest::Approx(chained).epsilon(1e-9));
    // Nonnegativity: subadditivity and strong subadditivity.
    CHECK(mutual_entropy(m, A1, B) >= -1e-9);
    CHECK(conditional_mutual(m, A2, B, A1) >= -1e-9);
  }
}

TEST_CASE("discarding a subsystem cannot raise mutual information") {
  Rng rng = make_rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    MultipartiteState m{random_density(rng, 16), {2, 2, 2, 2}};
    const std::array<Eigen::Index, 1> Ak{0};
    const std::array<Eigen::Index, 2> partial{1, 3};   // A_{!=k} with the tail traced out
    const std::array<Eigen::Index, 3> full{1, 2, 3};
    CHECK(mutual_entropy(m, Ak, partial) <= mutual_entropy(m, Ak, full) + 1e-9);
  }
}

TEST_CASE("shannon entropy handles zeros") {
  const std::array<double, 3> dist{0.5, 0.5, 0.0};
  CHECK(shannon_entropy(dist) == doctest::Approx(1.0).epsilon(1e-12));
}
