#include "qsrc/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qsrc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Clips rounding-level negatives, rejects anything worse.
Eigen::VectorXd clipped_psd_spectrum(const Eigen::VectorXd& vals, const char* who) {
  const double min_eig = vals.minCoeff();
  if (min_eig < -kPsdTol) {
    throw std::invalid_argument(std::string(who) + ": operator is not PSD, eigenvalue " +
                                std::to_string(min_eig));
  }
  return vals.cwiseMax(0.0);
}

// Strides of a mixed-radix index, factor 0 most significant.
std::vector<Eigen::Index> strides_of(const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::Index> s(dims.size());
  Eigen::Index acc = 1;
  for (size_t i = dims.size(); i-- > 0;) {
    s[i] = acc;
    acc *= dims[i];
  }
  return s;
}

void check_part(const MultipartiteState& m, std::span<const Eigen::Index> part,
                const char* who) {
  std::vector<bool> seen(m.dims().size(), false);
  for (Eigen::Index f : part) {
    require(f >= 0 && f < m.factors(), std::string(who) + ": factor index out of range");
    require(!seen[static_cast<size_t>(f)], std::string(who) + ": repeated factor index");
    seen[static_cast<size_t>(f)] = true;
  }
}

std::vector<Eigen::Index> set_union_sorted(std::span<const Eigen::Index> a,
                                           std::span<const Eigen::Index> b) {
  std::vector<Eigen::Index> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

void check_disjoint(std::span<const Eigen::Index> a, std::span<const Eigen::Index> b,
                    const char* who) {
  for (Eigen::Index x : a)
    for (Eigen::Index y : b)
      require(x != y, std::string(who) + ": index sets overlap");
}

}  // namespace

EigenSystem eigh(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigh: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix sqrtm_psd(const Matrix& hermitian) {
  EigenSystem es = eigh(hermitian);
  Eigen::VectorXd vals = clipped_psd_spectrum(es.values, "sqrtm_psd");
  return es.vectors * vals.cwiseSqrt().asDiagonal() * es.vectors.adjoint();
}

double fidelity(const DensityOperator& rho, const DensityOperator& omega) {
  require(rho.dim() == omega.dim(), "fidelity: dimension mismatch");
  const Matrix sw = sqrtm_psd(omega.matrix());
  const Matrix inner = sw * rho.matrix() * sw;
  EigenSystem es = eigh(0.5 * (inner + inner.adjoint().eval()));
  Eigen::VectorXd vals = es.values.cwiseMax(0.0);
  const double tr_sqrt = vals.cwiseSqrt().sum();
  return std::clamp(tr_sqrt * tr_sqrt, 0.0, 1.0);
}

double fidelity(const StateVector& psi, const DensityOperator& rho) {
  require(psi.dim() == rho.dim(), "fidelity: dimension mismatch");
  const Complex v = psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes();
  return std::clamp(v.real(), 0.0, 1.0);
}

double fidelity(const StateVector& psi, const StateVector& phi) {
  require(psi.dim() == phi.dim(), "fidelity: dimension mismatch");
  return std::norm(psi.amplitudes().dot(phi.amplitudes()));
}

double trace_norm(const HermitianOperator& delta) { return trace_norm(delta.matrix()); }

double trace_norm(const Matrix& hermitian) {
  HermitianOperator h(hermitian);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityOperator& rho, const DensityOperator& omega) {
  require(rho.dim() == omega.dim(), "trace_distance: dimension mismatch");
  return 0.5 * trace_norm(Matrix(rho.matrix() - omega.matrix()));
}

double von_neumann_entropy(const DensityOperator& rho) {
  const Eigen::VectorXd vals = rho.spectrum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) s -= xlog2x(vals[i]);
  return std::max(s, 0.0);
}

double shannon_entropy(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs) {
    require(p >= -1e-12, "shannon_entropy: negative probability");
    s -= xlog2x(std::max(p, 0.0));
  }
  return std::max(s, 0.0);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Vector out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    out.segment(i * b.dim(), b.dim()) = a.amplitudes()[i] * b.amplitudes();
  return StateVector(std::move(out));
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(tensor(a.matrix(), b.matrix()));
}

MultipartiteState partial_trace(const MultipartiteState& m,
                                std::span<const Eigen::Index> keep) {
  check_part(m, keep, "partial_trace");
  require(!keep.empty(), "partial_trace: must keep at least one factor");
  std::vector<Eigen::Index> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());  // original factor order

  const auto& dims = m.dims();
  std::vector<Eigen::Index> traced;
  for (Eigen::Index f = 0; f < m.factors(); ++f)
    if (!std::binary_search(kept.begin(), kept.end(), f)) traced.push_back(f);

  const auto strides = strides_of(dims);
  Eigen::Index keep_dim = 1, trace_dim = 1;
  for (Eigen::Index f : kept) keep_dim *= dims[static_cast<size_t>(f)];
  for (Eigen::Index f : traced) trace_dim *= dims[static_cast<size_t>(f)];

  // Flat offset of a sub-multi-index within the designated factors.
  auto offset = [&](const std::vector<Eigen::Index>& factors, Eigen::Index flat) {
    Eigen::Index off = 0;
    for (size_t i = factors.size(); i-- > 0;) {
      const Eigen::Index d = dims[static_cast<size_t>(factors[i])];
      off += (flat % d) * strides[static_cast<size_t>(factors[i])];
      flat /= d;
    }
    return off;
  };

  const Matrix& full = m.state().matrix();
  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (Eigen::Index r = 0; r < keep_dim; ++r) {
    const Eigen::Index ro = offset(kept, r);
    for (Eigen::Index c = 0; c < keep_dim; ++c) {
      const Eigen::Index co = offset(kept, c);
      Complex sum = 0.0;
      for (Eigen::Index t = 0; t < trace_dim; ++t) {
        const Eigen::Index to = offset(traced, t);
        sum += full(ro + to, co + to);
      }
      out(r, c) = sum;
    }
  }

  std::vector<Eigen::Index> out_dims;
  for (Eigen::Index f : kept) out_dims.push_back(dims[static_cast<size_t>(f)]);
  return MultipartiteState(DensityOperator(out), std::move(out_dims));
}

DensityOperator reduced_state(const MultipartiteState& m,
                              std::span<const Eigen::Index> keep) {
  return partial_trace(m, keep).state();
}

StateVector purify(const DensityOperator& rho) {
  EigenSystem es = eigh(rho.matrix());
  const Eigen::Index d = rho.dim();
  const Eigen::VectorXd vals = es.values.cwiseMax(0.0);
  Vector out = Vector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double amp = std::sqrt(vals[i]);
    if (amp == 0.0) continue;
    for (Eigen::Index r = 0; r < d; ++r) out[r * d + i] += amp * es.vectors(r, i);
  }
  out.normalize();  // absorbs trace rounding of order kTraceTol
  return StateVector(std::move(out));
}

double subsystem_entropy(const MultipartiteState& m, std::span<const Eigen::Index> part) {
  check_part(m, part, "subsystem_entropy");
  return von_neumann_entropy(reduced_state(m, part));
}

double conditional_entropy(const MultipartiteState& m, std::span<const Eigen::Index> a,
                           std::span<const Eigen::Index> b) {
  check_disjoint(a, b, "conditional_entropy");
  const auto ab = set_union_sorted(a, b);
  return subsystem_entropy(m, ab) - subsystem_entropy(m, b);
}

double mutual_entropy(const MultipartiteState& m, std::span<const Eigen::Index> a,
                      std::span<const Eigen::Index> b) {
  check_disjoint(a, b, "mutual_entropy");
  const auto ab = set_union_sorted(a, b);
  return subsystem_entropy(m, a) + subsystem_entropy(m, b) - subsystem_entropy(m, ab);
}

double conditional_mutual(const MultipartiteState& m, std::span<const Eigen::Index> a,
                          std::span<const Eigen::Index> b,
                          std::span<const Eigen::Index> c) {
  check_disjoint(a, b, "conditional_mutual");
  check_disjoint(a, c, "conditional_mutual");
  check_disjoint(b, c, "conditional_mutual");
  const auto ac = set_union_sorted(a, c);
  const auto bc = set_union_sorted(b, c);
  const auto abc = set_union_sorted(ac, b);
  return subsystem_entropy(m, ac) + subsystem_entropy(m, bc) - subsystem_entropy(m, abc) -
         subsystem_entropy(m, c);
}

}  // namespace qsrc
