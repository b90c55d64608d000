#include "qsrc/channels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsrc {

namespace {

constexpr double kCompletenessTol = 1e-9;
constexpr double kOutcomeFloor = 1e-12;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_completeness(const std::vector<const Matrix*>& kraus, Eigen::Index in_dim,
                        const char* who) {
  Matrix acc = Matrix::Zero(in_dim, in_dim);
  for (const Matrix* k : kraus) acc += k->adjoint() * (*k);
  const double err = (acc - Matrix::Identity(in_dim, in_dim)).cwiseAbs().maxCoeff();
  require(err <= kCompletenessTol,
          std::string(who) + ": Kraus operators not trace preserving, deviation " +
              std::to_string(err));
}

}  // namespace

KrausChannel::KrausChannel(std::vector<Matrix> ops_) : ops(std::move(ops_)) {
  require(!ops.empty(), "KrausChannel: no Kraus operators");
  for (const auto& k : ops) {
    require(k.rows() == ops.front().rows() && k.cols() == ops.front().cols(),
            "KrausChannel: inconsistent operator shapes");
  }
  std::vector<const Matrix*> ptrs;
  for (const auto& k : ops) ptrs.push_back(&k);
  check_completeness(ptrs, in_dim(), "KrausChannel");
}

KrausChannel KrausChannel::identity(Eigen::Index d) {
  return KrausChannel({Matrix::Identity(d, d)});
}

KrausChannel KrausChannel::depolarizing(Eigen::Index d) {
  // rho -> I/d via the basis-transition operators |i><j| / sqrt(d).
  std::vector<Matrix> ops;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = scale;
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel(std::move(ops));
}

KrausChannel KrausChannel::from_unitary(const Matrix& u) {
  return KrausChannel({u});
}

KrausChannel KrausChannel::dephasing(const Matrix& basis) {
  std::vector<Matrix> ops;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const Vector b = basis.col(i);
    ops.emplace_back(b * b.adjoint());
  }
  return KrausChannel(std::move(ops));
}

DensityOperator apply(const KrausChannel& c, const DensityOperator& rho) {
  require(c.in_dim() == rho.dim(), "apply: dimension mismatch");
  Matrix out = Matrix::Zero(c.out_dim(), c.out_dim());
  for (const auto& k : c.ops) out += k * rho.matrix() * k.adjoint();
  return DensityOperator(out);
}

KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  require(second.in_dim() == first.out_dim(), "compose: dimension mismatch");
  std::vector<Matrix> ops;
  ops.reserve(second.ops.size() * first.ops.size());
  for (const auto& kd : second.ops)
    for (const auto& ke : first.ops) ops.emplace_back(kd * ke);
  return KrausChannel(std::move(ops));
}

Matrix dilate(const KrausChannel& c) {
  const auto m = static_cast<Eigen::Index>(c.ops.size());
  Matrix v(c.out_dim() * m, c.in_dim());
  for (Eigen::Index o = 0; o < c.out_dim(); ++o)
    for (Eigen::Index e = 0; e < m; ++e)
      v.row(o * m + e) = c.ops[static_cast<size_t>(e)].row(o);
  return v;
}

DensityOperator environment_state(const KrausChannel& c, const StateVector& psi) {
  require(c.in_dim() == psi.dim(), "environment_state: dimension mismatch");
  const auto m = static_cast<Eigen::Index>(c.ops.size());
  // tr_out of V|psi><psi|V^dag: env(e, f) = <psi|K_f^dag K_e|psi>.
  std::vector<Vector> branch(static_cast<size_t>(m));
  for (Eigen::Index e = 0; e < m; ++e)
    branch[static_cast<size_t>(e)] = c.ops[static_cast<size_t>(e)] * psi.amplitudes();
  Matrix env(m, m);
  for (Eigen::Index e = 0; e < m; ++e)
    for (Eigen::Index f = 0; f < m; ++f)
      env(e, f) = branch[static_cast<size_t>(f)].dot(branch[static_cast<size_t>(e)]);
  return DensityOperator(env);
}

Instrument::Instrument(std::vector<Branch> branches_) : branches(std::move(branches_)) {
  require(!branches.empty(), "Instrument: no outcomes");
  std::vector<const Matrix*> all;
  for (const auto& b : branches) {
    require(!b.kraus.empty(), "Instrument: outcome '" + b.label + "' has no fragments");
    for (const auto& k : b.kraus) {
      require(k.rows() == out_dim() && k.cols() == in_dim(),
              "Instrument: inconsistent fragment shapes");
      all.push_back(&k);
    }
  }
  check_completeness(all, in_dim(), "Instrument");
}

Instrument Instrument::trivial(const KrausChannel& c, std::string label) {
  return Instrument({{std::move(label), c.ops}});
}

Instrument Instrument::projective(const Matrix& basis) {
  std::vector<Branch> branches;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const Vector b = basis.col(i);
    branches.push_back({std::to_string(i), {Matrix(b * b.adjoint())}});
  }
  return Instrument(std::move(branches));
}

Instrument Instrument::projective(const std::vector<HermitianOperator>& projectors,
                                  std::vector<std::string> labels) {
  require(projectors.size() == labels.size(), "projective: labels/projectors mismatch");
  std::vector<Branch> branches;
  for (size_t i = 0; i < projectors.size(); ++i)
    branches.push_back({std::move(labels[i]), {projectors[i].matrix()}});
  return Instrument(std::move(branches));
}

KrausChannel induced_channel(const Instrument& ins) {
  std::vector<Matrix> ops;
  for (const auto& b : ins.branches)
    for (const auto& k : b.kraus) ops.push_back(k);
  return KrausChannel(std::move(ops));
}

ClassicalQuantumState encode(const Instrument& ins, const StateVector& psi) {
  require(ins.in_dim() == psi.dim(), "encode: dimension mismatch");
  ClassicalQuantumState out;
  for (const auto& b : ins.branches) {
    Matrix tau = Matrix::Zero(ins.out_dim(), ins.out_dim());
    for (const auto& k : b.kraus) {
      const Vector v = k * psi.amplitudes();
      tau += v * v.adjoint();
    }
    const double c = tau.trace().real();
    if (c < kOutcomeFloor) continue;
    out.branches.push_back({b.label, c, DensityOperator(tau / c)});
  }
  return out;
}

namespace {

// Joint distribution p(i, j) = p_i * c_j^i over signals and outcomes.
std::vector<std::vector<double>> outcome_table(const Instrument& ins, const Ensemble& e) {
  std::vector<std::vector<double>> joint(
      static_cast<size_t>(e.size()),
      std::vector<double>(static_cast<size_t>(ins.outcomes()), 0.0));
  for (int i = 0; i < e.size(); ++i) {
    for (int j = 0; j < ins.outcomes(); ++j) {
      double c = 0.0;
      for (const auto& k : ins.branches[static_cast<size_t>(j)].kraus)
        c += (k * e.states[static_cast<size_t>(i)].amplitudes()).squaredNorm();
      joint[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          e.probs[static_cast<size_t>(i)] * c;
    }
  }
  return joint;
}

double classical_mi(const std::vector<std::vector<double>>& joint) {
  const size_t rows = joint.size(), cols = joint.front().size();
  std::vector<double> pi(rows, 0.0), pj(cols, 0.0);
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) {
      pi[i] += joint[i][j];
      pj[j] += joint[i][j];
    }
  double mi = 0.0;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      if (joint[i][j] > 0.0)
        mi += joint[i][j] * std::log2(joint[i][j] / (pi[i] * pj[j]));
  return std::max(mi, 0.0);
}

}  // namespace

double mutual_information(const Instrument& ins, const Ensemble& e) {
  require(ins.in_dim() == e.dim(), "mutual_information: dimension mismatch");
  return classical_mi(outcome_table(ins, e));
}

SupportReport avg_support(const Instrument& ins, const Ensemble& e, int n,
                          double rank_tol) {
  require(rank_tol > 0.0 && rank_tol < 1e-3, "avg_support: rank_tol outside (0, 1e-3)");
  StringSource strings(e, n);
  require(ins.in_dim() == strings.dim(), "avg_support: instrument does not act on n-strings");
  require(strings.size() <= kMaxEagerStringCount,
          "avg_support: string source too large to enumerate");

  const auto j_count = static_cast<size_t>(ins.outcomes());
  std::vector<double> pj(j_count, 0.0);
  std::vector<Matrix> mix(j_count,
                          Matrix::Zero(ins.out_dim(), ins.out_dim()));
  for (std::uint64_t idx = 0; idx < strings.size(); ++idx) {
    const StateVector sigma = strings.state(idx);
    const double p = strings.prob(idx);
    for (size_t j = 0; j < j_count; ++j) {
      Matrix tau = Matrix::Zero(ins.out_dim(), ins.out_dim());
      for (const auto& k : ins.branches[j].kraus) {
        const Vector v = k * sigma.amplitudes();
        tau += v * v.adjoint();
      }
      pj[j] += p * tau.trace().real();
      mix[j] += p * tau;  // p_I c_j^I omega_j^I, normalized by p_j below
    }
  }

  SupportReport report;
  for (size_t j = 0; j < j_count; ++j) {
    report.labels.push_back(ins.branches[j].label);
    report.outcome_probs.push_back(pj[j]);
    if (pj[j] < kOutcomeFloor) {
      report.per_outcome_supp.push_back(0.0);
      report.spectra.emplace_back();
      continue;
    }
    EigenSystem es = eigh(Matrix(mix[j] / pj[j]));
    const Eigen::VectorXd vals = es.values.cwiseMax(0.0);
    const double cutoff = rank_tol * vals.maxCoeff();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      if (vals[i] > cutoff) ++rank;
    const double supp = std::log2(static_cast<double>(std::max<Eigen::Index>(rank, 1))) / n;
    report.per_outcome_supp.push_back(supp);
    report.spectra.push_back(vals);
    report.avg_supp += pj[j] * supp;
  }
  return report;
}

ChiSplit chi_cq_split(const std::vector<ClassicalQuantumState>& encoded,
                      const std::vector<double>& probs) {
  require(encoded.size() == probs.size(), "chi_cq_split: size mismatch");
  require(!encoded.empty(), "chi_cq_split: empty encoding list");

  // Collect the union of outcome labels in first-seen order.
  std::vector<std::string> labels;
  std::map<std::string, size_t> index;
  for (const auto& cq : encoded) {
    for (const auto& br : cq.branches) {
      if (index.emplace(br.label, labels.size()).second) labels.push_back(br.label);
    }
  }
  const size_t j_count = labels.size();
  Eigen::Index dim = 0;
  for (const auto& cq : encoded)
    for (const auto& br : cq.branches) dim = std::max(dim, br.state.dim());

  std::vector<double> pj(j_count, 0.0);
  std::vector<Matrix> mix(j_count, Matrix::Zero(dim, dim));
  std::vector<double> cond_entropy(j_count, 0.0);  // sum_I p_I c_j^I S(omega_j^I)
  double avg_tau_entropy = 0.0;                    // sum_I p_I S(tau_I)

  for (size_t i = 0; i < encoded.size(); ++i) {
    const double p = probs[i];
    double label_entropy = 0.0;
    double branch_entropy = 0.0;
    for (const auto& br : encoded[i].branches) {
      require(br.state.dim() == dim, "chi_cq_split: inconsistent branch dimensions");
      const size_t j = index.at(br.label);
      pj[j] += p * br.prob;
      mix[j] += p * br.prob * br.state.matrix();
      const double s = von_neumann_entropy(br.state);
      cond_entropy[j] += p * br.prob * s;
      branch_entropy += br.prob * s;
      label_entropy -= br.prob > 0.0 ? br.prob * std::log2(br.prob) : 0.0;
    }
    // Block-diagonal structure: S(tau_I) = H(c^I) + sum_j c_j^I S(omega_j^I).
    avg_tau_entropy += p * (label_entropy + branch_entropy);
  }

  ChiSplit out;
  const double h_j = shannon_entropy(pj);
  double avg_entropy = h_j;  // S(tau_bar) = H(p_j) + sum_j p_j S(omega_bar_j)
  for (size_t j = 0; j < j_count; ++j) {
    if (pj[j] < kOutcomeFloor) continue;
    const DensityOperator mean_j(Matrix(mix[j] / pj[j]));
    const double s_mean = von_neumann_entropy(mean_j);
    avg_entropy += pj[j] * s_mean;
    out.avg_chi_j += pj[j] * s_mean - cond_entropy[j];
  }
  out.chi_enc = avg_entropy - avg_tau_entropy;

  // I(I:J) = H(J) - H(J|I) from the recorded branch probabilities.
  double h_j_given_i = 0.0;
  for (size_t i = 0; i < encoded.size(); ++i) {
    for (const auto& br : encoded[i].branches)
      if (br.prob > 0.0) h_j_given_i -= probs[i] * br.prob * std::log2(br.prob);
  }
  out.mutual_info = std::max(h_j - h_j_given_i, 0.0);
  return out;
}

}  // namespace qsrc
