#pragma once

#include "qsrc/ensembles.hpp"
#include "qsrc/qcore.hpp"
#include "qsrc/types.hpp"

#include <string>
#include <vector>

namespace qsrc {

/// CPTP map given by Kraus operators; sum K^dag K = I within 1e-9.
struct KrausChannel {
  std::vector<Matrix> ops;

  explicit KrausChannel(std::vector<Matrix> ops_);

  Eigen::Index in_dim() const { return ops.front().cols(); }
  Eigen::Index out_dim() const { return ops.front().rows(); }

  static KrausChannel identity(Eigen::Index d);
  static KrausChannel depolarizing(Eigen::Index d);
  static KrausChannel from_unitary(const Matrix& u);
  /// Projective measurement in the given orthonormal basis (label forgotten).
  static KrausChannel dephasing(const Matrix& basis);
};

DensityOperator apply(const KrausChannel& c, const DensityOperator& rho);

/// compose(d, e) acts as d after e.
KrausChannel compose(const KrausChannel& second, const KrausChannel& first);

/// Stinespring isometry V = sum_m K_m (x) |m>_env, output factor first.
Matrix dilate(const KrausChannel& c);

/// Environment half of the dilation applied to a pure input.
DensityOperator environment_state(const KrausChannel& c, const StateVector& psi);

/// Classical-outcome-indexed collection of completely positive branches.
/// Completeness holds over all outcomes and fragments jointly.
struct Instrument {
  struct Branch {
    std::string label;
    std::vector<Matrix> kraus;
  };
  std::vector<Branch> branches;

  explicit Instrument(std::vector<Branch> branches_);

  Eigen::Index in_dim() const { return branches.front().kraus.front().cols(); }
  Eigen::Index out_dim() const { return branches.front().kraus.front().rows(); }
  int outcomes() const { return static_cast<int>(branches.size()); }

  /// Single-outcome instrument wrapping a channel.
  static Instrument trivial(const KrausChannel& c, std::string label = "0");
  /// Projective measurement in an orthonormal basis, outcomes "0", "1", ...
  static Instrument projective(const Matrix& basis);
  /// Projective measurement onto mutually orthogonal subspace projectors.
  static Instrument projective(const std::vector<HermitianOperator>& projectors,
                               std::vector<std::string> labels);
};

/// Forget the classical label: the CPTP map with every fragment pooled.
KrausChannel induced_channel(const Instrument& ins);

/// Outcome-labelled mixture: a list of (label, probability, quantum state).
struct ClassicalQuantumState {
  struct Branch {
    std::string label;
    double prob = 0.0;
    DensityOperator state;
  };
  std::vector<Branch> branches;
};

/// Born-rule evaluation of an instrument on a pure input. Outcomes with
/// probability below 1e-12 are dropped.
ClassicalQuantumState encode(const Instrument& ins, const StateVector& psi);

/// Classical mutual information (bits) between the signal index of e and the
/// instrument outcome.
double mutual_information(const Instrument& ins, const Ensemble& e);

/// Quantum resource accounting of an encoding acting on n-strings of e.
struct SupportReport {
  double avg_supp = 0.0;                    // qubits per signal
  std::vector<std::string> labels;          // outcome labels, in instrument order
  std::vector<double> outcome_probs;        // p_j
  std::vector<double> per_outcome_supp;     // log2(rank)/n
  std::vector<Eigen::VectorXd> spectra;     // eigenvalues behind each rank call
};

/// supp_j = log2(rank of the joint support of E_j)/n with the rank read from
/// the spectrum at threshold rank_tol * largest eigenvalue.
SupportReport avg_support(const Instrument& ins, const Ensemble& e, int n,
                          double rank_tol = 1e-9);

/// Holevo quantity of a classical-quantum encoding split into the average
/// conditional Holevo quantity and the classical mutual information.
struct ChiSplit {
  double chi_enc = 0.0;      // chi of the block-diagonal encoded ensemble
  double avg_chi_j = 0.0;    // sum_j p_j chi_j
  double mutual_info = 0.0;  // I(I:J) in bits
};

ChiSplit chi_cq_split(const std::vector<ClassicalQuantumState>& encoded,
                      const std::vector<double>& probs);

}  // namespace qsrc
