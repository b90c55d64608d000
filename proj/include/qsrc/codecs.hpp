#pragma once

#include "qsrc/ensembles.hpp"
#include "qsrc/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qsrc {

// ---------------------------------------------------------------------------
// Typical sets over eigenindex strings
// ---------------------------------------------------------------------------

/// Frequency type of an eigenindex string: per-symbol counts over the support
/// alphabet, with its probability weight and exact member count.
struct TypeClass {
  std::vector<int> counts;
  double log2_weight = 0.0;    // sum_a counts[a] * log2(lambda_a)
  std::uint64_t strings = 0;   // multinomial size, saturates at 2^62
};

/// A set of eigenindex strings stored as whole type classes plus, for rate
/// mode, lexicographic prefixes of boundary classes. Weighted sums over the
/// set are evaluated by dynamic programming over count vectors, never by
/// enumerating members.
class TypicalSet {
public:
  TypicalSet() = default;  // empty set; populate via the factories below

  /// The M largest eigenvalue-product strings; ties broken lexicographically.
  static TypicalSet top_strings(const Eigen::VectorXd& support_eigvals, int n,
                                std::uint64_t m);

  /// All strings with |count(a) - n q_a| < s sqrt(n) / sqrt(eps) per symbol,
  /// where s is the support alphabet size.
  static TypicalSet frequency_window(const Eigen::VectorXd& support_eigvals, int n,
                                     double eps_typ);

  int length() const { return n_; }
  int alphabet() const { return s_; }
  std::uint64_t size() const { return total_; }
  bool covers_support() const { return full_space_; }
  bool contains_leading_string() const;  // all-0 string (n copies of symbol 0)

  /// sum over member strings t of prod_m weights(m, t_m); weights is an
  /// n x alphabet row-major table.
  double weighted_sum(const std::vector<double>& weights) const;

  /// Explicit members in no particular order; throws over the cap.
  std::vector<std::vector<int>> members(std::uint64_t cap = 1u << 20) const;

private:
  struct Partial {
    TypeClass type;
    std::vector<int> boundary;  // first excluded string in lex order
    std::uint64_t taken = 0;
  };

  int n_ = 0;
  int s_ = 0;
  std::vector<TypeClass> full_;
  std::vector<Partial> partials_;
  std::uint64_t total_ = 0;
  bool full_space_ = false;
};

// ---------------------------------------------------------------------------
// Schumacher codec
// ---------------------------------------------------------------------------

struct SchumacherOptions {
  std::optional<double> rate;     // rate mode: R qubits/signal, T size 2^floor(nR)
  std::optional<double> eps_typ;  // typicality mode
  bool ceil_support = false;      // round supp up to whole qubits per signal
};

/// Typical-subspace compressor for n-strings of a pure-state source.
/// Projection succeeds with q_I = <sigma_I|P|sigma_I>; the failure branch
/// maps to the fallback string of n copies of the leading eigenvector.
class SchumacherCodec {
public:
  SchumacherCodec(Ensemble source, int n, SchumacherOptions options);

  const Ensemble& source() const { return source_; }
  int block_length() const { return n_; }
  const SchumacherOptions& options() const { return options_; }
  const TypicalSet& typical_set() const { return set_; }

  /// Eigenbasis of the source density operator restricted to its support,
  /// eigenvalues descending; column a pairs with eigenvalue a.
  const Matrix& support_basis() const { return basis_; }
  const Eigen::VectorXd& support_eigvals() const { return eigvals_; }

  /// Success probability q_I for the input string with the given digits.
  double success_probability(std::span<const int> digits) const;
  /// |<sigma_I|phi_0>|^2 for the same string.
  double fallback_overlap(std::span<const int> digits) const;
  /// F_I = q_I^2 + (1 - q_I) |<sigma_I|phi_0>|^2.
  double string_fidelity(std::span<const int> digits) const;

  /// log2(rank of the joint encoded support) / n.
  double support_per_signal() const;

private:
  Ensemble source_;
  int n_;
  SchumacherOptions options_;
  Matrix basis_;
  Eigen::VectorXd eigvals_;
  std::vector<double> overlap_;  // K x s row-major: |<e_a|sigma_i>|^2
  TypicalSet set_;
};

// ---------------------------------------------------------------------------
// Hybrid classical-quantum codec
// ---------------------------------------------------------------------------

struct HybridOptions {
  double eps_typ = 0.1;     // typicality window for label strings
  double budget_c = 2.0;    // per-block qubits: ceil(m S_l + c sqrt(m))
  std::optional<std::vector<double>> block_rates;  // qubits/signal override per block
  double overlap_tol = 1e-9;
  bool ceil_support = false;
};

/// Theorem-style hybrid scheme: measure the orthogonal block label of each
/// signal (classical record), then Schumacher-compress each sub-block.
/// Label strings outside the typicality window map to a fixed state.
class HybridCodec {
public:
  HybridCodec(Ensemble source, int n, HybridOptions options);

  const Ensemble& source() const { return source_; }
  const Decomposition& decomposition() const { return decomposition_; }
  int block_length() const { return n_; }
  const HybridOptions& options() const { return options_; }
  int blocks() const { return decomposition_.blocks(); }
  /// True when the source is irreducible and the scheme degenerates to plain
  /// Schumacher compression with an empty classical record.
  bool degenerate() const { return decomposition_.blocks() == 1; }

  const std::vector<double>& block_weights() const { return weights_; }
  double block_entropy(int l) const { return block_entropy_[static_cast<size_t>(l)]; }
  int block_label_of_signal(int i) const { return label_of_[static_cast<size_t>(i)]; }
  int index_in_block(int i) const { return index_in_block_[static_cast<size_t>(i)]; }

  /// Qubit budget for a sub-block of length m from block l, capped at the
  /// size of the block's support.
  double block_qubits(int l, int m) const;

  /// Whether a label-string type (per-block counts) is inside the window.
  bool label_type_typical(std::span<const int> label_counts) const;

  /// Sub-codec for block l at sub-block length m (cached).
  const SchumacherCodec& sub_codec(int l, int m) const;

  /// Average |<sigma|phi_l>|^2 against the block's fallback signal state.
  double block_fallback_avg(int l) const;
  /// |<sigma_i|phi_l>|^2 for original signal index i.
  double signal_fallback_overlap(int i) const;

private:
  Ensemble source_;
  int n_;
  HybridOptions options_;
  Decomposition decomposition_;
  std::vector<double> weights_;
  std::vector<double> block_entropy_;
  std::vector<int> label_of_;              // original signal index -> block
  std::vector<int> index_in_block_;        // original signal index -> index in block
  std::vector<Vector> block_fallback_;     // leading eigenvector per block
  mutable std::vector<std::vector<std::optional<SchumacherCodec>>> cache_;
};

// ---------------------------------------------------------------------------
// Scheme evaluation
// ---------------------------------------------------------------------------

enum class EvalMode { Exact, MonteCarlo };

struct EvalOptions {
  EvalMode mode = EvalMode::Exact;
  std::uint64_t seed = 0;
  std::uint64_t samples = 10000;
  int jobs = 1;
};

/// Measured scheme summary: fidelity, quantum resource, classical record.
struct SchemeReport {
  std::string scheme;
  int n = 1;
  double rate = 0.0;             // NaN when not rate mode
  double eps_typ = 0.0;          // NaN when not typicality mode
  double avg_fidelity = 1.0;
  double eps = 0.0;              // 1 - avg_fidelity
  double avg_supp = 0.0;         // qubits/signal
  double mutual_info_bits = 0.0; // I(I:J) total bits
  double info_per_signal = 0.0;  // I(I:J)/n
  double classical_bits = 0.0;   // classical record entropy per signal
  double source_entropy = 0.0;   // S of the single-signal source
  int signal_dim = 2;
  EvalMode mode = EvalMode::Exact;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  double std_error = 0.0;
};

SchemeReport evaluate(const SchumacherCodec& codec, const EvalOptions& options);
SchemeReport evaluate(const HybridCodec& codec, const EvalOptions& options);

/// Measure every signal in the computational basis, keep the outcome string
/// classically, replace the quantum register by a fixed state; the decoder
/// rebuilds the measured basis string. Evaluated in closed form.
SchemeReport evaluate_measure_replace(const Ensemble& e, int n);

/// The untouched-input scheme: F = 1, full quantum support, no record.
SchemeReport identity_report(const Ensemble& e, int n);

}  // namespace qsrc
