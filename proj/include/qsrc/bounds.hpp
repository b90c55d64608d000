#pragma once

#include "qsrc/channels.hpp"
#include "qsrc/codecs.hpp"
#include "qsrc/ensembles.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsrc {

/// Outcome of a single inequality check. `slack` is the margin toward
/// satisfaction (>= -tolerance means the bound holds); its construction from
/// lhs and rhs is documented per check since bound directions differ.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::string inputs_digest;
  enum class Status { Pass, Fail, PreconditionUnmet } status = Status::Pass;
  double tolerance = 1e-9;
  std::vector<std::pair<std::string, double>> details;

  bool passed() const { return status == Status::Pass; }
};

// ---------------------------------------------------------------------------
// Holevo continuity under high average fidelity (slack = rhs - lhs)
// ---------------------------------------------------------------------------

/// Both continuity bounds for a pair of equal-prior ensembles:
/// fidelity form  |chi1-chi2| <= 4(sqrt(eps) log2 d - sqrt(eps) log2(2 sqrt(eps)))
///   for eps = 1 - avg fidelity <= 1/16, and
/// trace-norm form |chi1-chi2| <= 2(eps' log2 d - eps' log2 eps')
///   for eps' = avg trace-norm distance <= 1/2.
/// A bound whose precondition fails is reported with PreconditionUnmet.
struct ChiContinuityReport {
  double eps = 0.0;        // 1 - average fidelity
  double eps_prime = 0.0;  // average trace-norm distance
  double chi1 = 0.0;
  double chi2 = 0.0;
  BoundReport fidelity_bound;
  BoundReport trace_norm_bound;
};

ChiContinuityReport check_holevo_continuity(const MixedEnsemble& e1,
                                            const MixedEnsemble& e2,
                                            const std::string& digest = "");

// ---------------------------------------------------------------------------
// Product-marginal bound on the Holevo quantity (slack = rhs - lhs)
// ---------------------------------------------------------------------------

/// Classical-quantum state sum_I p_I |I><I| (x) rho_I with the classical index
/// ranging over a product alphabet; position 0 is most significant.
struct CqJoint {
  std::vector<int> alphabet_sizes;
  std::vector<double> joint;               // p_I, mixed radix
  std::vector<DensityOperator> states;     // rho_I, same indexing
};

/// chi({rho_I; p_I}) <= n max_k sum_{I != k} p_{I != k}
///   [ S(sum_{i_k} p_{i_k} rho_I) - sum_{i_k} p_{i_k} S(rho_I) ].
/// Throws if the classical marginal is not a product within 1e-10.
BoundReport check_product_mi_bound(const CqJoint& state, const std::string& digest = "");

// ---------------------------------------------------------------------------
// Markov tail bound (slack = rhs - lhs, lhs = exact tail, rhs = 1/A)
// ---------------------------------------------------------------------------

/// For X in [0,1] with mean > 1 - eps: Prob(X < 1 - A eps) < 1/A.
BoundReport check_markov_tail(std::span<const double> values,
                              std::span<const double> probs, double a, double eps,
                              const std::string& digest = "");

// ---------------------------------------------------------------------------
// Typical-sequence mass by exact type enumeration
// ---------------------------------------------------------------------------

struct TypicalMassReport {
  double mass = 0.0;              // at the requested n
  int n0 = -1;                    // smallest n0 with mass > 1-eps for all m in [n0, n]
  std::vector<double> mass_by_n;  // index m-1 holds the mass at length m
};

/// Exact probability of { strings : |count(i) - n p_i| < L sqrt(n)/sqrt(eps) }
/// for every symbol, via multinomial type counting. Requires L <= 4, n <= 64.
TypicalMassReport typical_set_mass(std::span<const double> dist, int n, double eps);

// ---------------------------------------------------------------------------
// Information-disturbance experiments
// ---------------------------------------------------------------------------

struct DisturbanceCurve {
  struct Point {
    double t = 0.0;
    double eps = 0.0;
    double chi_env = 0.0;
  };
  std::vector<Point> points;  // sorted by t; always includes t = 0
  std::string ensemble_digest;
  std::string family;
};

/// Sweeps a parameterized coupling over the grid, recording the reconstruction
/// infidelity and the Holevo quantity of the environment ensemble at each
/// point. The input source must be irreducible.
DisturbanceCurve info_disturbance_sweep(
    const Ensemble& e, const std::function<KrausChannel(double)>& family,
    std::vector<double> grid, const std::string& family_name = "custom");

/// System qubit leaks into one ancilla qubit through the unitary
/// |0><0| (x) I + |1><1| (x) Ry(2t); the ancilla is the environment.
KrausChannel controlled_rotation_leak(double t);

/// Envelope fit chi ~ A sqrt(eps) + B sqrt(eps) log2(1/sqrt(eps)) constrained
/// to upper-bound every curve point; constants are empirical.
struct DisturbanceFit {
  double a = 0.0;
  double b = 0.0;
  double max_rel_overshoot = 0.0;  // max (fit - chi)/chi over fitted points
  double rms_residual = 0.0;
};

DisturbanceFit fit_disturbance_envelope(const DisturbanceCurve& curve);

/// Per-letter classical information along a scheme family; flags whether
/// info per signal is nonincreasing wherever the infidelity decreases.
struct PerLetterTable {
  struct Row {
    int n = 0;
    double eps = 0.0;
    double info_bits = 0.0;
    double info_per_signal = 0.0;
  };
  std::vector<Row> rows;
  bool monotone = true;
};

PerLetterTable per_letter_info_sweep(std::span<const SchemeReport> family);

// ---------------------------------------------------------------------------
// Resource lower bound for classical-quantum schemes (slack = lhs - rhs)
// ---------------------------------------------------------------------------

/// supp + I/n >= S - 4 sqrt(eps) log2 k + (4 sqrt(eps)/n) log2(2 sqrt(eps)).
BoundReport check_rate_info_bound(const SchemeReport& report, int k);

/// chi is nonincreasing under CPTP maps: chi(after) <= chi(before).
/// (slack = rhs - lhs with lhs = chi after, rhs = chi before)
BoundReport check_chi_monotonicity(const Ensemble& e, const KrausChannel& c,
                                   const std::string& digest = "");

// ---------------------------------------------------------------------------
// Seeded randomized sweeps
// ---------------------------------------------------------------------------

struct SweepSummary {
  std::string check;
  std::uint64_t seed = 0;
  int trials = 0;
  int violations = 0;
  int precondition_unmet = 0;
  double min_slack = 0.0;  // most adverse margin among evaluated trials
  std::vector<BoundReport> reports;
};

SweepSummary sweep_holevo_continuity(int trials, std::uint64_t seed,
                                     std::span<const int> dims);
SweepSummary sweep_product_mi_bound(int trials, std::uint64_t seed);
SweepSummary sweep_chi_monotonicity(int trials, std::uint64_t seed);
SweepSummary sweep_markov_tail(int trials, std::uint64_t seed);

}  // namespace qsrc
