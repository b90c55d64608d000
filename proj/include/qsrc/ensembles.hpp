#pragma once

#include "qsrc/qcore.hpp"
#include "qsrc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qsrc {

/// Weighted source of pure signal states on a k-dimensional space.
struct Ensemble {
  std::vector<StateVector> states;
  std::vector<double> probs;

  Ensemble(std::vector<StateVector> states_, std::vector<double> probs_);

  Eigen::Index dim() const { return states.front().dim(); }
  int size() const { return static_cast<int>(states.size()); }
};

/// Weighted list of mixed states (outputs of channels, encodings, ...).
struct MixedEnsemble {
  std::vector<DensityOperator> states;
  std::vector<double> probs;

  MixedEnsemble(std::vector<DensityOperator> states_, std::vector<double> probs_);

  Eigen::Index dim() const { return states.front().dim(); }
  int size() const { return static_cast<int>(states.size()); }
};

DensityOperator density(const Ensemble& e);
double entropy(const Ensemble& e);

/// Holevo quantity chi = S(avg) - sum_i p_i S(rho_i), in bits.
double holevo_chi(const MixedEnsemble& e);
/// Pure-state case: chi = S(avg).
double holevo_chi(const Ensemble& e);

/// Smallest pairwise |<s_i|s_j>| exceeding tol; nullopt when every pair is
/// orthogonal at that threshold.
std::optional<double> min_overlap(const Ensemble& e, double tol = 1e-9);

/// Shortest sequence of signal indices from i to j with consecutive nonzero
/// overlaps (breadth-first, so length <= K); nullopt when none exists.
std::optional<std::vector<int>> chain(const Ensemble& e, int i, int j,
                                      double tol = 1e-9);

/// Maximal orthogonal decomposition of a source.
struct Decomposition {
  struct Component {
    Ensemble part;                  // renormalized sub-ensemble
    double weight = 0.0;            // total probability of the block
    std::vector<int> members;       // indices into the original ensemble
  };
  std::vector<Component> components;
  std::vector<HermitianOperator> projectors;  // mutually orthogonal block projectors

  int blocks() const { return static_cast<int>(components.size()); }
  bool irreducible() const { return components.size() == 1; }
};

/// Connected components of the graph with edges where |<s_i|s_j>| > tol.
Decomposition decompose(const Ensemble& e, double tol = 1e-9);

/// Borderline overlaps (within a decade of tol) that make a decomposition
/// ambiguous; surfaced for reporting rather than decided.
std::vector<double> borderline_overlaps(const Ensemble& e, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Product (string) sources
// ---------------------------------------------------------------------------

inline constexpr Eigen::Index kMaxEagerStringDim = 4096;
inline constexpr std::uint64_t kMaxEagerStringCount = 1000000;

/// Eagerly materialized n-fold product source with K^n members. Throws
/// std::length_error beyond the eager budget; use StringSource instead.
Ensemble string_ensemble(const Ensemble& e, int n);

/// Lazy indexed view of the n-fold product source. Member index I is the
/// mixed-radix string i_1...i_n with position 1 most significant.
class StringSource {
public:
  StringSource(const Ensemble& base, int n);

  const Ensemble& base() const { return base_; }
  int block_length() const { return n_; }
  std::uint64_t size() const { return count_; }
  Eigen::Index dim() const;  // k^n, throws if it overflows Eigen::Index

  std::vector<int> digits(std::uint64_t index) const;
  double prob(std::uint64_t index) const;
  double prob(std::span<const int> digits) const;
  StateVector state(std::uint64_t index) const;
  StateVector state(std::span<const int> digits) const;

private:
  Ensemble base_;
  int n_;
  std::uint64_t count_;
};

}  // namespace qsrc
