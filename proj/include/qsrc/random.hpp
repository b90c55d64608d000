#pragma once

#include "qsrc/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace qsrc {

struct Ensemble;
struct MixedEnsemble;
struct KrausChannel;

/// All randomized machinery draws from an explicitly seeded engine so that
/// every sweep and Monte Carlo run is replayable from its recorded seed.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Derives an independent stream for a chunk of a partitioned computation.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

/// Haar-distributed pure state in dimension d.
StateVector random_state(Rng& rng, Eigen::Index d);

/// Random density operator of the given rank (default: full rank) from a
/// normalized Wishart matrix.
DensityOperator random_density(Rng& rng, Eigen::Index d, Eigen::Index rank = 0);

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
Matrix random_unitary(Rng& rng, Eigen::Index d);

/// Random isometry from dim d to dim rows >= d (orthonormal columns).
Matrix random_isometry(Rng& rng, Eigen::Index rows, Eigen::Index d);

/// Probability vector from a flat Dirichlet.
std::vector<double> random_distribution(Rng& rng, int n);

/// Random CPTP map with the given number of Kraus operators, built from a
/// Stinespring isometry.
KrausChannel random_channel(Rng& rng, Eigen::Index in_dim, Eigen::Index out_dim,
                            Eigen::Index kraus_count);

/// Random pure-state ensemble with k-dimensional signals.
Ensemble random_ensemble(Rng& rng, Eigen::Index dim, int num_states);

/// Random mixed-state ensemble.
MixedEnsemble random_mixed_ensemble(Rng& rng, Eigen::Index dim, int num_states);

}  // namespace qsrc
