#pragma once

#include "qsrc/ensembles.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qsrc::fixtures {

/// {|0>, |+>; 1/2, 1/2} on a qubit; entropy 0.600876...
Ensemble zero_plus();

/// Orthogonal pair {|0>, |1>; 1/2, 1/2}.
Ensemble orthogonal_pair();

/// Five states |0>, |0>+|1>, |1>+|2>, |2>+|3>, |3> (normalized) in dim 4 with
/// uniform priors: irreducible, with a maximal-length chain from |0> to |3>.
Ensemble five_state();

/// Reducible dim-4 source with two orthogonal blocks of weight 1/2, each a
/// zero_plus-style pair inside its own qubit subspace.
Ensemble two_block();

/// Fixture by name, for CLI --ensemble shortcuts.
std::optional<Ensemble> by_name(const std::string& name);
std::vector<std::string> names();

}  // namespace qsrc::fixtures
