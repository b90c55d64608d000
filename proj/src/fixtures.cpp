#include "qsrc/fixtures.hpp"

#include <cmath>

namespace qsrc::fixtures {

namespace {

StateVector make_state(std::initializer_list<Complex> amps) {
  Vector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (const Complex& a : amps) v[i++] = a;
  v.normalize();
  return StateVector(std::move(v));
}

}  // namespace

Ensemble zero_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return Ensemble({make_state({1.0, 0.0}), make_state({r, r})}, {0.5, 0.5});
}

Ensemble orthogonal_pair() {
  return Ensemble({make_state({1.0, 0.0}), make_state({0.0, 1.0})}, {0.5, 0.5});
}

Ensemble five_state() {
  return Ensemble({make_state({1.0, 0.0, 0.0, 0.0}),
                   make_state({1.0, 1.0, 0.0, 0.0}),
                   make_state({0.0, 1.0, 1.0, 0.0}),
                   make_state({0.0, 0.0, 1.0, 1.0}),
                   make_state({0.0, 0.0, 0.0, 1.0})},
                  {0.2, 0.2, 0.2, 0.2, 0.2});
}

Ensemble two_block() {
  return Ensemble({make_state({1.0, 0.0, 0.0, 0.0}),
                   make_state({1.0, 1.0, 0.0, 0.0}),
                   make_state({0.0, 0.0, 1.0, 0.0}),
                   make_state({0.0, 0.0, 1.0, 1.0})},
                  {0.25, 0.25, 0.25, 0.25});
}

std::optional<Ensemble> by_name(const std::string& name) {
  if (name == "zero_plus") return zero_plus();
  if (name == "orthogonal_pair") return orthogonal_pair();
  if (name == "five_state") return five_state();
  if (name == "two_block") return two_block();
  return std::nullopt;
}

std::vector<std::string> names() {
  return {"zero_plus", "orthogonal_pair", "five_state", "two_block"};
}

}  // namespace qsrc::fixtures
