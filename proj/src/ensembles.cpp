#include "qsrc/ensembles.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsrc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_weights(const std::vector<double>& probs, size_t count, const char* who) {
  require(probs.size() == count, std::string(who) + ": states/probs size mismatch");
  require(count >= 1, std::string(who) + ": at least one state required");
  double total = 0.0;
  for (double p : probs) {
    require(p >= -1e-12, std::string(who) + ": negative probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= kNormTol,
          std::string(who) + ": probabilities sum to " + std::to_string(total));
}

// Adjacency of the nonzero-overlap graph.
std::vector<std::vector<int>> overlap_graph(const Ensemble& e, double tol) {
  const int k = e.size();
  std::vector<std::vector<int>> adj(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double ov =
          std::abs(e.states[static_cast<size_t>(i)].amplitudes().dot(
              e.states[static_cast<size_t>(j)].amplitudes()));
      if (ov > tol) {
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
      }
    }
  }
  return adj;
}

}  // namespace

Ensemble::Ensemble(std::vector<StateVector> states_, std::vector<double> probs_)
    : states(std::move(states_)), probs(std::move(probs_)) {
  check_weights(probs, states.size(), "Ensemble");
  for (const auto& s : states)
    require(s.dim() == states.front().dim(), "Ensemble: mixed state dimensions");
}

MixedEnsemble::MixedEnsemble(std::vector<DensityOperator> states_,
                             std::vector<double> probs_)
    : states(std::move(states_)), probs(std::move(probs_)) {
  check_weights(probs, states.size(), "MixedEnsemble");
  for (const auto& s : states)
    require(s.dim() == states.front().dim(), "MixedEnsemble: mixed state dimensions");
}

DensityOperator density(const Ensemble& e) {
  Matrix rho = Matrix::Zero(e.dim(), e.dim());
  for (int i = 0; i < e.size(); ++i) {
    const auto& v = e.states[static_cast<size_t>(i)].amplitudes();
    rho += e.probs[static_cast<size_t>(i)] * (v * v.adjoint());
  }
  return DensityOperator(rho);
}

double entropy(const Ensemble& e) { return von_neumann_entropy(density(e)); }

double holevo_chi(const MixedEnsemble& e) {
  Matrix avg = Matrix::Zero(e.dim(), e.dim());
  double avg_entropy = 0.0;
  for (int i = 0; i < e.size(); ++i) {
    avg += e.probs[static_cast<size_t>(i)] * e.states[static_cast<size_t>(i)].matrix();
    avg_entropy +=
        e.probs[static_cast<size_t>(i)] * von_neumann_entropy(e.states[static_cast<size_t>(i)]);
  }
  return von_neumann_entropy(DensityOperator(avg)) - avg_entropy;
}

double holevo_chi(const Ensemble& e) { return entropy(e); }

std::optional<double> min_overlap(const Ensemble& e, double tol) {
  require(e.size() >= 2, "min_overlap: need at least two states");
  std::optional<double> best;
  for (int i = 0; i < e.size(); ++i) {
    for (int j = i + 1; j < e.size(); ++j) {
      const double ov =
          std::abs(e.states[static_cast<size_t>(i)].amplitudes().dot(
              e.states[static_cast<size_t>(j)].amplitudes()));
      if (ov > tol && (!best || ov < *best)) best = ov;
    }
  }
  return best;
}

std::optional<std::vector<int>> chain(const Ensemble& e, int i, int j, double tol) {
  require(i >= 0 && i < e.size() && j >= 0 && j < e.size(), "chain: index out of range");
  if (i == j) return std::vector<int>{i};
  const auto adj = overlap_graph(e, tol);
  std::vector<int> parent(static_cast<size_t>(e.size()), -1);
  std::deque<int> frontier{i};
  parent[static_cast<size_t>(i)] = i;
  while (!frontier.empty()) {
    const int cur = frontier.front();
    frontier.pop_front();
    for (int nb : adj[static_cast<size_t>(cur)]) {
      if (parent[static_cast<size_t>(nb)] != -1) continue;
      parent[static_cast<size_t>(nb)] = cur;
      if (nb == j) {
        std::vector<int> path{j};
        for (int at = j; at != i; at = parent[static_cast<size_t>(at)])
          path.push_back(parent[static_cast<size_t>(at)]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(nb);
    }
  }
  return std::nullopt;
}

Decomposition decompose(const Ensemble& e, double tol) {
  const auto adj = overlap_graph(e, tol);
  std::vector<int> label(static_cast<size_t>(e.size()), -1);
  int blocks = 0;
  for (int seed = 0; seed < e.size(); ++seed) {
    if (label[static_cast<size_t>(seed)] != -1) continue;
    std::deque<int> frontier{seed};
    label[static_cast<size_t>(seed)] = blocks;
    while (!frontier.empty()) {
      const int cur = frontier.front();
      frontier.pop_front();
      for (int nb : adj[static_cast<size_t>(cur)]) {
        if (label[static_cast<size_t>(nb)] == -1) {
          label[static_cast<size_t>(nb)] = blocks;
          frontier.push_back(nb);
        }
      }
    }
    ++blocks;
  }

  Decomposition out;
  for (int b = 0; b < blocks; ++b) {
    std::vector<int> members;
    std::vector<StateVector> states;
    std::vector<double> probs;
    double weight = 0.0;
    for (int i = 0; i < e.size(); ++i) {
      if (label[static_cast<size_t>(i)] != b) continue;
      members.push_back(i);
      states.push_back(e.states[static_cast<size_t>(i)]);
      probs.push_back(e.probs[static_cast<size_t>(i)]);
      weight += e.probs[static_cast<size_t>(i)];
    }
    require(weight > 0.0, "decompose: component with zero total probability");
    for (double& p : probs) p /= weight;

    // Orthonormal span of the block via column-pivoted QR.
    Matrix cols(e.dim(), static_cast<Eigen::Index>(states.size()));
    for (size_t i = 0; i < states.size(); ++i)
      cols.col(static_cast<Eigen::Index>(i)) = states[i].amplitudes();
    Eigen::ColPivHouseholderQR<Matrix> qr(cols);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    const Matrix q = qr.householderQ() * Matrix::Identity(e.dim(), rank);
    out.projectors.emplace_back(Matrix(q * q.adjoint()));

    out.components.push_back(
        {Ensemble(std::move(states), std::move(probs)), weight, std::move(members)});
  }
  return out;
}

std::vector<double> borderline_overlaps(const Ensemble& e, double tol) {
  std::vector<double> out;
  for (int i = 0; i < e.size(); ++i) {
    for (int j = i + 1; j < e.size(); ++j) {
      const double ov =
          std::abs(e.states[static_cast<size_t>(i)].amplitudes().dot(
              e.states[static_cast<size_t>(j)].amplitudes()));
      if (ov > tol * 0.1 && ov < tol * 10.0) out.push_back(ov);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Ensemble string_ensemble(const Ensemble& e, int n) {
  StringSource view(e, n);
  if (view.dim() > kMaxEagerStringDim || view.size() > kMaxEagerStringCount) {
    throw std::length_error(
        "string_ensemble: product source exceeds the eager budget; use StringSource");
  }
  std::vector<StateVector> states;
  std::vector<double> probs;
  states.reserve(view.size());
  probs.reserve(view.size());
  for (std::uint64_t idx = 0; idx < view.size(); ++idx) {
    states.push_back(view.state(idx));
    probs.push_back(view.prob(idx));
  }
  // Renormalize away accumulated product rounding.
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return Ensemble(std::move(states), std::move(probs));
}

StringSource::StringSource(const Ensemble& base, int n) : base_(base), n_(n) {
  require(n >= 1, "StringSource: block length must be >= 1");
  count_ = 1;
  for (int m = 0; m < n; ++m) {
    const std::uint64_t next = count_ * static_cast<std::uint64_t>(base_.size());
    require(next / static_cast<std::uint64_t>(base_.size()) == count_,
            "StringSource: member count overflows 64 bits");
    count_ = next;
  }
}

Eigen::Index StringSource::dim() const {
  Eigen::Index d = 1;
  for (int m = 0; m < n_; ++m) {
    if (d > std::numeric_limits<Eigen::Index>::max() / base_.dim())
      throw std::length_error("StringSource: k^n overflows index type");
    d *= base_.dim();
  }
  return d;
}

std::vector<int> StringSource::digits(std::uint64_t index) const {
  require(index < count_, "StringSource: index out of range");
  std::vector<int> d(static_cast<size_t>(n_));
  const auto k = static_cast<std::uint64_t>(base_.size());
  for (int m = n_ - 1; m >= 0; --m) {
    d[static_cast<size_t>(m)] = static_cast<int>(index % k);
    index /= k;
  }
  return d;
}

double StringSource::prob(std::uint64_t index) const { return prob(digits(index)); }

double StringSource::prob(std::span<const int> digits) const {
  double p = 1.0;
  for (int i : digits) p *= base_.probs[static_cast<size_t>(i)];
  return p;
}

StateVector StringSource::state(std::uint64_t index) const { return state(digits(index)); }

StateVector StringSource::state(std::span<const int> digits) const {
  Vector acc = base_.states[static_cast<size_t>(digits[0])].amplitudes();
  for (size_t m = 1; m < digits.size(); ++m) {
    const Vector& next = base_.states[static_cast<size_t>(digits[m])].amplitudes();
    Vector out(acc.size() * next.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i)
      out.segment(i * next.size(), next.size()) = acc[i] * next;
    acc = std::move(out);
  }
  return StateVector(std::move(acc));
}

}  // namespace qsrc
