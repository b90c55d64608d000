#include "qsrc/bounds.hpp"

#include "qsrc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qsrc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double xlog2(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

BoundReport finish(BoundReport r) {
  r.slack = r.rhs - r.lhs;
  if (r.status != BoundReport::Status::PreconditionUnmet)
    r.status = r.slack >= -r.tolerance ? BoundReport::Status::Pass
                                       : BoundReport::Status::Fail;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Holevo continuity
// ---------------------------------------------------------------------------

ChiContinuityReport check_holevo_continuity(const MixedEnsemble& e1,
                                            const MixedEnsemble& e2,
                                            const std::string& digest) {
  require(e1.dim() == e2.dim(), "check_holevo_continuity: dimension mismatch");
  require(e1.size() == e2.size(), "check_holevo_continuity: ensemble sizes differ");
  for (int i = 0; i < e1.size(); ++i)
    require(std::abs(e1.probs[static_cast<size_t>(i)] - e2.probs[static_cast<size_t>(i)]) <= 1e-12,
            "check_holevo_continuity: priors differ");

  ChiContinuityReport out;
  const double d = static_cast<double>(e1.dim());
  double avg_f = 0.0;
  double avg_tn = 0.0;
  for (int i = 0; i < e1.size(); ++i) {
    const double p = e1.probs[static_cast<size_t>(i)];
    avg_f += p * fidelity(e1.states[static_cast<size_t>(i)], e2.states[static_cast<size_t>(i)]);
    avg_tn += p * trace_norm(Matrix(e1.states[static_cast<size_t>(i)].matrix() -
                                    e2.states[static_cast<size_t>(i)].matrix()));
  }
  out.eps = std::max(1.0 - avg_f, 0.0);
  out.eps_prime = avg_tn;
  out.chi1 = holevo_chi(e1);
  out.chi2 = holevo_chi(e2);
  const double lhs = std::abs(out.chi1 - out.chi2);

  out.fidelity_bound.name = "holevo_continuity_fidelity";
  out.fidelity_bound.inputs_digest = digest;
  out.fidelity_bound.lhs = lhs;
  out.fidelity_bound.details = {{"eps", out.eps}, {"dim", d}};
  if (out.eps > 1.0 / 16.0) {
    out.fidelity_bound.status = BoundReport::Status::PreconditionUnmet;
    out.fidelity_bound.rhs = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double se = std::sqrt(out.eps);
    out.fidelity_bound.rhs = 4.0 * (se * std::log2(d) - se * xlog2(2.0 * se));
    out.fidelity_bound = finish(std::move(out.fidelity_bound));
  }

  out.trace_norm_bound.name = "holevo_continuity_trace_norm";
  out.trace_norm_bound.inputs_digest = digest;
  out.trace_norm_bound.lhs = lhs;
  out.trace_norm_bound.details = {{"eps_prime", out.eps_prime}, {"dim", d}};
  if (out.eps_prime > 0.5) {
    out.trace_norm_bound.status = BoundReport::Status::PreconditionUnmet;
    out.trace_norm_bound.rhs = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.trace_norm_bound.rhs =
        2.0 * (out.eps_prime * std::log2(d) - out.eps_prime * xlog2(out.eps_prime));
    out.trace_norm_bound = finish(std::move(out.trace_norm_bound));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Product-marginal bound
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> position_marginals(const CqJoint& state) {
  const int n = static_cast<int>(state.alphabet_sizes.size());
  std::vector<std::vector<double>> marg(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    marg[static_cast<size_t>(k)].assign(static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(k)]), 0.0);
  for (size_t idx = 0; idx < state.joint.size(); ++idx) {
    size_t rem = idx;
    for (int k = n - 1; k >= 0; --k) {
      const auto sz = static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(k)]);
      marg[static_cast<size_t>(k)][rem % sz] += state.joint[idx];
      rem /= sz;
    }
  }
  return marg;
}

}  // namespace

BoundReport check_product_mi_bound(const CqJoint& state, const std::string& digest) {
  const int n = static_cast<int>(state.alphabet_sizes.size());
  require(n >= 1, "check_product_mi_bound: empty alphabet list");
  size_t total = 1;
  for (int sz : state.alphabet_sizes) {
    require(sz >= 1, "check_product_mi_bound: bad alphabet size");
    total *= static_cast<size_t>(sz);
  }
  require(state.joint.size() == total && state.states.size() == total,
          "check_product_mi_bound: joint/states size mismatch");

  const auto marg = position_marginals(state);
  for (size_t idx = 0; idx < total; ++idx) {
    double prod = 1.0;
    size_t rem = idx;
    for (int k = n - 1; k >= 0; --k) {
      const auto sz = static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(k)]);
      prod *= marg[static_cast<size_t>(k)][rem % sz];
      rem /= sz;
    }
    require(std::abs(prod - state.joint[idx]) <= 1e-10,
            "check_product_mi_bound: classical marginal is not a product");
  }

  // lhs: Holevo quantity of {rho_I; p_I}.
  std::vector<DensityOperator> states = state.states;
  MixedEnsemble full(std::move(states), state.joint);
  const double lhs = holevo_chi(full);

  // rhs: n max_k of the average single-position Holevo quantity.
  const Eigen::Index d = state.states.front().dim();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<size_t> strides(static_cast<size_t>(n));
  {
    size_t acc = 1;
    for (int k = n - 1; k >= 0; --k) {
      strides[static_cast<size_t>(k)] = acc;
      acc *= static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(k)]);
    }
  }
  for (int k = 0; k < n; ++k) {
    const auto sz_k = static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(k)]);
    double sum = 0.0;
    // Enumerate the complement indices by skipping position k.
    const size_t rest_total = total / sz_k;
    for (size_t rest = 0; rest < rest_total; ++rest) {
      // Rebuild the full index with i_k = 0 from the complement enumeration.
      size_t base = 0;
      size_t rem = rest;
      for (int pos = n - 1; pos >= 0; --pos) {
        if (pos == k) continue;
        const auto sz = static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(pos)]);
        base += (rem % sz) * strides[static_cast<size_t>(pos)];
        rem /= sz;
      }
      Matrix mix = Matrix::Zero(d, d);
      double avg_entropy = 0.0;
      for (size_t ik = 0; ik < sz_k; ++ik) {
        const size_t idx = base + ik * strides[static_cast<size_t>(k)];
        const double pk = marg[static_cast<size_t>(k)][ik];
        mix += pk * state.states[idx].matrix();
        avg_entropy += pk * von_neumann_entropy(state.states[idx]);
      }
      // Complement weight: product of the other marginals.
      double w = 1.0;
      rem = rest;
      for (int pos = n - 1; pos >= 0; --pos) {
        if (pos == k) continue;
        const auto sz = static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(pos)]);
        w *= marg[static_cast<size_t>(pos)][rem % sz];
        rem /= sz;
      }
      sum += w * (von_neumann_entropy(DensityOperator(mix)) - avg_entropy);
    }
    best = std::max(best, sum);
  }

  BoundReport r;
  r.name = "product_mi_bound";
  r.inputs_digest = digest;
  r.lhs = lhs;
  r.rhs = n * best;
  r.details = {{"positions", static_cast<double>(n)}};
  return finish(std::move(r));
}

// ---------------------------------------------------------------------------
// Markov tail
// ---------------------------------------------------------------------------

BoundReport check_markov_tail(std::span<const double> values,
                              std::span<const double> probs, double a, double eps,
                              const std::string& digest) {
  require(values.size() == probs.size() && !values.empty(),
          "check_markov_tail: values/probs mismatch");
  require(a > 0.0 && eps > 0.0, "check_markov_tail: A and eps must be positive");
  double mean = 0.0, mass = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    require(values[i] >= -1e-12 && values[i] <= 1.0 + 1e-12,
            "check_markov_tail: values must lie in [0,1]");
    require(probs[i] >= -1e-12, "check_markov_tail: negative probability");
    mean += values[i] * probs[i];
    mass += probs[i];
  }
  require(std::abs(mass - 1.0) <= 1e-9, "check_markov_tail: probabilities must sum to 1");

  BoundReport r;
  r.name = "markov_tail";
  r.inputs_digest = digest;
  r.details = {{"mean", mean}, {"A", a}, {"eps", eps}};
  if (mean <= 1.0 - eps - 1e-12) {
    r.status = BoundReport::Status::PreconditionUnmet;
    r.lhs = std::numeric_limits<double>::quiet_NaN();
    r.rhs = 1.0 / a;
    return r;
  }
  double tail = 0.0;
  const double cut = 1.0 - a * eps;
  for (size_t i = 0; i < values.size(); ++i)
    if (values[i] < cut) tail += probs[i];
  r.lhs = tail;
  r.rhs = 1.0 / a;
  return finish(std::move(r));
}

// ---------------------------------------------------------------------------
// Typical-sequence mass
// ---------------------------------------------------------------------------

namespace {

double type_mass(std::span<const double> dist, int n, double eps) {
  const int symbols = static_cast<int>(dist.size());
  const double window = symbols * std::sqrt(static_cast<double>(n)) / std::sqrt(eps);
  double mass = 0.0;
  std::vector<int> counts(static_cast<size_t>(symbols), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == symbols - 1) {
      counts[static_cast<size_t>(pos)] = left;
      for (int a = 0; a < symbols; ++a)
        if (std::abs(counts[static_cast<size_t>(a)] - n * dist[static_cast<size_t>(a)]) >= window)
          return;
      double log_term = std::lgamma(n + 1.0);
      for (int a = 0; a < symbols; ++a) {
        log_term -= std::lgamma(counts[static_cast<size_t>(a)] + 1.0);
        if (counts[static_cast<size_t>(a)] > 0) {
          if (dist[static_cast<size_t>(a)] <= 0.0) return;  // impossible type
          log_term += counts[static_cast<size_t>(a)] * std::log(dist[static_cast<size_t>(a)]);
        }
      }
      mass += std::exp(log_term);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[static_cast<size_t>(pos)] = c;
      rec(pos + 1, left - c);
    }
  };
  if (symbols == 1) {
    // Single-symbol alphabet: the one string is always within the window.
    return 1.0;
  }
  rec(0, n);
  return std::min(mass, 1.0);
}

}  // namespace

TypicalMassReport typical_set_mass(std::span<const double> dist, int n, double eps) {
  require(!dist.empty() && dist.size() <= 4, "typical_set_mass: need 1..4 symbols");
  require(n >= 1 && n <= 64, "typical_set_mass: length out of range");
  require(eps > 0.0, "typical_set_mass: eps must be positive");
  double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  require(std::abs(total - 1.0) <= 1e-9, "typical_set_mass: distribution must sum to 1");

  TypicalMassReport out;
  out.mass_by_n.reserve(static_cast<size_t>(n));
  for (int m = 1; m <= n; ++m) out.mass_by_n.push_back(type_mass(dist, m, eps));
  out.mass = out.mass_by_n.back();
  out.n0 = -1;
  for (int m = n; m >= 1; --m) {
    if (out.mass_by_n[static_cast<size_t>(m - 1)] > 1.0 - eps)
      out.n0 = m;
    else
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Information-disturbance sweeps
// ---------------------------------------------------------------------------

KrausChannel controlled_rotation_leak(double t) {
  Matrix k0 = Matrix::Zero(2, 2);
  Matrix k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::cos(t);
  k1(1, 1) = std::sin(t);
  return KrausChannel({k0, k1});
}

DisturbanceCurve info_disturbance_sweep(
    const Ensemble& e, const std::function<KrausChannel(double)>& family,
    std::vector<double> grid, const std::string& family_name) {
  require(decompose(e).irreducible(),
          "info_disturbance_sweep: input source must be irreducible");
  std::sort(grid.begin(), grid.end());
  if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);

  DisturbanceCurve curve;
  curve.family = family_name;
  for (double t : grid) {
    const KrausChannel c = family(t);
    require(c.in_dim() == e.dim(), "info_disturbance_sweep: family dimension mismatch");
    double avg_f = 0.0;
    std::vector<DensityOperator> envs;
    for (int i = 0; i < e.size(); ++i) {
      const auto& psi = e.states[static_cast<size_t>(i)];
      avg_f += e.probs[static_cast<size_t>(i)] * fidelity(psi, apply(c, DensityOperator::pure(psi)));
      envs.push_back(environment_state(c, psi));
    }
    const double chi = holevo_chi(MixedEnsemble(std::move(envs), e.probs));
    curve.points.push_back({t, std::max(1.0 - avg_f, 0.0), std::max(chi, 0.0)});
  }
  return curve;
}

DisturbanceFit fit_disturbance_envelope(const DisturbanceCurve& curve) {
  // Work in (x, g) with x = log2(1/sqrt(eps)), g = chi/sqrt(eps): the model
  // becomes the line g = A + B x. Candidate lines through point pairs are
  // screened for upper-bounding the data; the best by squared chi-residual
  // wins.
  std::vector<double> xs, gs, se;
  for (const auto& p : curve.points) {
    if (p.eps <= 0.0 || p.chi_env < 0.0) continue;
    const double s = std::sqrt(p.eps);
    xs.push_back(std::log2(1.0 / s));
    gs.push_back(p.chi_env / s);
    se.push_back(s);
  }
  require(xs.size() >= 2, "fit_disturbance_envelope: need at least two nonzero points");

  DisturbanceFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  bool found = false;
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = i + 1; j < xs.size(); ++j) {
      if (std::abs(xs[i] - xs[j]) < 1e-12) continue;
      const double b = (gs[i] - gs[j]) / (xs[i] - xs[j]);
      const double a = gs[i] - b * xs[i];
      bool upper = true;
      double sse = 0.0, max_rel = 0.0;
      for (size_t p = 0; p < xs.size(); ++p) {
        const double fit_chi = (a + b * xs[p]) * se[p];
        const double chi = gs[p] * se[p];
        if (fit_chi < chi - 1e-12) {
          upper = false;
          break;
        }
        sse += (fit_chi - chi) * (fit_chi - chi);
        if (chi > 0.0) max_rel = std::max(max_rel, (fit_chi - chi) / chi);
      }
      if (upper && sse < best_sse) {
        best_sse = sse;
        best = {a, b, max_rel, std::sqrt(sse / static_cast<double>(xs.size()))};
        found = true;
      }
    }
  }
  require(found, "fit_disturbance_envelope: no upper-bounding line found");
  return best;
}

PerLetterTable per_letter_info_sweep(std::span<const SchemeReport> family) {
  PerLetterTable table;
  for (const auto& r : family)
    table.rows.push_back({r.n, r.eps, r.mutual_info_bits, r.info_per_signal});
  for (size_t i = 1; i < table.rows.size(); ++i) {
    const auto& prev = table.rows[i - 1];
    const auto& cur = table.rows[i];
    if (cur.eps < prev.eps - 1e-12 && cur.info_per_signal > prev.info_per_signal + 1e-9)
      table.monotone = false;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Scheme resource bound and chi monotonicity
// ---------------------------------------------------------------------------

BoundReport check_rate_info_bound(const SchemeReport& report, int k) {
  BoundReport r;
  r.name = "rate_info_bound";
  r.tolerance = 1e-8;
  r.lhs = report.avg_supp + report.info_per_signal;
  const double eps = std::max(report.eps, 0.0);
  const double se = std::sqrt(eps);
  const double log_k = std::log2(static_cast<double>(k));
  r.rhs = report.source_entropy - 4.0 * se * log_k +
          (4.0 * se / report.n) * xlog2(2.0 * se);
  r.details = {{"eps", eps},
               {"entropy", report.source_entropy},
               {"n", static_cast<double>(report.n)}};
  // Direction: lhs >= rhs, so the satisfaction margin is lhs - rhs.
  r.slack = r.lhs - r.rhs;
  r.status =
      r.slack >= -r.tolerance ? BoundReport::Status::Pass : BoundReport::Status::Fail;
  return r;
}

BoundReport check_chi_monotonicity(const Ensemble& e, const KrausChannel& c,
                                   const std::string& digest) {
  require(c.in_dim() == e.dim(), "check_chi_monotonicity: dimension mismatch");
  std::vector<DensityOperator> outputs;
  for (const auto& s : e.states) outputs.push_back(apply(c, DensityOperator::pure(s)));
  BoundReport r;
  r.name = "chi_monotonicity";
  r.inputs_digest = digest;
  r.lhs = holevo_chi(MixedEnsemble(std::move(outputs), e.probs));
  r.rhs = holevo_chi(e);
  return finish(std::move(r));
}

// ---------------------------------------------------------------------------
// Randomized sweeps
// ---------------------------------------------------------------------------

namespace {

void tally(SweepSummary& s, const BoundReport& r) {
  s.reports.push_back(r);
  switch (r.status) {
    case BoundReport::Status::Pass:
      s.min_slack = std::min(s.min_slack, r.slack);
      break;
    case BoundReport::Status::Fail:
      s.min_slack = std::min(s.min_slack, r.slack);
      ++s.violations;
      break;
    case BoundReport::Status::PreconditionUnmet:
      ++s.precondition_unmet;
      break;
  }
}

}  // namespace

SweepSummary sweep_holevo_continuity(int trials, std::uint64_t seed,
                                     std::span<const int> dims) {
  SweepSummary summary;
  summary.check = "chi-continuity";
  summary.seed = seed;
  summary.trials = trials;
  summary.min_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
    const int d = dims[static_cast<size_t>(trial) % dims.size()];
    std::uniform_int_distribution<int> nk(2, 4);
    const int k = nk(rng);
    MixedEnsemble e1 = random_mixed_ensemble(rng, d, k);
    // Mix a small random contamination into each state: keeps eps <= 1/16.
    std::uniform_real_distribution<double> mix(0.0, 0.03);
    std::vector<DensityOperator> perturbed;
    for (const auto& s : e1.states) {
      const double t = mix(rng);
      const DensityOperator noise = random_density(rng, d);
      perturbed.emplace_back(Matrix((1.0 - t) * s.matrix() + t * noise.matrix()));
    }
    MixedEnsemble e2(std::move(perturbed), e1.probs);
    const auto rep = check_holevo_continuity(e1, e2, "trial:" + std::to_string(trial));
    tally(summary, rep.fidelity_bound);
  }
  return summary;
}

SweepSummary sweep_product_mi_bound(int trials, std::uint64_t seed) {
  SweepSummary summary;
  summary.check = "product-mi";
  summary.seed = seed;
  summary.trials = trials;
  summary.min_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> npos(2, 3);
    std::uniform_int_distribution<int> nsym(2, 3);
    std::uniform_int_distribution<int> ndim(2, 4);
    const int n = npos(rng);
    const int d = ndim(rng);
    CqJoint state;
    size_t total = 1;
    std::vector<std::vector<double>> dists;
    for (int kk = 0; kk < n; ++kk) {
      const int sz = nsym(rng);
      state.alphabet_sizes.push_back(sz);
      dists.push_back(random_distribution(rng, sz));
      total *= static_cast<size_t>(sz);
    }
    state.joint.resize(total);
    for (size_t idx = 0; idx < total; ++idx) {
      double p = 1.0;
      size_t rem = idx;
      for (int kk = n - 1; kk >= 0; --kk) {
        const auto sz = static_cast<size_t>(state.alphabet_sizes[static_cast<size_t>(kk)]);
        p *= dists[static_cast<size_t>(kk)][rem % sz];
        rem /= sz;
      }
      state.joint[idx] = p;
      state.states.push_back(random_density(rng, d));
    }
    tally(summary, check_product_mi_bound(state, "trial:" + std::to_string(trial)));
  }
  return summary;
}

SweepSummary sweep_chi_monotonicity(int trials, std::uint64_t seed) {
  SweepSummary summary;
  summary.check = "chi-monotonicity";
  summary.seed = seed;
  summary.trials = trials;
  summary.min_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> ndim(2, 4);
    std::uniform_int_distribution<int> nstates(2, 5);
    std::uniform_int_distribution<int> nkraus(1, 4);
    const int d = ndim(rng);
    const Ensemble e = random_ensemble(rng, d, nstates(rng));
    const KrausChannel c = random_channel(rng, d, ndim(rng), nkraus(rng));
    tally(summary, check_chi_monotonicity(e, c, "trial:" + std::to_string(trial)));
  }
  return summary;
}

SweepSummary sweep_markov_tail(int trials, std::uint64_t seed) {
  SweepSummary summary;
  summary.check = "markov";
  summary.seed = seed;
  summary.trials = trials;
  summary.min_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> npts(2, 8);
    std::uniform_real_distribution<double> low(0.0, 1.0);
    const int pts = npts(rng);
    std::vector<double> values(static_cast<size_t>(pts));
    for (auto& v : values) v = 1.0 - 0.25 * low(rng) * low(rng);
    std::vector<double> probs = random_distribution(rng, pts);
    double mean = 0.0;
    for (int i = 0; i < pts; ++i) mean += values[static_cast<size_t>(i)] * probs[static_cast<size_t>(i)];
    const double eps = std::max(1.0 - mean, 1e-12) * (1.0 + 1e-9) + 1e-15;
    const double a = 1.0 / std::sqrt(eps);  // special case Prob(X < 1-sqrt(eps)) < sqrt(eps)
    tally(summary, check_markov_tail(values, probs, a, eps,
                                     "trial:" + std::to_string(trial)));
  }
  return summary;
}

}  // namespace qsrc
