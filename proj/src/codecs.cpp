#include "qsrc/codecs.hpp"

#include "qsrc/parallel.hpp"
#include "qsrc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsrc {

namespace {

constexpr std::uint64_t kSaturated = 1ull << 62;
constexpr std::uint64_t kMaxLatticeStates = 2000000;
constexpr std::uint64_t kMaxMaterialized = 1u << 20;
constexpr std::uint64_t kMcChunk = 1024;
constexpr double kSupportRelTol = 1e-12;
constexpr double kTieLogTol = 1e-9;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return (a >= kSaturated || b >= kSaturated || a + b >= kSaturated) ? kSaturated : a + b;
}

// Multinomial coefficient n! / prod counts[a]!, saturating at 2^62.
std::uint64_t multinomial(std::span<const int> counts) {
  unsigned __int128 acc = 1;
  int seen = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      acc = acc * static_cast<unsigned>(++seen) / static_cast<unsigned>(i);
      if (acc >= kSaturated) return kSaturated;
    }
  }
  return static_cast<std::uint64_t>(acc);
}

void enumerate_compositions(int total, int parts,
                            const std::function<void(std::span<const int>)>& emit) {
  std::vector<int> counts(static_cast<size_t>(parts), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      counts[static_cast<size_t>(pos)] = left;
      emit(counts);
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[static_cast<size_t>(pos)] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, total);
}

// All componentwise sub-vectors 0 <= c <= bound.
void enumerate_subvectors(std::span<const int> bound,
                          const std::function<void(std::span<const int>)>& emit) {
  std::vector<int> c(bound.size(), 0);
  std::function<void(size_t)> rec = [&](size_t pos) {
    if (pos == bound.size()) {
      emit(c);
      return;
    }
    for (int v = 0; v <= bound[pos]; ++v) {
      c[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
}

std::uint64_t composition_count(int total, int parts) {
  // C(total + parts - 1, parts - 1), saturating.
  unsigned __int128 acc = 1;
  for (int i = 1; i < parts; ++i) {
    acc = acc * static_cast<unsigned>(total + i) / static_cast<unsigned>(i);
    if (acc >= kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(acc);
}

// Lex-smallest member of a type: symbol 0 repeated counts[0] times, then 1, ...
std::vector<int> first_member(const TypeClass& t) {
  std::vector<int> s;
  for (size_t a = 0; a < t.counts.size(); ++a)
    s.insert(s.end(), static_cast<size_t>(t.counts[a]), static_cast<int>(a));
  return s;
}

// The rank-th (0-based) lex member of a type.
std::vector<int> unrank_member(const TypeClass& t, std::uint64_t rank) {
  require(t.strings < kSaturated, "typical set boundary class too large to index");
  require(rank < t.strings, "unrank_member: rank out of range");
  std::vector<int> counts = t.counts;
  const int n = static_cast<int>(std::accumulate(counts.begin(), counts.end(), 0));
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n));
  for (int m = 0; m < n; ++m) {
    for (int a = 0; a < static_cast<int>(counts.size()); ++a) {
      if (counts[static_cast<size_t>(a)] == 0) continue;
      --counts[static_cast<size_t>(a)];
      const std::uint64_t below = multinomial(counts);
      if (rank < below) {
        out.push_back(a);
        break;
      }
      rank -= below;
      ++counts[static_cast<size_t>(a)];
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TypicalSet
// ---------------------------------------------------------------------------

namespace {

std::vector<TypeClass> all_types(const Eigen::VectorXd& eigvals, int n) {
  const int s = static_cast<int>(eigvals.size());
  require(s >= 1 && n >= 1, "TypicalSet: empty alphabet or length");
  require(composition_count(n, s) <= kMaxLatticeStates,
          "TypicalSet: too many frequency types at this (n, dim)");
  std::vector<double> logs(static_cast<size_t>(s));
  for (int a = 0; a < s; ++a) logs[static_cast<size_t>(a)] = std::log2(eigvals[a]);
  std::vector<TypeClass> types;
  enumerate_compositions(n, s, [&](std::span<const int> counts) {
    TypeClass t;
    t.counts.assign(counts.begin(), counts.end());
    t.log2_weight = 0.0;
    for (int a = 0; a < s; ++a) t.log2_weight += counts[static_cast<size_t>(a)] * logs[static_cast<size_t>(a)];
    t.strings = multinomial(counts);
    types.push_back(std::move(t));
  });
  return types;
}

}  // namespace

TypicalSet TypicalSet::top_strings(const Eigen::VectorXd& support_eigvals, int n,
                                   std::uint64_t m) {
  require(m >= 1, "TypicalSet: empty set rejected");
  TypicalSet set;
  set.n_ = n;
  set.s_ = static_cast<int>(support_eigvals.size());

  std::vector<TypeClass> types = all_types(support_eigvals, n);
  std::sort(types.begin(), types.end(), [](const TypeClass& a, const TypeClass& b) {
    if (a.log2_weight != b.log2_weight) return a.log2_weight > b.log2_weight;
    return a.counts > b.counts;  // lex-smallest member first
  });

  std::uint64_t left = m;
  size_t i = 0;
  while (i < types.size() && left > 0) {
    // Tie group: types whose products agree within tolerance.
    size_t j = i;
    std::uint64_t group = 0;
    while (j < types.size() &&
           std::abs(types[j].log2_weight - types[i].log2_weight) <= kTieLogTol) {
      group = sat_add(group, types[j].strings);
      ++j;
    }
    if (group <= left) {
      for (size_t t = i; t < j; ++t) set.full_.push_back(types[t]);
      set.total_ = sat_add(set.total_, group);
      left -= group;
    } else if (j - i == 1) {
      // Cut inside a single class: a lex prefix of its members.
      Partial p{types[i], unrank_member(types[i], left), left};
      set.total_ = sat_add(set.total_, left);
      set.partials_.push_back(std::move(p));
      left = 0;
    } else {
      // Cut inside a group of tied classes: members interleave in lex order,
      // so merge them explicitly and split the prefix per class.
      require(group <= kMaxMaterialized,
              "TypicalSet: tie group too large to cut deterministically");
      std::vector<std::pair<std::vector<int>, size_t>> pool;  // (member, type idx)
      for (size_t t = i; t < j; ++t) {
        std::vector<int> member = first_member(types[t]);
        do {
          pool.emplace_back(member, t);
        } while (std::next_permutation(member.begin(), member.end()));
      }
      std::sort(pool.begin(), pool.end());
      const std::vector<int>& boundary = pool[static_cast<size_t>(left)].first;
      std::vector<std::uint64_t> taken(j - i, 0);
      for (std::uint64_t r = 0; r < left; ++r) ++taken[pool[static_cast<size_t>(r)].second - i];
      for (size_t t = i; t < j; ++t) {
        if (taken[t - i] == 0) continue;
        set.partials_.push_back({types[t], boundary, taken[t - i]});
        set.total_ = sat_add(set.total_, taken[t - i]);
      }
      left = 0;
    }
    i = j;
  }
  set.full_space_ = (i == types.size() && set.partials_.empty());
  require(set.total_ >= 1, "TypicalSet: empty set rejected");
  return set;
}

TypicalSet TypicalSet::frequency_window(const Eigen::VectorXd& support_eigvals, int n,
                                        double eps_typ) {
  require(eps_typ > 0.0, "TypicalSet: typicality parameter must be positive");
  TypicalSet set;
  set.n_ = n;
  set.s_ = static_cast<int>(support_eigvals.size());
  const double window =
      set.s_ * std::sqrt(static_cast<double>(n)) / std::sqrt(eps_typ);
  std::vector<TypeClass> types = all_types(support_eigvals, n);
  bool all = true;
  for (auto& t : types) {
    bool inside = true;
    for (int a = 0; a < set.s_; ++a) {
      if (std::abs(t.counts[static_cast<size_t>(a)] - n * support_eigvals[a]) >= window) {
        inside = false;
        break;
      }
    }
    if (inside) {
      set.total_ = sat_add(set.total_, t.strings);
      set.full_.push_back(std::move(t));
    } else {
      all = false;
    }
  }
  require(!set.full_.empty(), "TypicalSet: typicality window selects no strings");
  set.full_space_ = all;
  return set;
}

bool TypicalSet::contains_leading_string() const {
  for (const auto& t : full_)
    if (t.counts[0] == n_) return true;
  for (const auto& p : partials_)
    if (p.type.counts[0] == n_ && p.taken >= 1) return true;
  return false;
}

double TypicalSet::weighted_sum(const std::vector<double>& weights) const {
  require(weights.size() == static_cast<size_t>(n_) * static_cast<size_t>(s_),
          "weighted_sum: weight table has wrong shape");

  double total = 0.0;

  if (!full_.empty()) {
    // Forward DP over count vectors; g[level m][state] sums prefix products.
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> states{std::vector<int>(static_cast<size_t>(s_), 0)};
    std::vector<double> g{1.0};
    for (int m = 0; m < n_; ++m) {
      std::map<std::vector<int>, int> next_index;
      std::vector<std::vector<int>> next_states;
      std::vector<double> next_g;
      for (size_t st = 0; st < states.size(); ++st) {
        for (int a = 0; a < s_; ++a) {
          std::vector<int> c = states[st];
          ++c[static_cast<size_t>(a)];
          auto [it, fresh] = next_index.emplace(c, static_cast<int>(next_states.size()));
          if (fresh) {
            next_states.push_back(std::move(c));
            next_g.push_back(0.0);
          }
          next_g[static_cast<size_t>(it->second)] +=
              g[st] * weights[static_cast<size_t>(m) * s_ + static_cast<size_t>(a)];
        }
      }
      states = std::move(next_states);
      g = std::move(next_g);
      index = std::move(next_index);
    }
    for (const auto& t : full_) {
      auto it = index.find(t.counts);
      if (it != index.end()) total += g[static_cast<size_t>(it->second)];
    }
  }

  for (const auto& p : partials_) {
    // Completion sums B[c] over all arrangements of remaining counts c placed
    // at the trailing |c| positions; indexed densely by mixed radix.
    const auto& cstar = p.type.counts;
    std::vector<int> stride(static_cast<size_t>(s_));
    int buf = 1;
    for (int a = s_ - 1; a >= 0; --a) {
      stride[static_cast<size_t>(a)] = buf;
      buf *= cstar[static_cast<size_t>(a)] + 1;
    }
    auto flat = [&](std::span<const int> c) {
      int f = 0;
      for (int a = 0; a < s_; ++a) f += c[static_cast<size_t>(a)] * stride[static_cast<size_t>(a)];
      return f;
    };
    std::vector<double> B(static_cast<size_t>(buf), 0.0);
    std::vector<std::vector<std::vector<int>>> by_sum(static_cast<size_t>(n_) + 1);
    enumerate_subvectors(cstar, [&](std::span<const int> c) {
      int sum = std::accumulate(c.begin(), c.end(), 0);
      by_sum[static_cast<size_t>(sum)].emplace_back(c.begin(), c.end());
    });
    B[0] = 1.0;
    for (int r = 1; r <= n_; ++r) {
      for (const auto& c : by_sum[static_cast<size_t>(r)]) {
        const int m = n_ - r;  // position where this completion begins
        double v = 0.0;
        for (int a = 0; a < s_; ++a) {
          if (c[static_cast<size_t>(a)] == 0) continue;
          v += weights[static_cast<size_t>(m) * s_ + static_cast<size_t>(a)] *
               B[static_cast<size_t>(flat(c) - stride[static_cast<size_t>(a)])];
        }
        B[static_cast<size_t>(flat(c))] = v;
      }
    }

    // Walk the boundary string, branching below it at every position.
    std::vector<int> counts = cstar;
    double acc = 1.0;
    for (int m = 0; m < n_; ++m) {
      const int bsym = p.boundary[static_cast<size_t>(m)];
      for (int a = 0; a < bsym; ++a) {
        if (counts[static_cast<size_t>(a)] == 0) continue;
        --counts[static_cast<size_t>(a)];
        total += acc * weights[static_cast<size_t>(m) * s_ + static_cast<size_t>(a)] *
                 B[static_cast<size_t>(flat(counts))];
        ++counts[static_cast<size_t>(a)];
      }
      if (bsym >= s_ || counts[static_cast<size_t>(bsym)] == 0) break;
      acc *= weights[static_cast<size_t>(m) * s_ + static_cast<size_t>(bsym)];
      --counts[static_cast<size_t>(bsym)];
    }
  }

  return total;
}

std::vector<std::vector<int>> TypicalSet::members(std::uint64_t cap) const {
  require(total_ <= cap, "TypicalSet::members: set too large to materialize");
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<size_t>(total_));
  for (const auto& t : full_) {
    std::vector<int> member = first_member(t);
    do {
      out.push_back(member);
    } while (std::next_permutation(member.begin(), member.end()));
  }
  for (const auto& p : partials_) {
    std::vector<int> member = first_member(p.type);
    do {
      if (member < p.boundary) out.push_back(member);
    } while (std::next_permutation(member.begin(), member.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SchumacherCodec
// ---------------------------------------------------------------------------

SchumacherCodec::SchumacherCodec(Ensemble source, int n, SchumacherOptions options)
    : source_(std::move(source)), n_(n), options_(std::move(options)) {
  require(n_ >= 1, "SchumacherCodec: block length must be >= 1");
  require(options_.rate.has_value() != options_.eps_typ.has_value(),
          "SchumacherCodec: set exactly one of rate and eps_typ");

  EigenSystem es = eigh(density(source_).matrix());
  const Eigen::Index d = source_.dim();
  std::vector<Eigen::Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return es.values[a] > es.values[b]; });

  const double cutoff = kSupportRelTol * std::max(es.values.maxCoeff(), 0.0);
  Eigen::Index s = 0;
  while (s < d && es.values[order[static_cast<size_t>(s)]] > cutoff) ++s;
  require(s >= 1, "SchumacherCodec: source density has empty support");

  basis_.resize(d, s);
  eigvals_.resize(s);
  for (Eigen::Index a = 0; a < s; ++a) {
    basis_.col(a) = es.vectors.col(order[static_cast<size_t>(a)]);
    eigvals_[a] = std::max(es.values[order[static_cast<size_t>(a)]], 0.0);
  }

  overlap_.assign(static_cast<size_t>(source_.size()) * static_cast<size_t>(s), 0.0);
  for (int i = 0; i < source_.size(); ++i) {
    for (Eigen::Index a = 0; a < s; ++a) {
      const Complex ov = basis_.col(a).dot(source_.states[static_cast<size_t>(i)].amplitudes());
      overlap_[static_cast<size_t>(i) * static_cast<size_t>(s) + static_cast<size_t>(a)] =
          std::norm(ov);
    }
  }

  if (options_.rate) {
    double rate = *options_.rate;
    require(rate >= 0.0, "SchumacherCodec: negative rate rejected");
    // Rates above log2 k cannot enlarge the support product; cap silently.
    rate = std::min(rate, std::log2(static_cast<double>(d)));
    const double qubits = static_cast<double>(n_) * rate;
    const int exponent = std::min(static_cast<int>(std::floor(qubits)), 62);
    set_ = TypicalSet::top_strings(eigvals_, n_, std::uint64_t{1} << exponent);
  } else {
    set_ = TypicalSet::frequency_window(eigvals_, n_, *options_.eps_typ);
  }
}

double SchumacherCodec::success_probability(std::span<const int> digits) const {
  require(static_cast<int>(digits.size()) == n_, "success_probability: bad string length");
  const auto s = static_cast<size_t>(eigvals_.size());
  if (set_.covers_support()) {
    double q = 1.0;
    for (int m = 0; m < n_; ++m) {
      double row = 0.0;
      for (size_t a = 0; a < s; ++a)
        row += overlap_[static_cast<size_t>(digits[static_cast<size_t>(m)]) * s + a];
      q *= row;
    }
    return std::clamp(q, 0.0, 1.0);
  }
  std::vector<double> w(static_cast<size_t>(n_) * s);
  for (int m = 0; m < n_; ++m)
    for (size_t a = 0; a < s; ++a)
      w[static_cast<size_t>(m) * s + a] =
          overlap_[static_cast<size_t>(digits[static_cast<size_t>(m)]) * s + a];
  return std::clamp(set_.weighted_sum(w), 0.0, 1.0);
}

double SchumacherCodec::fallback_overlap(std::span<const int> digits) const {
  const auto s = static_cast<size_t>(eigvals_.size());
  double f = 1.0;
  for (int m = 0; m < n_; ++m)
    f *= overlap_[static_cast<size_t>(digits[static_cast<size_t>(m)]) * s];
  return f;
}

double SchumacherCodec::string_fidelity(std::span<const int> digits) const {
  const double q = success_probability(digits);
  return std::clamp(q * q + (1.0 - q) * fallback_overlap(digits), 0.0, 1.0);
}

double SchumacherCodec::support_per_signal() const {
  std::uint64_t rank = set_.size();
  require(rank < kSaturated, "support_per_signal: typical set size saturated");
  if (!set_.contains_leading_string()) rank += 1;  // fallback state adds a ray
  double qubits = std::log2(static_cast<double>(rank));
  if (options_.ceil_support) qubits = std::ceil(qubits);
  return qubits / n_;
}

// ---------------------------------------------------------------------------
// Evaluation helpers
// ---------------------------------------------------------------------------

namespace {

struct Moments {
  double weight = 0.0;  // probability mass (exact) or sample count (MC)
  double sum = 0.0;
  double sum_sq = 0.0;
};

Moments fold(const std::vector<Moments>& parts) {
  Moments out;
  for (const auto& p : parts) {
    out.weight += p.weight;
    out.sum += p.sum;
    out.sum_sq += p.sum_sq;
  }
  return out;
}

// Next mixed-radix string in place; digits run over [0, k).
void advance_digits(std::vector<int>& digits, int k) {
  for (size_t m = digits.size(); m-- > 0;) {
    if (++digits[m] < k) return;
    digits[m] = 0;
  }
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

SchemeReport evaluate(const SchumacherCodec& codec, const EvalOptions& options) {
  const Ensemble& e = codec.source();
  const int n = codec.block_length();
  SchemeReport report;
  report.scheme = "schumacher";
  report.n = n;
  report.rate = codec.options().rate.value_or(nan_value());
  report.eps_typ = codec.options().eps_typ.value_or(nan_value());
  report.avg_supp = codec.support_per_signal();
  report.mutual_info_bits = 0.0;
  report.info_per_signal = 0.0;
  report.classical_bits = 0.0;
  report.source_entropy = entropy(e);
  report.signal_dim = static_cast<int>(e.dim());
  report.mode = options.mode;

  if (options.mode == EvalMode::Exact) {
    StringSource strings(e, n);
    if (strings.size() > kMaxEagerStringCount)
      throw std::length_error("evaluate: exact mode refused for K^n > 1e6");
    const auto parts = chunked_map<Moments>(
        strings.size(), 4096, options.jobs,
        [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
          Moments acc;
          std::vector<int> digits = strings.digits(begin);
          for (std::uint64_t idx = begin; idx < end; ++idx) {
            const double p = strings.prob(digits);
            acc.weight += p;
            acc.sum += p * codec.string_fidelity(digits);
            advance_digits(digits, e.size());
          }
          return acc;
        });
    const Moments m = fold(parts);
    report.avg_fidelity = m.sum / m.weight;
  } else {
    report.seed = options.seed;
    report.samples = options.samples;
    const auto parts = chunked_map<Moments>(
        options.samples, kMcChunk, options.jobs,
        [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
          Rng rng = derive_rng(options.seed, chunk);
          std::discrete_distribution<int> pick(e.probs.begin(), e.probs.end());
          Moments acc;
          std::vector<int> digits(static_cast<size_t>(n));
          for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& d : digits) d = pick(rng);
            const double f = codec.string_fidelity(digits);
            acc.weight += 1.0;
            acc.sum += f;
            acc.sum_sq += f * f;
          }
          return acc;
        });
    const Moments m = fold(parts);
    report.avg_fidelity = m.sum / m.weight;
    const double var =
        std::max(0.0, (m.sum_sq - m.sum * m.sum / m.weight) / std::max(m.weight - 1.0, 1.0));
    report.std_error = std::sqrt(var / m.weight);
  }
  report.avg_fidelity = std::clamp(report.avg_fidelity, 0.0, 1.0);
  report.eps = 1.0 - report.avg_fidelity;
  return report;
}

// ---------------------------------------------------------------------------
// HybridCodec
// ---------------------------------------------------------------------------

HybridCodec::HybridCodec(Ensemble source, int n, HybridOptions options)
    : source_(std::move(source)),
      n_(n),
      options_(std::move(options)),
      decomposition_(decompose(source_, options_.overlap_tol)) {
  require(n_ >= 1, "HybridCodec: block length must be >= 1");
  require(options_.eps_typ > 0.0, "HybridCodec: eps_typ must be positive");
  const int blocks = decomposition_.blocks();
  if (options_.block_rates)
    require(static_cast<int>(options_.block_rates->size()) == blocks,
            "HybridCodec: block_rates size does not match block count");

  label_of_.assign(static_cast<size_t>(source_.size()), -1);
  index_in_block_.assign(static_cast<size_t>(source_.size()), -1);
  for (int l = 0; l < blocks; ++l) {
    const auto& comp = decomposition_.components[static_cast<size_t>(l)];
    weights_.push_back(comp.weight);
    block_entropy_.push_back(entropy(comp.part));
    for (size_t pos = 0; pos < comp.members.size(); ++pos) {
      label_of_[static_cast<size_t>(comp.members[pos])] = l;
      index_in_block_[static_cast<size_t>(comp.members[pos])] = static_cast<int>(pos);
    }
    EigenSystem es = eigh(density(comp.part).matrix());
    Eigen::Index top = 0;
    es.values.maxCoeff(&top);
    block_fallback_.push_back(es.vectors.col(top));
  }
  cache_.assign(static_cast<size_t>(blocks),
                std::vector<std::optional<SchumacherCodec>>(static_cast<size_t>(n_) + 1));
}

double HybridCodec::block_qubits(int l, int m) const {
  if (m == 0) return 0.0;
  double qubits;
  if (options_.block_rates) {
    qubits = std::ceil(m * (*options_.block_rates)[static_cast<size_t>(l)]);
  } else {
    qubits = std::ceil(m * block_entropy_[static_cast<size_t>(l)] +
                       options_.budget_c * std::sqrt(static_cast<double>(m)));
  }
  return std::min(qubits, 62.0);
}

bool HybridCodec::label_type_typical(std::span<const int> label_counts) const {
  const int blocks = decomposition_.blocks();
  const double window =
      blocks * std::sqrt(static_cast<double>(n_)) / std::sqrt(options_.eps_typ);
  for (int l = 0; l < blocks; ++l) {
    if (std::abs(label_counts[static_cast<size_t>(l)] - n_ * weights_[static_cast<size_t>(l)]) >=
        window)
      return false;
  }
  return true;
}

const SchumacherCodec& HybridCodec::sub_codec(int l, int m) const {
  require(m >= 1 && m <= n_, "sub_codec: bad sub-block length");
  auto& slot = cache_[static_cast<size_t>(l)][static_cast<size_t>(m)];
  if (!slot) {
    // Exact qubit budget B realized as a rate whose floor lands on B.
    const double budget = block_qubits(l, m);
    SchumacherOptions sub;
    sub.rate = (budget + 0.5) / m;
    sub.ceil_support = false;
    slot.emplace(decomposition_.components[static_cast<size_t>(l)].part, m, sub);
  }
  return *slot;
}

double HybridCodec::block_fallback_avg(int l) const {
  const auto& comp = decomposition_.components[static_cast<size_t>(l)];
  double avg = 0.0;
  for (int i = 0; i < comp.part.size(); ++i) {
    avg += comp.part.probs[static_cast<size_t>(i)] *
           std::norm(block_fallback_[static_cast<size_t>(l)].dot(
               comp.part.states[static_cast<size_t>(i)].amplitudes()));
  }
  return avg;
}

double HybridCodec::signal_fallback_overlap(int i) const {
  const int l = label_of_[static_cast<size_t>(i)];
  return std::norm(block_fallback_[static_cast<size_t>(l)].dot(
      source_.states[static_cast<size_t>(i)].amplitudes()));
}

namespace {

// Exact per-type resource and fidelity accounting shared by both eval modes.
struct HybridTypeSums {
  double supp = 0.0;          // qubits/signal
  double fidelity = 0.0;      // exact average (only when exact requested)
  double typical_mass = 0.0;
};

HybridTypeSums hybrid_type_sums(const HybridCodec& codec, bool with_fidelity) {
  const int blocks = codec.blocks();
  const int n = codec.block_length();
  std::vector<double> log_a(static_cast<size_t>(blocks));
  for (int l = 0; l < blocks; ++l)
    log_a[static_cast<size_t>(l)] = std::log(codec.block_weights()[static_cast<size_t>(l)]);

  // Cached exact sub-codec fidelities and supports per (block, length).
  std::vector<std::vector<double>> sub_f(static_cast<size_t>(blocks),
                                         std::vector<double>(static_cast<size_t>(n) + 1, 1.0));
  std::vector<std::vector<double>> sub_bits(
      static_cast<size_t>(blocks), std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
  std::vector<std::vector<bool>> ready(static_cast<size_t>(blocks),
                                       std::vector<bool>(static_cast<size_t>(n) + 1, false));

  auto prepare = [&](int l, int m) {
    if (m == 0 || ready[static_cast<size_t>(l)][static_cast<size_t>(m)]) return;
    const SchumacherCodec& sub = codec.sub_codec(l, m);
    sub_bits[static_cast<size_t>(l)][static_cast<size_t>(m)] = sub.support_per_signal() * m;
    if (with_fidelity) {
      EvalOptions exact;
      exact.mode = EvalMode::Exact;
      sub_f[static_cast<size_t>(l)][static_cast<size_t>(m)] = evaluate(sub, exact).avg_fidelity;
    }
    ready[static_cast<size_t>(l)][static_cast<size_t>(m)] = true;
  };

  HybridTypeSums sums;
  enumerate_compositions(n, blocks, [&](std::span<const int> counts) {
    double logw = 0.0;
    for (int l = 0; l < blocks; ++l) logw += counts[static_cast<size_t>(l)] * log_a[static_cast<size_t>(l)];
    const double weight = static_cast<double>(multinomial(counts)) * std::exp(logw);
    if (codec.label_type_typical(counts)) {
      sums.typical_mass += weight;
      double bits = 0.0;
      double fid = 1.0;
      for (int l = 0; l < blocks; ++l) {
        const int m = counts[static_cast<size_t>(l)];
        prepare(l, m);
        if (m == 0) continue;
        bits += sub_bits[static_cast<size_t>(l)][static_cast<size_t>(m)];
        if (with_fidelity) fid *= sub_f[static_cast<size_t>(l)][static_cast<size_t>(m)];
      }
      sums.supp += weight * bits / n;
      if (with_fidelity) sums.fidelity += weight * fid;
    } else if (with_fidelity) {
      double fid = 1.0;
      for (int l = 0; l < blocks; ++l)
        fid *= std::pow(codec.block_fallback_avg(l), counts[static_cast<size_t>(l)]);
      sums.fidelity += weight * fid;
    }
  });
  return sums;
}

}  // namespace

SchemeReport evaluate(const HybridCodec& codec, const EvalOptions& options) {
  const Ensemble& e = codec.source();
  const int n = codec.block_length();
  const int blocks = codec.blocks();

  SchemeReport report;
  report.scheme = "hybrid";
  report.n = n;
  report.rate = nan_value();
  report.eps_typ = codec.options().eps_typ;
  report.source_entropy = entropy(e);
  report.signal_dim = static_cast<int>(e.dim());
  report.mode = options.mode;

  // The classical record is the label string, a deterministic function of the
  // input, so I(I:J) = H(J) = n H(a) for i.i.d. labels.
  const double label_entropy = shannon_entropy(codec.block_weights());
  report.classical_bits = label_entropy;
  report.mutual_info_bits = label_entropy * n;
  report.info_per_signal = label_entropy;

  const bool exact = options.mode == EvalMode::Exact;
  if (exact) {
    StringSource strings(e, n);
    if (strings.size() > kMaxEagerStringCount)
      throw std::length_error("evaluate: exact mode refused for K^n > 1e6");
  }
  const HybridTypeSums sums = hybrid_type_sums(codec, exact);
  report.avg_supp = sums.supp;
  if (codec.options().ceil_support) {
    // Whole-qubit accounting: round the per-type totals up.
    report.avg_supp = 0.0;
    std::vector<double> log_a(static_cast<size_t>(blocks));
    for (int l = 0; l < blocks; ++l)
      log_a[static_cast<size_t>(l)] = std::log(codec.block_weights()[static_cast<size_t>(l)]);
    enumerate_compositions(n, blocks, [&](std::span<const int> counts) {
      if (!codec.label_type_typical(counts)) return;
      double logw = 0.0;
      for (int l = 0; l < blocks; ++l)
        logw += counts[static_cast<size_t>(l)] * log_a[static_cast<size_t>(l)];
      const double weight = static_cast<double>(multinomial(counts)) * std::exp(logw);
      double bits = 0.0;
      for (int l = 0; l < blocks; ++l) {
        const int m = counts[static_cast<size_t>(l)];
        if (m == 0) continue;
        bits += codec.sub_codec(l, m).support_per_signal() * m;
      }
      report.avg_supp += weight * std::ceil(bits) / n;
    });
  }

  if (exact) {
    report.avg_fidelity = std::clamp(sums.fidelity, 0.0, 1.0);
  } else {
    report.seed = options.seed;
    report.samples = options.samples;
    const auto parts = chunked_map<Moments>(
        options.samples, kMcChunk, options.jobs,
        [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
          Rng rng = derive_rng(options.seed, chunk);
          std::discrete_distribution<int> pick(e.probs.begin(), e.probs.end());
          Moments acc;
          std::vector<int> signal(static_cast<size_t>(n));
          std::vector<int> label_counts(static_cast<size_t>(blocks));
          std::vector<std::vector<int>> per_block(static_cast<size_t>(blocks));
          for (std::uint64_t s = begin; s < end; ++s) {
            std::fill(label_counts.begin(), label_counts.end(), 0);
            for (auto& blk : per_block) blk.clear();
            for (int m = 0; m < n; ++m) {
              signal[static_cast<size_t>(m)] = pick(rng);
              const int i = signal[static_cast<size_t>(m)];
              const int l = codec.block_label_of_signal(i);
              ++label_counts[static_cast<size_t>(l)];
              per_block[static_cast<size_t>(l)].push_back(
                  codec.index_in_block(i));
            }
            double f = 1.0;
            if (codec.label_type_typical(label_counts)) {
              for (int l = 0; l < blocks; ++l) {
                if (per_block[static_cast<size_t>(l)].empty()) continue;
                const auto& sub = codec.sub_codec(
                    l, static_cast<int>(per_block[static_cast<size_t>(l)].size()));
                f *= sub.string_fidelity(per_block[static_cast<size_t>(l)]);
              }
            } else {
              for (int m = 0; m < n; ++m)
                f *= codec.signal_fallback_overlap(signal[static_cast<size_t>(m)]);
            }
            acc.weight += 1.0;
            acc.sum += f;
            acc.sum_sq += f * f;
          }
          return acc;
        });
    const Moments m = fold(parts);
    report.avg_fidelity = std::clamp(m.sum / m.weight, 0.0, 1.0);
    const double var =
        std::max(0.0, (m.sum_sq - m.sum * m.sum / m.weight) / std::max(m.weight - 1.0, 1.0));
    report.std_error = std::sqrt(var / m.weight);
  }
  report.eps = 1.0 - report.avg_fidelity;
  return report;
}

// ---------------------------------------------------------------------------
// Reference schemes
// ---------------------------------------------------------------------------

SchemeReport evaluate_measure_replace(const Ensemble& e, int n) {
  const auto k = static_cast<size_t>(e.dim());
  // Per-position joint distribution p(i, b) = p_i |<b|sigma_i>|^2.
  std::vector<double> pb(k, 0.0);
  double f1 = 0.0;
  double h_b_given_i = 0.0;
  for (int i = 0; i < e.size(); ++i) {
    const auto& amps = e.states[static_cast<size_t>(i)].amplitudes();
    const double pi = e.probs[static_cast<size_t>(i)];
    for (size_t b = 0; b < k; ++b) {
      const double w = std::norm(amps[static_cast<Eigen::Index>(b)]);
      pb[b] += pi * w;
      f1 += pi * w * w;
      if (w > 0.0) h_b_given_i -= pi * w * std::log2(w);
    }
  }
  const double h_b = shannon_entropy(pb);
  const double mi1 = std::max(h_b - h_b_given_i, 0.0);

  SchemeReport report;
  report.scheme = "measure_replace";
  report.n = n;
  report.rate = nan_value();
  report.eps_typ = nan_value();
  report.avg_fidelity = std::pow(f1, n);
  report.eps = 1.0 - report.avg_fidelity;
  report.avg_supp = 0.0;
  report.mutual_info_bits = mi1 * n;
  report.info_per_signal = mi1;
  report.classical_bits = h_b;
  report.source_entropy = entropy(e);
  report.signal_dim = static_cast<int>(e.dim());
  report.mode = EvalMode::Exact;
  return report;
}

SchemeReport identity_report(const Ensemble& e, int n) {
  SchemeReport report;
  report.scheme = "identity";
  report.n = n;
  report.rate = nan_value();
  report.eps_typ = nan_value();
  report.avg_fidelity = 1.0;
  report.eps = 0.0;
  const Eigen::VectorXd spectrum = density(e).spectrum();
  const double cutoff = 1e-9 * spectrum.maxCoeff();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    if (spectrum[i] > cutoff) ++rank;
  report.avg_supp = std::log2(static_cast<double>(std::max<Eigen::Index>(rank, 1)));
  report.mutual_info_bits = 0.0;
  report.info_per_signal = 0.0;
  report.classical_bits = 0.0;
  report.source_entropy = entropy(e);
  report.signal_dim = static_cast<int>(e.dim());
  report.mode = EvalMode::Exact;
  return report;
}

}  // namespace qsrc
