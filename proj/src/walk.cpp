#include "erw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "erw/errors.hpp"
#include "numeric_detail.hpp"

namespace erw {

std::string_view to_string(SimMode mode) {
  return mode == SimMode::Literal ? "literal" : "collapsed";
}

double step_probability(const ModelConfig& model, std::int64_t n, std::int64_t plus_count) {
  if (n < model.warmup_length()) {
    std::ostringstream os;
    os << "state n=" << n << " precedes the warm-up of length " << model.warmup_length();
    throw DomainError(os.str());
  }
  if (plus_count < 0 || plus_count > n) throw DomainError("plus_count outside 0..n");
  const DriftContext ctx = model.drift_context();
  const std::int64_t k = k_schedule_eval(model.schedule, n);
  const KernelRow row = model.sampling == Sampling::WithReplacement
                            ? binom_row(k, static_cast<double>(plus_count) / static_cast<double>(n))
                            : hypergeom_row(n, plus_count, k);
  detail::CompensatedSum sum;
  for (std::size_t j = 0; j < row.weights.size(); ++j) {
    const double i = static_cast<double>(row.first + static_cast<std::int64_t>(j));
    sum.add(eval_g(ctx, i / static_cast<double>(k)) * row.weights[j]);
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

std::int64_t sample_binomial(Rng& rng, std::int64_t k, double y) {
  if (k < 0 || !(y >= 0.0 && y <= 1.0)) throw DomainError("invalid binomial parameters");
  if (y == 0.0 || k == 0) return 0;
  if (y == 1.0) return k;
  if (k == 1) return rng.bernoulli(y) ? 1 : 0;
  if (k > 1000) {
    std::int64_t c = 0;
    for (std::int64_t j = 0; j < k; ++j) c += rng.bernoulli(y) ? 1 : 0;
    return c;
  }
  const std::int64_t mode = std::min<std::int64_t>(k, static_cast<std::int64_t>(std::floor((k + 1) * y)));
  const double at_mode = binom_pmf(k, y, mode);
  const double odds = y / (1.0 - y);
  // Outcomes are visited in the fixed order mode, mode-1, mode+1, ...; the
  // draw is exact inversion of that ordering. A rounding shortfall in the
  // running total restarts with a fresh uniform.
  for (;;) {
    double u = rng.uniform() - at_mode;
    if (u < 0.0) return mode;
    std::int64_t lo = mode, hi = mode;
    double p_lo = at_mode, p_hi = at_mode;
    while (lo > 0 || hi < k) {
      if (lo > 0) {
        p_lo *= static_cast<double>(lo) / (static_cast<double>(k - lo + 1) * odds);
        --lo;
        u -= p_lo;
        if (u < 0.0) return lo;
      }
      if (hi < k) {
        p_hi *= static_cast<double>(k - hi) / static_cast<double>(hi + 1) * odds;
        ++hi;
        u -= p_hi;
        if (u < 0.0) return hi;
      }
    }
  }
}

std::int64_t sample_hypergeometric(Rng& rng, std::int64_t n, std::int64_t marked, std::int64_t k) {
  if (n < 0 || marked < 0 || marked > n || k < 0 || k > n) {
    throw DomainError("invalid hypergeometric parameters");
  }
  std::int64_t remaining = n;
  std::int64_t marked_left = marked;
  std::int64_t hits = 0;
  for (std::int64_t j = 0; j < k; ++j) {
    if (static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(remaining))) < marked_left) {
      ++hits;
      --marked_left;
    }
    --remaining;
  }
  return hits;
}

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = 1; n <= horizon; n *= 2) out.push_back(n);
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

namespace {

// Precomputed g(i/k) for constant schedules; growing schedules evaluate on demand.
class EmissionTable {
 public:
  explicit EmissionTable(const ModelConfig& model) : ctx_(model.drift_context()) {
    if (model.schedule.is_constant()) {
      const std::int64_t k = model.schedule.constant_k();
      fixed_k_ = k;
      grid_.resize(static_cast<std::size_t>(k + 1));
      for (std::int64_t i = 0; i <= k; ++i) {
        grid_[static_cast<std::size_t>(i)] = eval_g(ctx_, static_cast<double>(i) / static_cast<double>(k));
      }
    }
  }

  double operator()(std::int64_t plus, std::int64_t k) const {
    if (k == fixed_k_) return grid_[static_cast<std::size_t>(plus)];
    return eval_g(ctx_, static_cast<double>(plus) / static_cast<double>(k));
  }

 private:
  DriftContext ctx_;
  std::int64_t fixed_k_ = -1;
  std::vector<double> grid_;
};

}  // namespace

Trajectory simulate(const ModelConfig& model, std::int64_t horizon, Substream stream, SimMode mode,
                    std::span<const std::int64_t> checkpoints) {
  model.validate();
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  std::vector<std::int64_t> marks(checkpoints.begin(), checkpoints.end());
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  if (!marks.empty() && (marks.front() < 1 || marks.back() > horizon)) {
    throw ConfigError("checkpoints must lie in [1, horizon]");
  }

  Trajectory traj;
  traj.replicate_id = stream.replicate_id;
  traj.master_seed = stream.master_seed;
  traj.substream_seed = substream_seed(stream.master_seed, stream.replicate_id);
  traj.records.reserve(marks.size());
  Rng rng(traj.substream_seed);
  const EmissionTable emission(model);
  const bool literal = mode == SimMode::Literal;
  const bool with_replacement = model.sampling == Sampling::WithReplacement;

  std::vector<std::int8_t> history;     // literal mode: X_1..X_n
  std::vector<std::int64_t> perm;       // literal without-replacement index pool
  if (literal) {
    history.reserve(static_cast<std::size_t>(horizon));
    if (!with_replacement) perm.reserve(static_cast<std::size_t>(horizon));
  }

  std::int64_t n = 0, s = 0, plus = 0;
  auto mark_it = marks.begin();
  auto push_step = [&](bool up) {
    ++n;
    s += up ? 1 : -1;
    plus += up ? 1 : 0;
    if (literal) {
      history.push_back(up ? 1 : -1);
      if (!with_replacement) perm.push_back(n - 1);
    }
    if (mark_it != marks.end() && *mark_it == n) {
      traj.records.push_back({n, s});
      ++mark_it;
    }
  };

  const std::int64_t warmup = std::min(model.warmup_length(), horizon);
  for (std::int64_t t = 0; t < warmup; ++t) push_step(rng.bernoulli(model.q));

  while (n < horizon) {
    const std::int64_t k = k_schedule_eval(model.schedule, n);
    std::int64_t sampled_plus = 0;
    if (!literal) {
      sampled_plus = with_replacement
                         ? sample_binomial(rng, k, static_cast<double>(plus) / static_cast<double>(n))
                         : sample_hypergeometric(rng, n, plus, k);
    } else if (with_replacement) {
      for (std::int64_t j = 0; j < k; ++j) {
        const auto idx = rng.below(static_cast<std::uint64_t>(n));
        sampled_plus += history[idx] > 0 ? 1 : 0;
      }
    } else {
      // Partial Fisher-Yates: perm[0..k) becomes a uniform ordered k-tuple of
      // distinct past indices.
      for (std::int64_t j = 0; j < k; ++j) {
        const auto r = static_cast<std::size_t>(j) +
                       static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - j)));
        std::swap(perm[static_cast<std::size_t>(j)], perm[r]);
        sampled_plus += history[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] > 0 ? 1 : 0;
      }
    }
    push_step(rng.bernoulli(emission(sampled_plus, k)));
  }
  traj.terminal_n = n;
  traj.terminal_s = s;
  return traj;
}

}  // namespace erw
