#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <functional>
#include <random>

#include "erw/errors.hpp"
#include "erw/oracle.hpp"
#include "erw/walk.hpp"

using namespace erw;

namespace {

ModelConfig make_model(ReinforcementSpec f, double p, KSchedule k, Sampling s = Sampling::WithReplacement,
                       double q = 0.5) {
  ModelConfig m;
  m.p = p;
  m.q = q;
  m.spec = std::move(f);
  m.schedule = std::move(k);
  m.sampling = s;
  return m;
}

// Pearson statistic against `expected` probabilities, merging sparse tail
// cells so every bin expects at least 5 counts. Returns (statistic, dof).
std::pair<double, int> chi_square(const std::vector<std::int64_t>& counts, const std::vector<double>& expected,
                                  std::int64_t total) {
  double stat = 0, e_acc = 0;
  std::int64_t c_acc = 0;
  int bins = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    e_acc += expected[i] * total;
    c_acc += counts[i];
    if (e_acc >= 5 || i + 1 == counts.size()) {
      if (e_acc > 0) {
        stat += (c_acc - e_acc) * (c_acc - e_acc) / e_acc;
        ++bins;
      }
      e_acc = 0;
      c_acc = 0;
    }
  }
  return {stat, std::max(1, bins - 1)};
}

double chi_critical(int dof) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), 1e-4));
}

}  // namespace

TEST_CASE("k_schedule_eval examples") {
  CHECK(k_schedule_eval(KSchedule::power(1, 0.5), 100) == 10);
  CHECK(k_schedule_eval(KSchedule::power(2, 0.5), 10) == 7);
  CHECK(k_schedule_eval(KSchedule::power(1, 0.9), 2) == 2);
  CHECK(k_schedule_eval(KSchedule::constant(5), 2) == 5);
  CHECK(k_schedule_eval(KSchedule::log(1.0), 1) == 1);
  CHECK(k_schedule_eval(KSchedule::table({1, 2, 2}), 3) == 2);
  CHECK_THROWS_AS(k_schedule_eval(KSchedule::table({1, 2}), 3), ScheduleError);
  CHECK_THROWS_AS(k_schedule_eval(KSchedule::constant(1), 0), DomainError);
}

TEST_CASE("property: growing schedules are nondecreasing and within [1, n]") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const KSchedule s = trial % 2 ? KSchedule::power(u(gen), u(gen) / 2) : KSchedule::log(u(gen));
    std::int64_t prev = 1;
    for (std::int64_t n = 1; n <= 5000; ++n) {
      const std::int64_t k = k_schedule_eval(s, n);
      REQUIRE(k >= prev);
      REQUIRE(k >= 1);
      REQUIRE(k <= n);
      prev = k;
    }
  }
}

TEST_CASE("ModelConfig validation") {
  auto m = make_model(ReinforcementSpec::linear(1.0), 0.5, KSchedule::constant(1));
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.allow_half = true;
  CHECK_NOTHROW(m.validate());
  m.p = 1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.p = 0.7;
  m.q = 1.2;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  CHECK_THROWS_AS(make_model(ReinforcementSpec::linear(1.0), 0.7, KSchedule::constant(0)).validate(), ConfigError);
  const auto wo = make_model(ReinforcementSpec::linear(1.0), 0.7, KSchedule::constant(4), Sampling::WithoutReplacement);
  CHECK(wo.warmup_length() == 4);
  const auto grow = make_model(ReinforcementSpec::linear(1.0), 0.7, KSchedule::power(1, 0.5), Sampling::WithoutReplacement);
  CHECK(grow.warmup_length() == 1);
}

TEST_CASE("step_probability examples") {
  const auto f = ReinforcementSpec::linear(1.0);
  CHECK(step_probability(make_model(f, 0.75, KSchedule::constant(1)), 1, 1) == doctest::Approx(0.75));
  CHECK(step_probability(make_model(f, 0.75, KSchedule::constant(1)), 2, 1) == doctest::Approx(0.5));
  CHECK(step_probability(make_model(f, 0.75, KSchedule::constant(2), Sampling::WithoutReplacement), 4, 2) ==
        doctest::Approx(0.5));
  CHECK(step_probability(make_model(f, 0.75, KSchedule::constant(1)), 5, 3) == doctest::Approx(0.55));
  CHECK_THROWS_AS(step_probability(make_model(f, 0.75, KSchedule::constant(3), Sampling::WithoutReplacement), 2, 1),
                  DomainError);
  CHECK_THROWS_AS(step_probability(make_model(f, 0.75, KSchedule::constant(1)), 3, 4), DomainError);
}

TEST_CASE("property: literal one-step law by exhaustive index enumeration") {
  // History: the first plus_count steps are +1. Every ordered index tuple is
  // equally likely; count sampled +1 entries and average g(C/k) exactly.
  const std::vector<Rational> pf{Rational(3, 4), Rational(9, 10)};
  for (const Rational& p : pf) {
    const std::vector<std::pair<ReinforcementSpec, std::function<Rational(int, int)>>> fs{
        {ReinforcementSpec::linear(1.0), [](int c, int k) { return Rational(c, k); }},
        {ReinforcementSpec::quadratic(1.0), [](int c, int k) { return Rational(c * c, k * k); }},
        {ReinforcementSpec::majority(),
         [](int c, int k) { return 2 * c > k ? Rational(1) : 2 * c == k ? Rational(1, 2) : Rational(0); }},
    };
    for (const auto& [spec, f_exact] : fs) {
      for (Sampling s : {Sampling::WithReplacement, Sampling::WithoutReplacement}) {
        for (int k = 1; k <= 3; ++k) {
          const auto model = make_model(spec, static_cast<double>(p), KSchedule::constant(k), s);
          for (int n = std::max(1, s == Sampling::WithoutReplacement ? k : 1); n <= 8; ++n) {
            for (int plus = 0; plus <= n; ++plus) {
              Rational total = 0;
              std::int64_t tuples = 0;
              std::vector<int> idx(k, 0);
              std::function<void(int)> rec = [&](int depth) {
                if (depth == k) {
                  int c = 0;
                  for (int i : idx) c += i < plus;
                  const Rational fv = f_exact(c, k);
                  total += p * fv + (1 - p) * (1 - fv);
                  ++tuples;
                  return;
                }
                for (int i = 0; i < n; ++i) {
                  bool used = false;
                  for (int d = 0; d < depth && s == Sampling::WithoutReplacement; ++d) used |= idx[d] == i;
                  if (used) continue;
                  idx[depth] = i;
                  rec(depth + 1);
                }
              };
              rec(0);
              const double exact = static_cast<double>(Rational(total / tuples));
              REQUIRE(std::abs(step_probability(model, n, plus) - exact) <= 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("sample_binomial and sample_hypergeometric reproduce their laws") {
  Rng rng(77);
  const int draws = 200000;
  for (auto [k, y] : {std::pair<std::int64_t, double>{7, 0.3}, {40, 0.85}, {1500, 0.5}}) {
    std::vector<std::int64_t> counts(k + 1, 0);
    for (int t = 0; t < draws; ++t) ++counts[sample_binomial(rng, k, y)];
    std::vector<double> pmf(k + 1);
    for (std::int64_t i = 0; i <= k; ++i) pmf[i] = binom_pmf(k, y, i);
    const auto [stat, dof] = chi_square(counts, pmf, draws);
    CHECK(stat < chi_critical(dof));
  }
  for (auto [n, m, k] : {std::tuple<std::int64_t, std::int64_t, std::int64_t>{10, 4, 3}, {50, 30, 20}}) {
    std::vector<std::int64_t> counts(k + 1, 0);
    for (int t = 0; t < draws; ++t) ++counts[sample_hypergeometric(rng, n, m, k)];
    std::vector<double> pmf(k + 1);
    for (std::int64_t i = 0; i <= k; ++i) pmf[i] = hypergeom_pmf(n, m, k, i);
    const auto [stat, dof] = chi_square(counts, pmf, draws);
    CHECK(stat < chi_critical(dof));
  }
  CHECK(sample_binomial(rng, 5, 0.0) == 0);
  CHECK(sample_binomial(rng, 5, 1.0) == 5);
  CHECK(sample_hypergeometric(rng, 5, 5, 3) == 3);
}

TEST_CASE("one-step replay from (n=5, plus_count=3) matches step_probability") {
  // Literal: one index uniform on the five past steps; collapsed: Binomial(1, 3/5).
  const auto model = make_model(ReinforcementSpec::linear(1.0), 0.75, KSchedule::constant(1));
  const double target = step_probability(model, 5, 3);
  CHECK(target == doctest::Approx(0.55));
  const int reps = 100000;
  const double sd = std::sqrt(target * (1 - target) / reps);
  Rng lit(5), col(6);
  int up_lit = 0, up_col = 0;
  const DriftContext ctx = model.drift_context();
  for (int t = 0; t < reps; ++t) {
    const double c1 = lit.below(5) < 3 ? 1.0 : 0.0;
    up_lit += lit.bernoulli(eval_g(ctx, c1));
    const double c2 = static_cast<double>(sample_binomial(col, 1, 0.6));
    up_col += col.bernoulli(eval_g(ctx, c2));
  }
  CHECK(std::abs(up_lit / double(reps) - target) < 4 * sd);
  CHECK(std::abs(up_col / double(reps) - target) < 4 * sd);
}

TEST_CASE("simulate examples") {
  auto m = make_model(ReinforcementSpec::linear(1.0), 0.75, KSchedule::constant(1), Sampling::WithReplacement, 1.0);
  const std::vector<std::int64_t> cps{1};
  for (SimMode mode : {SimMode::Literal, SimMode::Collapsed}) {
    const Trajectory t = simulate(m, 1, {3, 1}, mode, cps);
    CHECK(t.terminal_s == 1);
    CHECK(t.records.at(0).s_n == 1);
  }
  const auto iid = make_model(ReinforcementSpec::constant(1.0), 0.7, KSchedule::constant(3));
  const std::vector<std::int64_t> end{10000};
  const Trajectory t = simulate(iid, 10000, {42, 1}, SimMode::Collapsed, end);
  CHECK(std::abs(t.terminal_s / 1e4 - 0.4) < 0.05);
}

TEST_CASE("simulate rejects bad checkpoints and horizons") {
  const auto m = make_model(ReinforcementSpec::linear(1.0), 0.75, KSchedule::constant(1));
  const std::vector<std::int64_t> bad{0}, late{11};
  CHECK_THROWS_AS(simulate(m, 10, {}, SimMode::Collapsed, bad), ConfigError);
  CHECK_THROWS_AS(simulate(m, 10, {}, SimMode::Collapsed, late), ConfigError);
  CHECK_THROWS_AS(simulate(m, 0, {}, SimMode::Collapsed, {}), ConfigError);
}

TEST_CASE("dyadic_checkpoints") {
  CHECK(dyadic_checkpoints(10) == std::vector<std::int64_t>{1, 2, 4, 8, 10});
  CHECK(dyadic_checkpoints(8) == std::vector<std::int64_t>{1, 2, 4, 8});
  CHECK(dyadic_checkpoints(1) == std::vector<std::int64_t>{1});
}

TEST_CASE("property: lattice invariant on every checkpoint of random models") {
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double p = u(gen) < 0.5 ? 0.05 + 0.4 * u(gen) : 0.55 + 0.4 * u(gen);
    const Sampling s = trial % 2 ? Sampling::WithReplacement : Sampling::WithoutReplacement;
    const KSchedule k = trial % 3 == 0 ? KSchedule::power(1.0, 0.6) : KSchedule::constant(1 + gen() % 4);
    const auto model = make_model(ReinforcementSpec::quadratic(1.0), p, k, s, u(gen));
    const std::int64_t horizon = 200 + static_cast<std::int64_t>(gen() % 300);
    std::vector<std::int64_t> cps;
    for (std::int64_t n = 1; n <= horizon; ++n) cps.push_back(n);
    const SimMode mode = trial % 4 < 2 ? SimMode::Literal : SimMode::Collapsed;
    const Trajectory t = simulate(model, horizon, {gen(), 1}, mode, cps);
    REQUIRE(t.records.size() == cps.size());
    std::int64_t prev = 0;
    for (const Checkpoint& c : t.records) {
      REQUIRE(((c.s_n - c.n) % 2 + 2) % 2 == 0);
      REQUIRE(std::abs(c.s_n) <= c.n);
      REQUIRE(std::abs(c.s_n - prev) == 1);
      prev = c.s_n;
    }
    CHECK(t.terminal_n == horizon);
  }
}

TEST_CASE("determinism: identical inputs give identical trajectories") {
  const auto m = make_model(ReinforcementSpec::majority(), 0.8, KSchedule::constant(3), Sampling::WithoutReplacement);
  const auto cps = dyadic_checkpoints(5000);
  for (SimMode mode : {SimMode::Literal, SimMode::Collapsed}) {
    const Trajectory a = simulate(m, 5000, {99, 7}, mode, cps);
    const Trajectory b = simulate(m, 5000, {99, 7}, mode, cps);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].s_n == b.records[i].s_n);
    CHECK(a.substream_seed == substream_seed(99, 7));
  }
  const Trajectory c = simulate(m, 5000, {99, 8}, SimMode::Collapsed, cps);
  const Trajectory d = simulate(m, 5000, {99, 7}, SimMode::Collapsed, cps);
  CHECK(c.terminal_s != d.terminal_s);  // fixed seeds; distinct substreams differ here
}

TEST_CASE("both modes reproduce the exact law of S_n") {
  const std::int64_t n = 12;
  const int reps = 40000;
  const std::vector<ModelConfig> models{
      make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::constant(2), Sampling::WithReplacement, 0.3),
      make_model(ReinforcementSpec::majority(), 0.7, KSchedule::constant(3), Sampling::WithoutReplacement, 0.6),
      make_model(ReinforcementSpec::linear(1.0), 0.2, KSchedule::power(1.0, 0.5), Sampling::WithoutReplacement),
      make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::power(1.0, 0.6), Sampling::WithReplacement),
      make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::power(1.0, 0.6), Sampling::WithoutReplacement),
  };
  const std::vector<std::int64_t> cps{n};
  for (const auto& model : models) {
    const ExactPmf pmf = exact_distribution(model, n).back();
    REQUIRE(pmf.n == n);
    for (SimMode mode : {SimMode::Literal, SimMode::Collapsed}) {
      std::vector<std::int64_t> counts(n + 1, 0);
      for (int r = 1; r <= reps; ++r) {
        const Trajectory t = simulate(model, n, {2024, static_cast<std::uint64_t>(r)}, mode, cps);
        ++counts[(t.terminal_s + n) / 2];
      }
      const auto [stat, dof] = chi_square(counts, pmf.prob, reps);
      CHECK(stat < chi_critical(dof));
    }
  }
}

TEST_CASE("without-replacement warm-up: plus_count at n = k is Binomial(k, q)") {
  const std::int64_t k = 4;
  const auto model = make_model(ReinforcementSpec::linear(1.0), 0.9, KSchedule::constant(k), Sampling::WithoutReplacement,
                                0.35);
  const ExactPmf first = exact_distribution(model, k).front();
  REQUIRE(first.n == k);
  for (std::int64_t i = 0; i <= k; ++i) CHECK(first.prob[i] == doctest::Approx(binom_pmf(k, 0.35, i)).epsilon(1e-12));
  const std::vector<std::int64_t> cps{k};
  std::vector<std::int64_t> counts(k + 1, 0);
  const int reps = 40000;
  for (int r = 1; r <= reps; ++r) {
    const Trajectory t = simulate(model, k, {17, static_cast<std::uint64_t>(r)}, SimMode::Literal, cps);
    ++counts[(t.terminal_s + k) / 2];
  }
  const auto [stat, dof] = chi_square(counts, first.prob, reps);
  CHECK(stat < chi_critical(dof));
}
