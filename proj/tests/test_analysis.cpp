#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "erw/analysis.hpp"
#include "erw/errors.hpp"

using namespace erw;

namespace {

ModelConfig make_model(ReinforcementSpec f, double p, KSchedule k, Sampling s = Sampling::WithReplacement) {
  ModelConfig m;
  m.p = p;
  m.spec = std::move(f);
  m.schedule = std::move(k);
  m.sampling = s;
  return m;
}

const double kSquareRoot = (1 - std::sqrt(0.52)) / 1.2;  // 0.6x^2 - x + 0.2 = 0 on [0,1]

}  // namespace

TEST_CASE("find_fixed_points examples") {
  const auto a = find_fixed_points(DriftContext(ReinforcementSpec::constant(1.0), 0.7), ConstantK{5});
  REQUIRE(a.roots.size() == 1);
  CHECK(a.roots[0] == doctest::Approx(0.4).epsilon(1e-12));

  const auto b = find_fixed_points(DriftContext(ReinforcementSpec::majority(), 0.75), ConstantK{3});
  REQUIRE(b.roots.size() == 1);
  CHECK(std::abs(b.roots[0]) <= 1e-12);

  const auto c = find_fixed_points(DriftContext(ReinforcementSpec::majority(), 0.9), ConstantK{3});
  REQUIRE(c.roots.size() == 3);
  CHECK(c.roots[0] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-10));
  CHECK(std::abs(c.roots[1]) <= 1e-12);
  CHECK(c.roots[2] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));

  const auto d = find_fixed_points(DriftContext(ReinforcementSpec::quadratic(1.0), 0.8), GrowingLimit{});
  REQUIRE(d.roots.size() == 1);
  CHECK(std::abs(d.roots[0] - kSquareRoot) <= 1e-12);
}

TEST_CASE("majority growing limit: the jump at 1/2 is not a fixed point") {
  // g jumps from 1-p to p at 1/2 and crosses the diagonal at 1/4 and 3/4.
  const auto r = find_fixed_points(DriftContext(ReinforcementSpec::majority(), 0.75), GrowingLimit{});
  REQUIRE(r.roots.size() == 3);
  CHECK(r.roots[0] == doctest::Approx(0.25));
  CHECK(r.roots[1] == 0.5);  // the tie value g(1/2) = 1/2 is a genuine fixed point
  CHECK(r.roots[2] == doctest::Approx(0.75));
}

TEST_CASE("a sign change across a jump is not reported as a root") {
  CustomReinforcement step;
  step.f = [](double x) { return x < 0.5 ? 0.0 : 1.0; };
  const auto r = find_fixed_points(DriftContext(ReinforcementSpec::custom(step), 0.75), GrowingLimit{});
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0] == doctest::Approx(0.25));
  CHECK(r.roots[1] == doctest::Approx(0.75));
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("tangential near-roots are reported with a warning") {
  // g(x) - x = (x - 1/4)^2 (0.85 - x): a double root at 1/4, a crossing at 0.85.
  const double p = 0.95;
  CustomReinforcement parts;
  parts.f = [p](double x) { return (x + (x - 0.25) * (x - 0.25) * (0.85 - x) - (1 - p)) / (2 * p - 1); };
  parts.continuity = Continuity::C2;
  const auto r = find_fixed_points(DriftContext(ReinforcementSpec::custom(parts), p), GrowingLimit{});
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0] == doctest::Approx(0.25));
  CHECK(r.tangential[0]);
  CHECK(r.roots[1] == doctest::Approx(0.85));
  CHECK_FALSE(r.tangential[1]);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("compute_tau examples") {
  for (int k : {1, 3, 8}) {
    CHECK(compute_tau(DriftContext(ReinforcementSpec::linear(1.0), 0.6), ConstantK{k}, 0.0) == doctest::Approx(0.8));
  }
  CHECK(compute_tau(DriftContext(ReinforcementSpec::majority(), 0.75), ConstantK{3}, 0.0) == doctest::Approx(0.25));
  CHECK(compute_tau(DriftContext(ReinforcementSpec::constant(1.0), 0.7), ConstantK{5}, 0.4) == doctest::Approx(1.0));
  CHECK(compute_tau(DriftContext(ReinforcementSpec::quadratic(1.0), 0.8), GrowingLimit{}, kSquareRoot) ==
        doctest::Approx(1 - 1.2 * kSquareRoot).epsilon(1e-12));
  CHECK_THROWS_AS(compute_tau(DriftContext(ReinforcementSpec::constant(1.0), 0.7), ConstantK{5}, 0.1), DomainError);
  CHECK_THROWS_AS(compute_tau(DriftContext(ReinforcementSpec::majority(), 0.75), GrowingLimit{}, 0.25), RegularityError);
}

TEST_CASE("classify_regime examples") {
  CHECK(classify_regime(0.8).regime == Regime::Diffusive);
  CHECK(classify_regime(0.5).regime == Regime::Critical);
  CHECK(classify_regime(0.25).regime == Regime::Superdiffusive);
  CHECK(classify_regime(0.5 + 5e-10).regime == Regime::Critical);
  CHECK(classify_regime(0.5 + 2e-9).regime == Regime::Diffusive);
  CHECK_FALSE(classify_regime(0.5004).warnings.empty());
  CHECK(classify_regime(0.8).warnings.empty());
  const RegimeClass neg = classify_regime(-0.1);
  CHECK(neg.regime == Regime::Indeterminate);
  CHECK_FALSE(neg.warnings.empty());
}

TEST_CASE("predicted_clt examples") {
  const RegimeReport a = predicted_clt(make_model(ReinforcementSpec::linear(1.0), 0.6, KSchedule::constant(1)));
  CHECK(a.unique);
  CHECK(std::abs(*a.x_star) <= 1e-12);
  CHECK(*a.tau == doctest::Approx(0.8));
  CHECK(a.regime == Regime::Diffusive);
  CHECK(*a.predicted_variance == doctest::Approx(1 / 0.6).epsilon(1e-10));

  const RegimeReport b = predicted_clt(make_model(ReinforcementSpec::linear(1.0), 0.75, KSchedule::constant(1)));
  CHECK(b.regime == Regime::Critical);
  CHECK(*b.predicted_variance == doctest::Approx(1.0));

  const RegimeReport c = predicted_clt(make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::power(1.0, 0.6)));
  const double tau = 1 - 1.2 * kSquareRoot;
  CHECK(*c.centering == doctest::Approx(2 * kSquareRoot - 1).epsilon(1e-12));
  CHECK(*c.tau == doctest::Approx(tau).epsilon(1e-12));
  CHECK(*c.tau == doctest::Approx(0.7211103).epsilon(1e-7));
  CHECK(c.regime == Regime::Diffusive);
  CHECK(*c.predicted_variance == doctest::Approx(4 * kSquareRoot * (1 - kSquareRoot) / (2 * tau - 1)).epsilon(1e-10));

  const RegimeReport w = predicted_clt(
      make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::constant(3), Sampling::WithoutReplacement));
  const RegimeReport r = predicted_clt(make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::constant(3)));
  CHECK(*w.x_star == doctest::Approx(*r.x_star).epsilon(1e-14));
  CHECK(*w.tau == doctest::Approx(*r.tau).epsilon(1e-14));
}

TEST_CASE("predicted_clt error paths and the non-throwing variant") {
  const auto maj = make_model(ReinforcementSpec::majority(), 0.9, KSchedule::constant(3));
  try {
    predicted_clt(maj);
    FAIL("expected NonUniqueFixedPoint");
  } catch (const NonUniqueFixedPoint& e) {
    CHECK(e.roots().size() == 3);
  }
  const RegimeReport r = analyze_regime(maj);
  CHECK_FALSE(r.unique);
  CHECK(r.regime == Regime::Indeterminate);
  CHECK(r.fixed_points.size() == 3);
  CHECK_FALSE(r.predicted_variance.has_value());

  // Steep sigmoid f: g crosses the diagonal three times in the growing limit.
  CustomReinforcement steep;
  steep.f = [](double x) { return 0.5 + 0.5 * std::tanh(8 * (x - 0.5)); };
  steep.continuity = Continuity::C2;
  steep.d1 = [](double x) { const double c = std::cosh(8 * (x - 0.5)); return 4.0 / (c * c); };
  const auto model = make_model(ReinforcementSpec::custom(steep), 0.95, KSchedule::power(1.0, 0.6));
  const RegimeReport s = analyze_regime(model);
  CHECK(s.regime == Regime::Indeterminate);
  CHECK(s.fixed_points.size() == 3);
  CHECK_THROWS_AS(predicted_clt(model), NonUniqueFixedPoint);

  // g(x) = x - 4(x - 1/2)^3 at p = 3/4: the unique root has g' = 1, tau = 0.
  CustomReinforcement flat;
  flat.f = [](double x) { return 2 * (x - 4 * (x - 0.5) * (x - 0.5) * (x - 0.5)) - 0.5; };
  flat.continuity = Continuity::C2;
  flat.d1 = [](double x) { return 2 * (1 - 12 * (x - 0.5) * (x - 0.5)); };
  flat.d2 = [](double x) { return -48 * (x - 0.5); };
  const auto degenerate = make_model(ReinforcementSpec::custom(flat), 0.75, KSchedule::power(1.0, 0.6));
  const RegimeReport d = analyze_regime(degenerate);
  REQUIRE(d.unique);
  CHECK(*d.tau == 0.0);
  CHECK(d.regime == Regime::Indeterminate);
  CHECK_THROWS_AS(predicted_clt(degenerate), TauNonpositive);
}

TEST_CASE("check_conditions examples") {
  // f(x) = cx with c = 0.9: same statuses as the c = 1.2 family member, whose
  // values leave [0,1] and are rejected at construction.
  const ConditionReport a = check_conditions(make_model(ReinforcementSpec::linear(0.9), 0.7, KSchedule::constant(3)));
  CHECK(a.status("A1") == Status::Holds);
  CHECK(a.status("C1") == Status::Fails);
  CHECK(a.status("E1") == Status::Fails);

  const ConditionReport b =
      check_conditions(make_model(ReinforcementSpec::affine_decreasing(0.5), 0.3, KSchedule::constant(4)));
  CHECK(b.status("A2") == Status::Holds);
  CHECK(b.status("C2") == Status::Fails);

  const ConditionReport c = check_conditions(make_model(ReinforcementSpec::linear(1.0), 0.6, KSchedule::power(1.0, 0.9)));
  CHECK(c.status("F4") == Status::Holds);
  CHECK(c.status("Cor1") == Status::Holds);
  CHECK(c.status("S8") == Status::Holds);
}

TEST_CASE("check_conditions: every id present, unknowns carry reasons") {
  const std::vector<ModelConfig> models{
      make_model(ReinforcementSpec::majority(), 0.9, KSchedule::constant(3)),
      make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::power(1.0, 0.6)),
      make_model(ReinforcementSpec::linear(1.0), 0.3, KSchedule::log(2.0), Sampling::WithoutReplacement),
      make_model(ReinforcementSpec::exponential(0.3), 0.8, KSchedule::table({1, 1, 2, 2, 3})),
  };
  for (const auto& m : models) {
    const ConditionReport r = check_conditions(m);
    CHECK(r.results.size() == kConditionIds.size());
    for (auto id : kConditionIds) {
      const ConditionResult& c = r.at(id);
      CHECK_FALSE(c.evidence.empty());
    }
  }
}

TEST_CASE("check_conditions: specific block logic") {
  // Majority k=3, p=0.75: H = 0.75x - 0.25x^3 is increasing, changes
  // curvature at 0, and |H'| <= 0.75.
  const ConditionReport maj = check_conditions(make_model(ReinforcementSpec::majority(), 0.75, KSchedule::constant(3)));
  CHECK(maj.status("B1") == Status::Fails);  // H' = 0.75(1 - x^2) > 0
  CHECK(maj.status("B2") == Status::Fails);
  CHECK(maj.status("B3") == Status::Holds);
  CHECK(maj.status("D1") == Status::Fails);

  // E1: 1/2 < p < 1/2 + 1/(2k).
  const ConditionReport e = check_conditions(make_model(ReinforcementSpec::linear(1.0), 0.6, KSchedule::constant(3)));
  CHECK(e.status("E1") == Status::Holds);
  CHECK(e.status("B3") == Status::Holds);
  CHECK(e.status("C1") == Status::Fails);

  // Decreasing f with p > 1/2 satisfies C1.
  const ConditionReport dec =
      check_conditions(make_model(ReinforcementSpec::affine_decreasing(1.0), 0.8, KSchedule::constant(4)));
  CHECK(dec.status("C1") == Status::Holds);
  CHECK(dec.status("B1") == Status::Holds);
  CHECK(dec.status("G1") == Status::Holds);

  // Convex f with p > 1/2 and A1 satisfies D1.
  const ConditionReport cvx = check_conditions(make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::constant(4)));
  CHECK(cvx.status("D1") == Status::Holds);
  CHECK(cvx.status("D2") == Status::Fails);

  // Growing schedules: B..E are not applicable.
  const ConditionReport g = check_conditions(make_model(ReinforcementSpec::quadratic(1.0), 0.8, KSchedule::power(1.0, 0.6)));
  CHECK(g.status("B1") == Status::Unknown);
  CHECK(g.status("G2") == Status::Holds);
  CHECK(g.status("F3") == Status::Holds);
  CHECK(g.status("S7") == Status::Holds);
  CHECK(g.status("S6") == Status::Unknown);
  CHECK(g.status("Cor1") == Status::Holds);

  // Superdiffusive growing case needs alpha > tau.
  const auto slow = make_model(ReinforcementSpec::linear(1.0), 0.9, KSchedule::power(1.0, 0.1));
  CHECK(check_conditions(slow).status("S5") == Status::Fails);
  CHECK(check_conditions(slow).status("Cor1") == Status::Fails);
  const auto fast = make_model(ReinforcementSpec::linear(1.0), 0.9, KSchedule::power(1.0, 0.5));
  CHECK(check_conditions(fast).status("S5") == Status::Holds);
}

TEST_CASE("property: fixed-point residual, attractor sign and endpoint pull-in") {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int unique_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const double p = u(gen) < 0.5 ? 0.02 + 0.46 * u(gen) : 0.52 + 0.46 * u(gen);
    const double a = u(gen);
    const std::vector<ReinforcementSpec> fs{
        ReinforcementSpec::quadratic(a, 0.0, u(gen) * (1 - a)), ReinforcementSpec::linear(u(gen)),
        ReinforcementSpec::affine_decreasing(u(gen)), ReinforcementSpec::exponential(u(gen) / std::exp(1.0)),
        ReinforcementSpec::majority()};
    const ReinforcementSpec& f = fs[trial % fs.size()];
    const DriftContext ctx(f, p);
    const std::int64_t k = 1 + static_cast<std::int64_t>(gen() % 8);
    const FixedPointSet set = find_fixed_points(ctx, ConstantK{k});
    REQUIRE_FALSE(set.roots.empty());
    for (double r : set.roots) REQUIRE(std::abs(eval_H(ctx, k, r) - r) <= 1e-9);
    // A1 or A2 holds for every catalog f (values in [0,1]).
    CHECK(eval_H(ctx, k, -1.0) > -1.0);
    CHECK(eval_H(ctx, k, 1.0) < 1.0);
    if (set.roots.size() == 1 && !set.tangential[0]) {
      ++unique_seen;
      const double xs = set.roots[0];
      for (int i = 0; i <= 4096; ++i) {
        const double x = -1 + 2.0 * i / 4096;
        if (std::abs(x - xs) < 1e-6) continue;
        REQUIRE((eval_H(ctx, k, x) - x) * (x - xs) < 0);
      }
    }
  }
  CHECK(unique_seen > 60);
}

TEST_CASE("property: grid sup |H'| never exceeds k|2p-1|") {
  std::mt19937_64 gen(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = u(gen) < 0.5 ? 0.01 + 0.48 * u(gen) : 0.51 + 0.48 * u(gen);
    const DriftContext ctx(trial % 2 ? ReinforcementSpec::majority() : ReinforcementSpec::exponential(u(gen) / 3), p);
    const std::int64_t k = 1 + static_cast<std::int64_t>(gen() % 20);
    double sup = 0;
    for (int i = 0; i <= 4096; ++i) sup = std::max(sup, std::abs(eval_H_prime(ctx, k, -1 + 2.0 * i / 4096)));
    REQUIRE(sup <= k * std::abs(2 * p - 1) + 1e-9);
  }
}

TEST_CASE("property: classification is stable under 1e-12 perturbations") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 100000; ++trial) {
    const double tau = u(gen);
    if (std::abs(std::abs(tau - 0.5) - kCriticalTol) < 1e-11 || std::abs(tau) < 1e-11) continue;
    const Regime base = classify_regime(tau).regime;
    REQUIRE(classify_regime(tau + 1e-12).regime == base);
    REQUIRE(classify_regime(tau - 1e-12).regime == base);
  }
  // Near the band edges too.
  for (double tau : {0.5, 0.5 + 0.9e-9, 0.5 - 0.9e-9, 0.5 + 1.1e-9, 0.5 - 1.1e-9}) {
    CHECK(classify_regime(tau + 1e-12).regime == classify_regime(tau).regime);
  }
}
