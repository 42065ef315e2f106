#include "erw/report.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>

#include "erw/errors.hpp"

namespace erw {

namespace {

void require_object(const Json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
}

void reject_unknown(const Json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + std::string(where));
  }
}

double number(const Json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + " needs \"" + key + "\"");
  if (!j.at(key).is_number()) throw ConfigError(std::string(where) + "." + key + " must be a number");
  return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback, std::string_view where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::int64_t integer(const Json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + " needs \"" + key + "\"");
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string(where) + "." + key + " must be an integer");
  return j.at(key).get<std::int64_t>();
}

std::string text(const Json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + " needs \"" + key + "\"");
  if (!j.at(key).is_string()) throw ConfigError(std::string(where) + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

template <class T>
std::vector<T> array_of(const Json& j, const char* key, std::string_view where) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ConfigError(std::string(where) + "." + key + " must be an array");
  }
  std::vector<T> out;
  for (const auto& v : j.at(key)) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(std::string(where) + "." + key + " holds a non-integer");
    } else {
      if (!v.is_number()) throw ConfigError(std::string(where) + "." + key + " holds a non-number");
    }
    out.push_back(v.get<T>());
  }
  return out;
}

KSchedule schedule_from_json(const Json& j) {
  constexpr std::string_view where = "model.k";
  require_object(j, where);
  const std::string type = text(j, "type", where);
  if (type == "constant") {
    reject_unknown(j, where, {"type", "value"});
    return KSchedule::constant(integer(j, "value", where));
  }
  if (type == "power") {
    reject_unknown(j, where, {"type", "c", "alpha"});
    return KSchedule::power(number(j, "c", where), number(j, "alpha", where));
  }
  if (type == "log") {
    reject_unknown(j, where, {"type", "c"});
    return KSchedule::log(number(j, "c", where));
  }
  if (type == "table") {
    reject_unknown(j, where, {"type", "values"});
    return KSchedule::table(array_of<std::int64_t>(j, "values", where));
  }
  throw ConfigError("unknown k type \"" + type + "\"");
}

ReinforcementSpec f_from_json(const Json& j) {
  constexpr std::string_view where = "model.f";
  require_object(j, where);
  const std::string type = text(j, "type", where);
  try {
    if (type == "constant") {
      reject_unknown(j, where, {"type", "value"});
      return ReinforcementSpec::constant(number(j, "value", where));
    }
    if (type == "linear") {
      reject_unknown(j, where, {"type", "c"});
      return ReinforcementSpec::linear(number_or(j, "c", 1.0, where));
    }
    if (type == "affine_decreasing") {
      reject_unknown(j, where, {"type", "c"});
      return ReinforcementSpec::affine_decreasing(number_or(j, "c", 1.0, where));
    }
    if (type == "exponential") {
      reject_unknown(j, where, {"type", "c"});
      return ReinforcementSpec::exponential(number(j, "c", where));
    }
    if (type == "quadratic") {
      reject_unknown(j, where, {"type", "a", "b", "c"});
      return ReinforcementSpec::quadratic(number_or(j, "a", 1.0, where), number_or(j, "b", 0.0, where),
                                          number_or(j, "c", 0.0, where));
    }
    if (type == "majority") {
      reject_unknown(j, where, {"type"});
      return ReinforcementSpec::majority();
    }
    if (type == "table") {
      reject_unknown(j, where, {"type", "values"});
      return ReinforcementSpec::table(array_of<double>(j, "values", where));
    }
  } catch (const RangeError& e) {
    throw ConfigError(std::string("model.f: ") + e.what());
  }
  throw ConfigError("unknown f type \"" + type + "\"");
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

ModelConfig model_from_json(const Json& j) {
  constexpr std::string_view where = "model";
  require_object(j, where);
  reject_unknown(j, where, {"p", "q", "sampling", "k", "f", "allow_half"});
  ModelConfig m;
  m.p = number(j, "p", where);
  m.q = number_or(j, "q", 0.5, where);
  if (j.contains("sampling")) {
    const std::string s = text(j, "sampling", where);
    if (s == "with") {
      m.sampling = Sampling::WithReplacement;
    } else if (s == "without") {
      m.sampling = Sampling::WithoutReplacement;
    } else {
      throw ConfigError("model.sampling must be \"with\" or \"without\"");
    }
  }
  if (!j.contains("k")) throw ConfigError("model needs \"k\"");
  if (!j.contains("f")) throw ConfigError("model needs \"f\"");
  m.schedule = schedule_from_json(j.at("k"));
  m.spec = f_from_json(j.at("f"));
  if (j.contains("allow_half")) {
    if (!j.at("allow_half").is_boolean()) throw ConfigError("model.allow_half must be a boolean");
    m.allow_half = j.at("allow_half").get<bool>();
  }
  m.validate();
  return m;
}

Json model_to_json(const ModelConfig& model) {
  Json k;
  std::visit(
      [&k](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, KSchedule::Constant>) {
          k = {{"type", "constant"}, {"value", s.k}};
        } else if constexpr (std::is_same_v<T, KSchedule::Power>) {
          k = {{"type", "power"}, {"c", s.c}, {"alpha", s.alpha}};
        } else if constexpr (std::is_same_v<T, KSchedule::Log>) {
          k = {{"type", "log"}, {"c", s.c}};
        } else {
          k = {{"type", "table"}, {"values", s.values}};
        }
      },
      model.schedule.kind());
  Json f;
  const auto& prm = model.spec.params();
  switch (model.spec.kind()) {
    case FKind::Constant: f = {{"type", "constant"}, {"value", prm.at(0)}}; break;
    case FKind::Linear: f = {{"type", "linear"}, {"c", prm.at(0)}}; break;
    case FKind::AffineDecreasing: f = {{"type", "affine_decreasing"}, {"c", prm.at(0)}}; break;
    case FKind::Exponential: f = {{"type", "exponential"}, {"c", prm.at(0)}}; break;
    case FKind::Quadratic: f = {{"type", "quadratic"}, {"a", prm.at(0)}, {"b", prm.at(1)}, {"c", prm.at(2)}}; break;
    case FKind::Majority: f = {{"type", "majority"}}; break;
    case FKind::Table: f = {{"type", "table"}, {"values", prm}}; break;
    case FKind::Custom: f = {{"type", "custom"}, {"name", model.spec.name()}}; break;
  }
  return Json{{"p", model.p},
              {"q", model.q},
              {"sampling", model.sampling == Sampling::WithReplacement ? "with" : "without"},
              {"k", k},
              {"f", f},
              {"allow_half", model.allow_half}};
}

ExperimentPlan plan_from_json(const Json& j, const ModelConfig& model) {
  constexpr std::string_view where = "experiment";
  require_object(j, where);
  reject_unknown(j, where,
                 {"replicates", "horizon", "checkpoints", "seed", "alpha", "threads", "mode", "oracle_budget",
                  "allow_indeterminate"});
  ExperimentPlan plan;
  plan.model = model;
  plan.replicates = integer(j, "replicates", where);
  plan.horizon = integer(j, "horizon", where);
  if (j.contains("checkpoints")) plan.checkpoints = array_of<std::int64_t>(j, "checkpoints", where);
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
    throw ConfigError("experiment.seed must be a non-negative integer");
  }
  plan.master_seed = j.at("seed").get<std::uint64_t>();
  plan.alpha = number_or(j, "alpha", 0.01, where);
  if (j.contains("threads")) plan.workers = static_cast<int>(integer(j, "threads", where));
  if (j.contains("mode")) {
    const std::string mode = text(j, "mode", where);
    if (mode == "literal") {
      plan.mode = SimMode::Literal;
    } else if (mode == "collapsed") {
      plan.mode = SimMode::Collapsed;
    } else {
      throw ConfigError("experiment.mode must be \"literal\" or \"collapsed\"");
    }
  }
  if (j.contains("oracle_budget")) plan.oracle_budget = integer(j, "oracle_budget", where);
  if (j.contains("allow_indeterminate")) {
    if (!j.at("allow_indeterminate").is_boolean()) throw ConfigError("experiment.allow_indeterminate must be a boolean");
    plan.allow_indeterminate = j.at("allow_indeterminate").get<bool>();
  }
  try {
    plan.validate();
  } catch (const PlanError& e) {
    throw ConfigError(e.what());
  }
  return plan;
}

Json to_json(const RegimeReport& r) {
  return Json{{"fixed_points", r.fixed_points},
              {"unique", r.unique},
              {"x_star", optional_number(r.x_star)},
              {"tau", optional_number(r.tau)},
              {"regime", to_string(r.regime)},
              {"centering", optional_number(r.centering)},
              {"scaling_exponent", r.scaling_exponent},
              {"predicted_variance", optional_number(r.predicted_variance)},
              {"warnings", r.warnings}};
}

Json to_json(const ConditionReport& report) {
  Json out = Json::object();
  for (auto id : kConditionIds) {
    const ConditionResult& c = report.at(id);
    out[std::string(id)] = {{"status", to_string(c.status)}, {"evidence", c.evidence}};
  }
  return out;
}

Json to_json(const MomentSummary& m) {
  return Json{{"count", m.count},
              {"mean", m.mean},
              {"variance", m.variance},
              {"skewness", m.skewness},
              {"excess_kurtosis", m.excess_kurtosis},
              {"shape_defined", m.shape_defined},
              {"se_mean", m.se_mean},
              {"se_variance", m.se_variance},
              {"se_skewness", m.se_skewness},
              {"se_kurtosis", m.se_kurtosis}};
}

Json to_json(const StabilityTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.increments) {
    rows.push_back({{"n_from", r.n_from},
                    {"n_to", r.n_to},
                    {"mean_abs_increment", r.mean_abs_increment},
                    {"shifted_increment", r.shifted_increment},
                    {"ratio", r.ratio}});
  }
  return Json{{"n", t.n},
              {"w_variance", t.w_variance},
              {"increments", rows},
              {"log2_ratio_slope", optional_number(t.log2_ratio_slope)},
              {"slope_threshold", t.slope_threshold},
              {"stabilizing", t.stabilizing ? Json(*t.stabilizing) : Json(nullptr)}};
}

Json to_json(const ExperimentResult& res) {
  const ExperimentPlan& plan = res.plan;
  Json cps = Json::array();
  for (const auto& c : res.checkpoints) {
    cps.push_back({{"n", c.n},
                   {"mean", c.mean},
                   {"variance", c.variance},
                   {"scaled_mean", optional_number(c.scaled_mean)},
                   {"scaled_variance", optional_number(c.scaled_variance)},
                   {"z_mean", optional_number(c.z_mean)},
                   {"z_variance", optional_number(c.z_variance)}});
  }
  Json out;
  out["plan"] = {{"model", model_to_json(plan.model)},
                 {"replicates", plan.replicates},
                 {"horizon", plan.horizon},
                 {"checkpoints", plan.resolved_checkpoints()},
                 {"seed", plan.master_seed},
                 {"alpha", plan.alpha},
                 {"mode", to_string(plan.mode)},
                 {"oracle_budget", plan.oracle_budget}};
  out["regime"] = to_json(res.regime);
  out["checkpoints"] = cps;
  out["final_scaled_moments"] = res.final_scaled_moments ? to_json(*res.final_scaled_moments) : Json(nullptr);
  if (res.lln) {
    out["lln"] = {{"target", res.lln->target},
                  {"mean", res.lln->mean},
                  {"sd", res.lln->sd},
                  {"tolerance", res.lln->tolerance},
                  {"tolerance_provenance", res.lln->provenance},
                  {"pass", res.lln->pass}};
  } else {
    out["lln"] = nullptr;
  }
  if (res.ks) {
    const double root_r = std::sqrt(static_cast<double>(plan.replicates));
    out["ks"] = {{"statistic", res.ks->statistic},
                 {"scaled_statistic", root_r * res.ks->statistic},
                 {"critical", res.ks->critical},
                 {"pass", res.ks->pass}};
  } else {
    out["ks"] = nullptr;
  }
  out["stability"] = res.stability ? to_json(*res.stability) : Json(nullptr);
  out["all_pass"] = res.all_pass();
  out["warnings"] = res.warnings;
  return out;
}

Json to_json(const ExactPmf& row) { return Json{{"n", row.n}, {"prob", row.prob}}; }

std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result, const std::filesystem::path& dir,
                                                    const std::vector<OutputFormat>& formats) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const SampleMatrix& sm = result.samples;
  auto open = [&written](const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    written.push_back(p);
    return os;
  };
  for (OutputFormat f : formats) {
    switch (f) {
      case OutputFormat::Summary: {
        auto os = open(dir / "summary.json");
        os << to_json(result).dump(2) << '\n';
        break;
      }
      case OutputFormat::Checkpoints: {
        auto os = open(dir / "checkpoints.jsonl");
        for (std::int64_t r = 0; r < sm.replicates; ++r) {
          for (std::size_t c = 0; c < sm.checkpoints.size(); ++c) {
            os << Json{{"replicate", r + 1}, {"n", sm.checkpoints[c]}, {"s_n", sm.at(r, c)}}.dump() << '\n';
          }
        }
        break;
      }
      case OutputFormat::Samples: {
        auto os = open(dir / "samples.csv");
        os << "replicate";
        for (std::int64_t n : sm.checkpoints) os << ",S_" << n;
        os << '\n';
        for (std::int64_t r = 0; r < sm.replicates; ++r) {
          os << r + 1;
          for (std::size_t c = 0; c < sm.checkpoints.size(); ++c) os << ',' << sm.at(r, c);
          os << '\n';
        }
        break;
      }
    }
  }
  return written;
}

}  // namespace erw
