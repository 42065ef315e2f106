#include "erw/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "erw/errors.hpp"
#include "erw/report.hpp"

namespace erw::cli {

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> replicates;
  std::optional<std::string> mode;
  std::optional<std::int64_t> n_max;
  bool assert_verdicts = false;
  bool pretty = false;
};

struct Document {
  Json root;
  ModelConfig model;
};

Document load(const Flags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required");
  std::ifstream is(flags.config);
  if (!is) throw ConfigError("cannot read config " + flags.config);
  Document doc;
  try {
    doc.root = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.root.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.root.items()) {
    if (key != "model" && key != "experiment" && key != "output") {
      throw ConfigError("unknown top-level key \"" + key + "\"");
    }
  }
  if (!doc.root.contains("model")) throw ConfigError("config needs a \"model\" object");
  doc.model = model_from_json(doc.root.at("model"));
  return doc;
}

SimMode parse_mode(const std::string& s) {
  if (s == "literal") return SimMode::Literal;
  if (s == "collapsed") return SimMode::Collapsed;
  throw ConfigError("--mode must be literal or collapsed");
}

// Experiment plan from the config plus flag overrides. Fields the config
// omits fall back to `defaults`.
ExperimentPlan make_plan(const Document& doc, const Flags& flags, const ExperimentPlan& defaults) {
  ExperimentPlan plan = defaults;
  plan.model = doc.model;
  if (doc.root.contains("experiment")) {
    Json e = doc.root.at("experiment");
    if (!e.is_object()) throw ConfigError("experiment must be an object");
    // Flags may supply what the document leaves out.
    if (!e.contains("replicates")) e["replicates"] = flags.replicates.value_or(defaults.replicates);
    if (!e.contains("horizon")) e["horizon"] = flags.horizon.value_or(defaults.horizon);
    if (!e.contains("seed")) e["seed"] = flags.seed.value_or(defaults.master_seed);
    plan = plan_from_json(e, doc.model);
  }
  if (flags.seed) plan.master_seed = *flags.seed;
  if (flags.horizon) plan.horizon = *flags.horizon;
  if (flags.replicates) plan.replicates = *flags.replicates;
  if (flags.mode) plan.mode = parse_mode(*flags.mode);
  if (flags.horizon && !plan.checkpoints.empty()) {
    std::erase_if(plan.checkpoints, [&](std::int64_t c) { return c > plan.horizon; });
  }
  try {
    plan.validate();
  } catch (const PlanError& e) {
    throw ConfigError(e.what());
  }
  return plan;
}

struct OutputSpec {
  std::optional<std::filesystem::path> dir;
  std::vector<OutputFormat> formats{OutputFormat::Summary, OutputFormat::Checkpoints};
};

OutputSpec output_spec(const Document& doc, const Flags& flags) {
  OutputSpec spec;
  if (doc.root.contains("output")) {
    const Json& o = doc.root.at("output");
    if (!o.is_object()) throw ConfigError("output must be an object");
    for (const auto& [key, value] : o.items()) {
      if (key != "dir" && key != "formats") throw ConfigError("unknown key \"" + key + "\" in output");
    }
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("output.dir must be a string");
      spec.dir = o.at("dir").get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o.at("formats").is_array()) throw ConfigError("output.formats must be an array");
      spec.formats.clear();
      for (const auto& f : o.at("formats")) {
        const std::string name = f.is_string() ? f.get<std::string>() : "";
        if (name == "summary") {
          spec.formats.push_back(OutputFormat::Summary);
        } else if (name == "checkpoints") {
          spec.formats.push_back(OutputFormat::Checkpoints);
        } else if (name == "samples") {
          spec.formats.push_back(OutputFormat::Samples);
        } else {
          throw ConfigError("output.formats entries are summary, checkpoints or samples");
        }
      }
    }
  }
  if (!flags.out.empty()) spec.dir = flags.out;
  return spec;
}

void emit(std::ostream& out, const Json& j, bool pretty) { out << (pretty ? j.dump(2) : j.dump()) << '\n'; }

int cmd_analyze(const Flags& flags, std::ostream& out) {
  const Document doc = load(flags);
  const RegimeReport report = analyze_regime(doc.model);
  emit(out, to_json(report), flags.pretty);
  return report.unique && report.regime != Regime::Indeterminate ? kOk : kIndeterminate;
}

int cmd_check(const Flags& flags, std::ostream& out) {
  const Document doc = load(flags);
  emit(out, to_json(check_conditions(doc.model)), flags.pretty);
  return kOk;
}

int cmd_simulate(const Flags& flags, std::ostream& out) {
  const Document doc = load(flags);
  ExperimentPlan defaults;
  defaults.replicates = 1;
  defaults.horizon = flags.horizon.value_or(1000);
  const ExperimentPlan plan = make_plan(doc, flags, defaults);
  const SampleMatrix sm = simulate_samples(plan);

  std::optional<std::filesystem::path> file;
  if (!flags.out.empty()) {
    file = flags.out;
  } else if (const OutputSpec spec = output_spec(doc, flags); spec.dir) {
    std::filesystem::create_directories(*spec.dir);
    file = *spec.dir / "trajectories.csv";
  }
  Json j{{"command", "simulate"},
         {"replicates", plan.replicates},
         {"horizon", plan.horizon},
         {"seed", plan.master_seed},
         {"mode", to_string(plan.mode)},
         {"columns", {"replicate", "n", "s_n"}}};
  if (file) {
    std::ofstream os(*file, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + file->string());
    os << "replicate,n,s_n\n";
    for (std::int64_t r = 0; r < sm.replicates; ++r) {
      for (std::size_t c = 0; c < sm.checkpoints.size(); ++c) {
        os << r + 1 << ',' << sm.checkpoints[c] << ',' << sm.at(r, c) << '\n';
      }
    }
    j["file"] = file->string();
  } else {
    Json rows = Json::array();
    for (std::int64_t r = 0; r < sm.replicates; ++r) {
      for (std::size_t c = 0; c < sm.checkpoints.size(); ++c) {
        rows.push_back({r + 1, sm.checkpoints[c], sm.at(r, c)});
      }
    }
    j["records"] = rows;
  }
  emit(out, j, flags.pretty);
  return kOk;
}

int cmd_oracle(const Flags& flags, std::ostream& out) {
  const Document doc = load(flags);
  std::int64_t budget = kDefaultDpBudget;
  std::optional<std::int64_t> n_max = flags.n_max;
  if (doc.root.contains("experiment")) {
    const Json& e = doc.root.at("experiment");
    if (e.is_object() && e.contains("oracle_budget") && e.at("oracle_budget").is_number_integer()) {
      budget = e.at("oracle_budget").get<std::int64_t>();
    }
    if (!n_max && e.is_object() && e.contains("horizon") && e.at("horizon").is_number_integer()) {
      n_max = e.at("horizon").get<std::int64_t>();
    }
  }
  if (!n_max) throw ConfigError("oracle needs --n-max");
  const std::vector<ExactPmf> rows = exact_distribution(doc.model, *n_max, budget);
  Json j{{"command", "oracle"}, {"n_max", *n_max}};
  std::optional<std::filesystem::path> file;
  if (!flags.out.empty()) {
    file = flags.out;
  } else if (const OutputSpec spec = output_spec(doc, flags); spec.dir) {
    std::filesystem::create_directories(*spec.dir);
    file = *spec.dir / "pmf.csv";
  }
  if (file) {
    std::ofstream os(*file, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + file->string());
    os << "n,s,prob\n";
    os.precision(17);
    for (const auto& r : rows) {
      for (std::size_t m = 0; m < r.prob.size(); ++m) {
        os << r.n << ',' << 2 * static_cast<std::int64_t>(m) - r.n << ',' << r.prob[m] << '\n';
      }
    }
    j["file"] = file->string();
  } else {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    j["rows"] = arr;
  }
  emit(out, j, flags.pretty);
  return kOk;
}

int cmd_experiment(const Flags& flags, std::ostream& out, std::ostream& err) {
  const Document doc = load(flags);
  if (!doc.root.contains("experiment") && !(flags.horizon && flags.replicates)) {
    throw ConfigError("experiment needs an \"experiment\" object or --horizon and --replicates");
  }
  const ExperimentPlan plan = make_plan(doc, flags, ExperimentPlan{});
  const RegimeReport regime = analyze_regime(plan.model);
  if ((!regime.unique || regime.regime == Regime::Indeterminate) && !plan.allow_indeterminate) {
    emit(out, Json{{"error", "no unique fixed point with tau > 0"}, {"regime", to_json(regime)}}, flags.pretty);
    return kIndeterminate;
  }
  const ExperimentResult res = run_experiment(plan);
  const OutputSpec spec = output_spec(doc, flags);
  if (spec.dir) write_experiment(res, *spec.dir, spec.formats);
  emit(out, to_json(res), flags.pretty);
  if (flags.assert_verdicts && !res.all_pass()) {
    err << "experiment verdicts failed\n";
    return kAssertionFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elephant random walk with multiple extractions: analysis, exact laws and simulation"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file")->required();
    sub->add_flag("--pretty", flags.pretty, "Indent the JSON output");
  };
  auto add_run = [&flags](CLI::App* sub) {
    sub->add_option("--out", flags.out, "Output file or directory");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--horizon", flags.horizon, "Walk length N")->check(CLI::PositiveNumber);
    sub->add_option("--replicates", flags.replicates, "Number of replicates")->check(CLI::PositiveNumber);
    sub->add_option("--mode", flags.mode, "literal or collapsed")->check(CLI::IsMember({"literal", "collapsed"}));
  };
  CLI::App* analyze = app.add_subcommand("analyze", "Fixed points, tau and regime");
  CLI::App* check = app.add_subcommand("check", "Evaluate every hypothesis block");
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate trajectories");
  CLI::App* oracle = app.add_subcommand("oracle", "Exact law of S_n by dynamic programming");
  CLI::App* experiment = app.add_subcommand("experiment", "Monte Carlo test of the limit theorems");
  for (CLI::App* sub : {analyze, check, simulate, oracle, experiment}) add_common(sub);
  add_run(simulate);
  add_run(experiment);
  oracle->add_option("--n-max", flags.n_max, "Largest n")->check(CLI::PositiveNumber);
  oracle->add_option("--out", flags.out, "CSV output file");
  experiment->add_flag("--assert", flags.assert_verdicts, "Exit 3 when any verdict fails");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << Json{{"help", app.help()}}.dump() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    out << Json{{"error", e.what()}}.dump() << '\n';
    return kConfigError;
  }

  try {
    if (*analyze) return cmd_analyze(flags, out);
    if (*check) return cmd_check(flags, out);
    if (*simulate) return cmd_simulate(flags, out);
    if (*oracle) return cmd_oracle(flags, out);
    return cmd_experiment(flags, out, err);
  } catch (const NonUniqueFixedPoint& e) {
    err << e.what() << '\n';
    out << Json{{"error", e.what()}, {"fixed_points", e.roots()}}.dump() << '\n';
    return kIndeterminate;
  } catch (const TauNonpositive& e) {
    err << e.what() << '\n';
    out << Json{{"error", e.what()}}.dump() << '\n';
    return kIndeterminate;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    out << Json{{"error", e.what()}}.dump() << '\n';
    return kConfigError;
  }
}

}  // namespace erw::cli
