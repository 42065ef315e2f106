#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "erw/cli.hpp"
#include "erw/report.hpp"

using namespace erw;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("erw_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const Json& j) {
  const fs::path path = scratch() / (name + ".json");
  std::ofstream(path) << j.dump();
  return path;
}

struct Outcome {
  int code;
  Json out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "erw");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  Json j;
  const std::string text = out.str();
  REQUIRE_MESSAGE(std::count(text.begin(), text.end(), '\n') == 1, "stdout must hold one JSON line: " << text);
  j = Json::parse(text);
  return {code, j, err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json classical(double p) {
  return {{"p", p}, {"k", {{"type", "constant"}, {"value", 1}}}, {"f", {{"type", "linear"}}}};
}

}  // namespace

TEST_CASE("analyze examples and exit codes") {
  const Json maj{{"model", {{"p", 0.9}, {"k", {{"type", "constant"}, {"value", 3}}}, {"f", {{"type", "majority"}}}}}};
  const Outcome a = run_cli({"analyze", "--config", write_config("maj", maj).string()});
  CHECK(a.code == cli::kIndeterminate);
  REQUIRE(a.out.at("fixed_points").size() == 3);
  CHECK(a.out["fixed_points"][0].get<double>() == doctest::Approx(-0.7071068).epsilon(1e-7));
  CHECK(std::abs(a.out["fixed_points"][1].get<double>()) < 1e-12);
  CHECK(a.out["fixed_points"][2].get<double>() == doctest::Approx(0.7071068).epsilon(1e-7));

  const Json iid{{"model", {{"p", 0.7}, {"k", {{"type", "constant"}, {"value", 2}}}, {"f", {{"type", "constant"}, {"value", 1.0}}}}}};
  const Outcome b = run_cli({"analyze", "--config", write_config("iid", iid).string()});
  CHECK(b.code == cli::kOk);
  CHECK(b.out["x_star"].get<double>() == doctest::Approx(0.4));
  CHECK(b.out["tau"].get<double>() == doctest::Approx(1.0));
  CHECK(b.out["regime"] == "Diffusive");
  CHECK(b.out["predicted_variance"].get<double>() == doctest::Approx(0.84));

  const Outcome c = run_cli({"analyze", "--config", write_config("crit", Json{{"model", classical(0.75)}}).string()});
  CHECK(c.code == cli::kOk);
  CHECK(c.out["regime"] == "Critical");
  CHECK(c.out["predicted_variance"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("check examples") {
  const Json e1{{"model", {{"p", 0.55}, {"k", {{"type", "constant"}, {"value", 4}}}, {"f", {{"type", "linear"}}}}}};
  const Outcome a = run_cli({"check", "--config", write_config("e1", e1).string()});
  CHECK(a.code == cli::kOk);
  CHECK(a.out["E1"]["status"] == "Holds");
  CHECK(a.out["A1"]["status"] == "Holds");
  CHECK(a.out.size() == 23);

  const Json slow{{"model", {{"p", 0.6}, {"k", {{"type", "power"}, {"c", 1.0}, {"alpha", 0.3}}}, {"f", {{"type", "linear"}}}}}};
  const Outcome b = run_cli({"check", "--config", write_config("slow", slow).string()});
  CHECK(b.out["Cor1"]["status"] == "Fails");

  const Json lin{{"model", {{"p", 0.7}, {"k", {{"type", "constant"}, {"value", 3}}}, {"f", {{"type", "linear"}, {"c", 0.9}}}}}};
  CHECK(run_cli({"check", "--config", write_config("lin", lin).string()}).out["A1"]["status"] == "Holds");
}

TEST_CASE("config errors exit 1") {
  const Json bad_key{{"model", classical(0.6)}, {"extra", 1}};
  CHECK(run_cli({"analyze", "--config", write_config("bad_key", bad_key).string()}).code == cli::kConfigError);
  Json bad_model = classical(0.6);
  bad_model["colour"] = "red";
  CHECK(run_cli({"check", "--config", write_config("bad_model", Json{{"model", bad_model}}).string()}).code ==
        cli::kConfigError);
  const Json out_of_range{{"model", {{"p", 0.7}, {"k", {{"type", "constant"}, {"value", 3}}}, {"f", {{"type", "linear"}, {"c", 1.2}}}}}};
  const Outcome r = run_cli({"check", "--config", write_config("range", out_of_range).string()});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.out.contains("error"));
  CHECK(run_cli({"analyze", "--config", (scratch() / "missing.json").string()}).code == cli::kConfigError);
  CHECK(run_cli({"analyze"}).code == cli::kConfigError);
  CHECK(run_cli({"frobnicate", "--config", "x"}).code == cli::kConfigError);
  const Json half{{"model", classical(0.5)}};
  CHECK(run_cli({"analyze", "--config", write_config("half", half).string()}).code == cli::kConfigError);
}

TEST_CASE("simulate: degenerate single row, CSV export, determinism") {
  Json m = classical(0.75);
  m["q"] = 1.0;
  const fs::path cfg = write_config("q1", Json{{"model", m}});
  const Outcome a = run_cli({"simulate", "--config", cfg.string(), "--horizon", "1", "--replicates", "1"});
  CHECK(a.code == cli::kOk);
  CHECK(a.out["records"] == Json::array({Json::array({1, 1, 1})}));

  const fs::path csv1 = scratch() / "t1.csv", csv2 = scratch() / "t2.csv";
  const fs::path cfg2 = write_config("sim", Json{{"model", classical(0.6)}});
  for (const auto& path : {csv1, csv2}) {
    const Outcome r = run_cli({"simulate", "--config", cfg2.string(), "--horizon", "100", "--replicates", "3", "--seed",
                               "11", "--out", path.string()});
    CHECK(r.code == cli::kOk);
  }
  const std::string text = slurp(csv1);
  CHECK(text == slurp(csv2));
  CHECK(text.rfind("replicate,n,s_n\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 8);  // dyadic 1..64 plus 100
}

TEST_CASE("oracle rows") {
  const fs::path cfg = write_config("orc", Json{{"model", classical(0.75)}});
  const Outcome a = run_cli({"oracle", "--config", cfg.string(), "--n-max", "2"});
  CHECK(a.code == cli::kOk);
  const Json last = a.out["rows"].back();
  CHECK(last["n"] == 2);
  REQUIRE(last["prob"].size() == 3);
  CHECK(last["prob"][0].get<double>() == doctest::Approx(0.375));
  CHECK(last["prob"][1].get<double>() == doctest::Approx(0.25));
  CHECK(last["prob"][2].get<double>() == doctest::Approx(0.375));

  const fs::path csv = scratch() / "pmf.csv";
  CHECK(run_cli({"oracle", "--config", cfg.string(), "--n-max", "2", "--out", csv.string()}).code == cli::kOk);
  const std::string text = slurp(csv);
  CHECK(text.rfind("n,s,prob\n", 0) == 0);
  CHECK(text.find("2,-2,0.375") != std::string::npos);
  CHECK(run_cli({"oracle", "--config", cfg.string(), "--n-max", "5000"}).code == cli::kConfigError);
}

TEST_CASE("experiment --assert on the i.i.d. control, with result files") {
  const Json cfg{{"model", {{"p", 0.7}, {"k", {{"type", "constant"}, {"value", 1}}}, {"f", {{"type", "constant"}, {"value", 0.3}}}}},
                 {"experiment", {{"replicates", 400}, {"horizon", 1000}, {"seed", 21}}},
                 {"output", {{"formats", {"summary", "checkpoints", "samples"}}}}};
  const fs::path dir = scratch() / "exp";
  const Outcome r = run_cli({"experiment", "--config", write_config("exp", cfg).string(), "--assert", "--out", dir.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out["all_pass"] == true);
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "samples.csv"));
  const std::string jsonl = slurp(dir / "checkpoints.jsonl");
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 400 * 11);
  const Json first = Json::parse(jsonl.substr(0, jsonl.find('\n')));
  CHECK(first["replicate"] == 1);
  CHECK(first["n"] == 1);
  CHECK(std::abs(first["s_n"].get<int>()) == 1);

  // Same config twice gives byte-identical files.
  const fs::path dir2 = scratch() / "exp2";
  run_cli({"experiment", "--config", (scratch() / "exp.json").string(), "--out", dir2.string()});
  CHECK(slurp(dir / "summary.json") == slurp(dir2 / "summary.json"));
  CHECK(slurp(dir / "checkpoints.jsonl") == slurp(dir2 / "checkpoints.jsonl"));
}

TEST_CASE("experiment --assert exits 3 when a verdict fails") {
  // 100 replicates of a 2-step walk: the CLT is far from holding.
  const Json cfg{{"model", classical(0.6)},
                 {"experiment", {{"replicates", 100}, {"horizon", 2}, {"seed", 1}}}};
  const Outcome r = run_cli({"experiment", "--config", write_config("tiny", cfg).string(), "--assert"});
  CHECK(r.code == cli::kAssertionFailure);
  CHECK(r.out["all_pass"] == false);
}

TEST_CASE("experiment on an indeterminate model exits 2 unless allowed") {
  Json cfg{{"model", {{"p", 0.9}, {"k", {{"type", "constant"}, {"value", 3}}}, {"f", {{"type", "majority"}}}}},
           {"experiment", {{"replicates", 100}, {"horizon", 64}, {"seed", 1}}}};
  CHECK(run_cli({"experiment", "--config", write_config("ind", cfg).string()}).code == cli::kIndeterminate);
  cfg["experiment"]["allow_indeterminate"] = true;
  CHECK(run_cli({"experiment", "--config", write_config("ind2", cfg).string()}).code == cli::kOk);
}

TEST_CASE("--pretty indents the single JSON document") {
  const fs::path cfg = write_config("pretty", Json{{"model", classical(0.6)}});
  std::ostringstream out, err;
  CHECK(cli::run({"erw", "analyze", "--config", cfg.string(), "--pretty"}, out, err) == cli::kOk);
  const Json j = Json::parse(out.str());
  CHECK(j["regime"] == "Diffusive");
  CHECK(out.str().find("\n  \"") != std::string::npos);
}
