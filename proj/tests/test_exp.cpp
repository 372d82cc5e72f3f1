#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dtnf/exp/recipes.hpp"

using namespace dtnf;
using namespace dtnf::exp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dtnf_test_" + name);
  fs::remove_all(dir);
  return dir;
}

json reference_json() {
  return json{{"M", 15}, {"N", 50}, {"N0", 10}, {"alpha", "4/5"}, {"lambda", 0.001}, {"gamma", 1}};
}

int run_cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(DTNF_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesNetworkAndAlphaForms) {
  ExperimentConfig c = config_from_json(Recipe::policy_map, reference_json());
  EXPECT_EQ(c.network().M_alpha(), 12);
  json j = reference_json();
  j["alpha"] = 0.8;
  EXPECT_EQ(*config_from_json(Recipe::policy_map, j).alpha, Rational(4, 5));
  j["alpha"] = "0.8";
  EXPECT_EQ(*config_from_json(Recipe::policy_map, j).alpha, Rational(4, 5));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  json j = reference_json();
  j["lamda"] = 1;
  EXPECT_THROW(config_from_json(Recipe::policy_map, j), ParamError);
  j = reference_json();
  j["M"] = "fifteen";
  EXPECT_THROW(config_from_json(Recipe::policy_map, j), ParamError);
  j = reference_json();
  j["alpha"] = 1;
  EXPECT_THROW(config_from_json(Recipe::policy_map, j).network(), ParamError);
  EXPECT_THROW(config_from_json(Recipe::fluid_run, json{{"X", 0.2}}).scaled(), ParamError);
}

TEST(Config, CommandLineBeatsFileBeatsDefaults) {
  json j = reference_json();
  j["seed"] = 5;
  j["replications"] = 30;
  ExperimentConfig c = config_from_json(Recipe::simulate, j);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.format, Format::csv);
  Overrides o;
  o.seed = 9;
  o.format = Format::json;
  o.mode = Relaying::two_hop;
  o.no_timestamp = true;
  apply(c, o);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.replications, 30u);
  EXPECT_EQ(c.format, Format::json);
  EXPECT_EQ(c.mode, Relaying::two_hop);
  EXPECT_FALSE(c.timestamp);
}

TEST(Config, NetworkAtScalesPerNodeRates) {
  const json j = {{"X", 0.2}, {"Y0", 0.2}, {"alpha", "4/5"}, {"gamma", 0.5}};
  const NetworkParams p = config_from_json(Recipe::cost_compare, j).network_at(50, 5e-4);
  EXPECT_EQ(p.M, 10);
  EXPECT_EQ(p.N, 40);
  EXPECT_EQ(p.N0, 10);
  EXPECT_NEAR(p.lambda, 5e-4, 1e-18);
  EXPECT_NEAR(p.gamma, 0.5, 1e-15);
}

TEST(Recipes, PolicyMapBoundary) {
  const RecipeOutput out = run_policy_map(config_from_json(Recipe::policy_map, reference_json()));
  EXPECT_NE(std::find(out.text.begin(), out.text.end(), "m=5 -> last-copy n=24"), out.text.end());
  EXPECT_NE(std::find(out.text.begin(), out.text.end(), "m=7 -> last-copy n=19"), out.text.end());
  EXPECT_TRUE(out.summary["boundary_nonincreasing"].get<bool>());
  ASSERT_EQ(out.tables.size(), 3u);
  EXPECT_EQ(out.tables[0].columns, (std::vector<std::string>{"m", "n", "action"}));
  EXPECT_EQ(out.tables[1].columns, (std::vector<std::string>{"m", "n", "J_d", "J_r"}));
}

TEST(Recipes, FluidSummary) {
  const json j = {{"X", 0.2}, {"Y", 0.8}, {"Y0", 0.2}, {"alpha", "4/5"}, {"Lambda", 0.05}, {"Gamma", 50},
                  {"samples", 50}};
  const RecipeOutput out = run_fluid(config_from_json(Recipe::fluid_run, j));
  for (const char* key : {"tau_star", "tau", "y_tau_star", "fluid_cost", "mode"})
    EXPECT_TRUE(out.summary.contains(key)) << key;
  EXPECT_NEAR(out.summary["tau_star"].get<double>(), 34.41055, 1e-4);
  EXPECT_EQ(out.tables[0].columns, (std::vector<std::string>{"t", "x", "y", "phi", "mode"}));
  EXPECT_EQ(out.tables[0].rows.size(), 52u);
}

TEST(Recipes, OracleCheckAgrees) {
  const json j = {{"M", 5}, {"N", 9}, {"N0", 2}, {"alpha", "4/5"}, {"lambda", 0.1}, {"gamma", 0.1}};
  const RecipeOutput out = run_oracle_check(config_from_json(Recipe::oracle_check, j));
  EXPECT_EQ(out.status, 0);
  EXPECT_EQ(out.summary["action_mismatches"].get<int>(), 0);
}

TEST(Recipes, SimulateSchemas) {
  json j = reference_json();
  j["replications"] = 20;
  j["trajectories"] = 2;
  const RecipeOutput out = run_simulate(config_from_json(Recipe::simulate, j));
  EXPECT_EQ(out.tables[0].columns,
            (std::vector<std::string>{"rep", "seed", "T_d", "relay_copies", "dest_copies", "total_cost"}));
  EXPECT_EQ(out.tables[0].rows.size(), 20u);
  EXPECT_EQ(out.tables[1].columns, (std::vector<std::string>{"rep", "t", "m", "n"}));
}

TEST(Recipes, ConvergeFluidColumnsIdenticalAcrossSeeds) {
  const json j = {{"X", 0.2}, {"Y", 0.8}, {"Y0", 0.2}, {"alpha", "4/5"}, {"Lambda", 0.05}, {"Gamma", 50},
                  {"K", {100}}, {"replications", 5}};
  const RecipeOutput out = run_converge(config_from_json(Recipe::converge, j));
  const Table& runs = out.tables[1];
  ASSERT_EQ(runs.rows.size(), 5u);
  const auto col = [&](const char* name) {
    return static_cast<std::size_t>(std::find(runs.columns.begin(), runs.columns.end(), name) - runs.columns.begin());
  };
  for (const auto& row : runs.rows) {
    EXPECT_EQ(row[col("tau")], runs.rows[0][col("tau")]);
    EXPECT_EQ(row[col("tau_star")], runs.rows[0][col("tau_star")]);
  }
  EXPECT_NE(runs.rows[0][col("seed")], runs.rows[1][col("seed")]);
}

TEST(Output, CsvHeaderAndNullCells) {
  ExperimentConfig c = config_from_json(Recipe::policy_map, reference_json());
  c.timestamp = false;
  c.out = scratch("csv");
  RecipeOutput out;
  out.tables.push_back({"t", {"a", "b"}, {}});
  out.tables[0].add({1, nullptr});
  out.tables[0].add({0.5, "x,y"});
  write_output(out, c);
  const std::string text = slurp(c.out / "t.csv");
  EXPECT_EQ(text.rfind("# recipe=policy-map\n", 0), 0u);
  EXPECT_EQ(text.find("# generated="), std::string::npos);
  EXPECT_NE(text.find("a,b\n1,\n0.5,\"x,y\"\n"), std::string::npos);
  EXPECT_THROW(out.tables[0].add({1}), std::logic_error);
}

TEST(Cli, EndToEndByteIdentical) {
  const fs::path a = scratch("cli_a"), b = scratch("cli_b"), err = scratch("cli_err");
  const std::string cfg = std::string(DTNF_CONFIG_DIR) + "/policy_map.json";
  ASSERT_EQ(run_cli("policy-map --config " + cfg + " --out " + a.string() + " --no-timestamp", err), 0);
  ASSERT_EQ(run_cli("policy-map --config " + cfg + " --out " + b.string() + " --no-timestamp", err), 0);
  for (const char* f : {"policy_map.csv", "cost_table.csv", "boundary.csv", "summary.json", "policy-map.txt"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_NE(slurp(a / "policy-map.txt").find("m=5 -> last-copy n=24"), std::string::npos);

  const fs::path c = scratch("cli_json");
  ASSERT_EQ(run_cli("simulate --config " + std::string(DTNF_CONFIG_DIR) + "/simulate.json --reps 20 --seed 4 --format json"
                    " --mode two-hop --out " + c.string(), err),
            0);
  const json doc = json::parse(slurp(c / "simulate.json"));
  EXPECT_EQ(doc["config"]["replications"], "20");
  EXPECT_EQ(doc["config"]["mode"], "two-hop");
  EXPECT_TRUE(doc.contains("generated"));
  EXPECT_EQ(doc["tables"]["runs"].size(), 20u);
}

TEST(Cli, FailuresAreMachineReadable) {
  const fs::path err = scratch("cli_fail");
  EXPECT_NE(run_cli("policy-map --config /nonexistent.json", err), 0);
  const json e = json::parse(slurp(err));
  EXPECT_EQ(e["error"], "invalid-config");
  EXPECT_EQ(e["recipe"], "policy-map");

  EXPECT_NE(run_cli("no-such-recipe --config x", err), 0);
  EXPECT_EQ(json::parse(slurp(err))["error"], "usage");
}
