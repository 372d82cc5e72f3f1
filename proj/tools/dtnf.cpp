// dtnf: experiment recipes for epidemic and two-hop relaying.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dtnf/exp/recipes.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, const std::string& recipe, int code) {
  nlohmann::json err = {{"error", kind}, {"message", message}};
  if (!recipe.empty()) err["recipe"] = recipe;
  std::cerr << err.dump() << '\n';
  return code;
}

const char* describe(dtnf::exp::Recipe r) {
  using dtnf::exp::Recipe;
  switch (r) {
    case Recipe::policy_map: return "copy/no-copy map, cost table and boundary for one network";
    case Recipe::fluid_run: return "integrate the fluid limit and locate the stop time";
    case Recipe::converge: return "distance between scaled sample paths and the fluid limit over K";
    case Recipe::cost_compare: return "closed-loop optimum vs fluid open-loop threshold over lambda and K";
    case Recipe::twohop_compare: return "epidemic vs two-hop relaying, fluid and simulated";
    case Recipe::oracle_check: return "threshold policy against brute-force value iteration";
    case Recipe::simulate: return "replications of a single policy, optionally with trajectories";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dtnf;
  using namespace dtnf::exp;

  CLI::App app{"Optimal relay-copy control: policy maps, fluid limits and Monte Carlo recipes"};
  app.require_subcommand(1);

  std::string config_file, out_dir, format, mode;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  bool no_timestamp = false;

  for (const auto& [recipe, name] : recipe_names) {
    CLI::App* sub = app.add_subcommand(name, describe(recipe));
    sub->add_option("--config", config_file, "JSON config file")->required();
    sub->add_option("--seed", seed, "base seed (overrides config)");
    sub->add_option("--reps", reps, "replications (overrides config)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--mode", mode, "epidemic or two-hop")->check(CLI::IsMember({"epidemic", "two-hop"}));
    sub->add_flag("--no-timestamp", no_timestamp, "omit the generation time so reruns are byte-identical");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), "", 2);
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    Overrides o;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--reps")) o.replications = reps;
    if (sub->count("--out")) o.out = out_dir;
    if (sub->count("--format")) o.format = parse_format(format);
    if (sub->count("--mode")) o.mode = parse_relaying(mode);
    o.no_timestamp = no_timestamp;

    const ExperimentConfig config = load_config(parse_recipe(name), config_file, o);
    const RecipeOutput out = run_recipe(config);
    for (const auto& path : write_output(out, config)) std::cout << path.string() << '\n';
    if (out.status != 0) return fail("check-failed", out.summary.dump(), name, out.status);
    return 0;
  } catch (const ParamError& e) {
    return fail("invalid-config", e.what(), name, 1);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), name, 1);
  }
}
