#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtnf/core/format.hpp"
#include "dtnf/core/params.hpp"
#include "dtnf/core/policy.hpp"

namespace dtnf::exp {

using nlohmann::json;

enum class Recipe { policy_map, fluid_run, converge, cost_compare, twohop_compare, oracle_check, simulate };
enum class Format { csv, json };

inline constexpr std::pair<Recipe, const char*> recipe_names[] = {
    {Recipe::policy_map, "policy-map"},     {Recipe::fluid_run, "fluid-run"},
    {Recipe::converge, "converge"},         {Recipe::cost_compare, "cost-compare"},
    {Recipe::twohop_compare, "twohop-compare"}, {Recipe::oracle_check, "oracle-check"},
    {Recipe::simulate, "simulate"},
};

inline const char* to_string(Recipe r) {
  for (const auto& [value, name] : recipe_names)
    if (value == r) return name;
  return "?";
}

inline Recipe parse_recipe(std::string_view text) {
  for (const auto& [value, name] : recipe_names)
    if (text == name) return value;
  throw ParamError("unknown recipe '" + std::string(text) + "'");
}

inline const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

inline Format parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw ParamError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

/// Values given on the command line; each one, when set, beats the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<std::filesystem::path> out;
  std::optional<Format> format;
  std::optional<Relaying> mode;
  bool no_timestamp = false;
};

struct ExperimentConfig {
  Recipe recipe = Recipe::policy_map;

  // Network form.
  std::optional<int> M, N, N0;
  std::optional<double> lambda, gamma;
  // Scaled form.
  std::optional<double> X, Y, Y0, Lambda, Gamma;
  std::optional<Rational> alpha;

  std::vector<int> K;
  std::vector<double> lambdas;
  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path out = "dtnf-out";
  Format format = Format::csv;
  Relaying mode = Relaying::epidemic;
  bool timestamp = true;

  // simulate
  std::string policy = "optimal";
  std::optional<double> t_star;
  std::size_t trajectories = 10;
  // fluid-run
  std::size_t samples = 1000;

  bool has_network() const { return M && N && N0 && alpha && lambda && gamma; }
  bool has_scaled() const { return X && Y0 && alpha && Lambda && Gamma; }

  NetworkParams network() const {
    if (!has_network()) throw ParamError(std::string(to_string(recipe)) + ": needs M, N, N0, alpha, lambda, gamma");
    return validate(NetworkParams{*M, *N, *N0, *alpha, *lambda, *gamma});
  }

  /// Scaled parameters from X, Y0, Lambda, Gamma (Y defaults to 1 - X), or
  /// from the network form when that is what was given.
  ScaledParams scaled() const {
    if (has_scaled()) return ScaledParams::fluid_only(*X, Y.value_or(1.0 - *X), *Y0, *alpha, *Lambda, *Gamma);
    if (has_network()) return scale(network());
    throw ParamError(std::string(to_string(recipe)) + ": needs X, Y0, alpha, Lambda, Gamma (or a network)");
  }

  /// Network with K nodes at fixed X, Y0, alpha and per-node lambda, gamma.
  NetworkParams network_at(int nodes, double lam) const {
    if (!(X && Y0 && alpha && gamma))
      throw ParamError(std::string(to_string(recipe)) + ": needs X, Y0, alpha, gamma");
    ScaledParams s = ScaledParams::fluid_only(*X, Y.value_or(1.0 - *X), *Y0, *alpha, lam * nodes, *gamma * nodes);
    return unscale(s, nodes);
  }

  PolicySpec policy_spec() const {
    if (policy == "optimal") return OptimalClosedLoop{};
    if (policy == "always-copy") return AlwaysCopy{};
    if (policy == "never-copy") return NeverCopy{};
    if (policy == "open-loop") {
      if (!t_star) throw ParamError("policy open-loop needs t_star");
      return OpenLoopThreshold{*t_star};
    }
    throw ParamError("unknown policy '" + policy + "'");
  }

  /// Resolved values, echoed into every output.
  std::vector<std::pair<std::string, std::string>> echo() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("recipe", to_string(recipe));
    auto opt_int = [&](const char* k, const std::optional<int>& v) {
      if (v) kv.emplace_back(k, std::to_string(*v));
    };
    auto opt_double = [&](const char* k, const std::optional<double>& v) {
      if (v) kv.emplace_back(k, format_double(*v));
    };
    opt_int("M", M);
    opt_int("N", N);
    opt_int("N0", N0);
    if (alpha) kv.emplace_back("alpha", dtnf::to_string(*alpha));
    opt_double("lambda", lambda);
    opt_double("gamma", gamma);
    opt_double("X", X);
    opt_double("Y", Y);
    opt_double("Y0", Y0);
    opt_double("Lambda", Lambda);
    opt_double("Gamma", Gamma);
    auto join = [](const auto& v) {
      std::string s;
      for (const auto& e : v) {
        if (!s.empty()) s += ' ';
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, double>)
          s += format_double(e);
        else
          s += std::to_string(e);
      }
      return s;
    };
    if (!K.empty()) kv.emplace_back("K", join(K));
    if (!lambdas.empty()) kv.emplace_back("lambdas", join(lambdas));
    kv.emplace_back("replications", std::to_string(replications));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("mode", dtnf::to_string(mode));
    kv.emplace_back("format", to_string(format));
    if (recipe == Recipe::simulate) {
      kv.emplace_back("policy", policy);
      opt_double("t_star", t_star);
      kv.emplace_back("trajectories", std::to_string(trajectories));
    }
    if (recipe == Recipe::fluid_run) kv.emplace_back("samples", std::to_string(samples));
    return kv;
  }
};

namespace detail {

inline Rational alpha_from_json(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  // Re-read the literal's shortest decimal text so 0.8 becomes exactly 4/5.
  if (v.is_number()) return parse_rational(format_double(v.get<double>()));
  throw ParamError("alpha must be a string rational or a number");
}

}  // namespace detail

/// Builds a config from a JSON object. Unknown keys are an error so typos do
/// not silently fall back to defaults.
inline ExperimentConfig config_from_json(Recipe recipe, const json& j) {
  if (!j.is_object()) throw ParamError("config must be a JSON object");
  static const std::set<std::string> known = {
      "M",    "N",     "N0",      "alpha",    "lambda",       "gamma",  "X",      "Y",       "Y0",
      "Lambda", "Gamma", "K",     "lambdas",  "replications", "seed",   "out",    "format",  "mode",
      "no_timestamp", "policy", "t_star", "trajectories", "samples", "description"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ParamError("unknown config key '" + key + "'");

  ExperimentConfig c;
  c.recipe = recipe;
  try {
    auto get = [&](const char* k, auto& dst) {
      if (j.contains(k)) dst = j.at(k).get<std::decay_t<decltype(*dst)>>();
    };
    get("M", c.M);
    get("N", c.N);
    get("N0", c.N0);
    get("lambda", c.lambda);
    get("gamma", c.gamma);
    get("X", c.X);
    get("Y", c.Y);
    get("Y0", c.Y0);
    get("Lambda", c.Lambda);
    get("Gamma", c.Gamma);
    get("t_star", c.t_star);
    if (j.contains("alpha")) c.alpha = detail::alpha_from_json(j.at("alpha"));
    if (j.contains("K")) {
      const json& k = j.at("K");
      c.K = k.is_array() ? k.get<std::vector<int>>() : std::vector<int>{k.get<int>()};
    }
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (j.contains("replications")) c.replications = j.at("replications").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
    if (j.contains("mode")) c.mode = parse_relaying(j.at("mode").get<std::string>());
    if (j.contains("no_timestamp")) c.timestamp = !j.at("no_timestamp").get<bool>();
    if (j.contains("policy")) c.policy = j.at("policy").get<std::string>();
    if (j.contains("trajectories")) c.trajectories = j.at("trajectories").get<std::size_t>();
    if (j.contains("samples")) c.samples = j.at("samples").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParamError(std::string("config: ") + e.what());
  }
  return c;
}

inline void apply(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.replications) c.replications = *o.replications;
  if (o.out) c.out = *o.out;
  if (o.format) c.format = *o.format;
  if (o.mode) c.mode = *o.mode;
  if (o.no_timestamp) c.timestamp = false;
}

inline ExperimentConfig load_config(Recipe recipe, const std::filesystem::path& file, const Overrides& o = {}) {
  std::ifstream in(file);
  if (!in) throw ParamError("cannot read config file '" + file.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParamError("config '" + file.string() + "': " + e.what());
  }
  ExperimentConfig c = config_from_json(recipe, j);
  apply(c, o);
  return c;
}

}  // namespace dtnf::exp
