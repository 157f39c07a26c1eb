// upac: command-line front end.
//
//   upac gen-mdp --states 5 --actions 3 --horizon 10 --seed 1 --out mdp.json
//   upac run --config experiment.json
//   upac verify-bounds --bound UniformHoeffding --delta 0.1 --max-t 10000 --trials 10000
//   upac summarize --dir results

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "upac/confidence.hpp"
#include "upac/envgen.hpp"
#include "upac/harness.hpp"

namespace {

int gen_mdp(const upac::RandomMDPSpec& spec, const std::string& out_path) {
  const auto mdp = upac::random_mdp(spec);
  const std::string body = upac::to_json(mdp) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << body;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return 1;
  }
  out << body;
  return out ? 0 : 1;
}

int run(const std::string& config_path) {
  const auto config = upac::load_config(config_path);
  const auto report = upac::run_experiment(config);
  std::cout << "rho* = " << upac::format_double(report.rho_star) << "\n";
  for (const auto& s : report.summaries)
    std::cout << s.algorithm << " seed=" << s.seed << " T=" << s.T
              << " regret=" << upac::format_double(s.regret)
              << " final_window_return=" << upac::format_double(s.final_window_mean_return)
              << "\n";
  std::cout << "wrote " << report.output_dir.string() << "\n";
  return 0;
}

int verify_bounds(upac::BoundSpec bound, std::uint64_t max_t, std::uint64_t trials,
                  std::uint64_t seed) {
  upac::Rng rng(seed);
  const auto result = upac::monte_carlo_failure_rate(bound, max_t, trials, rng);
  const double budget = upac::failure_budget(bound);
  const bool pass = result.rate <= budget + 3.0 * result.standard_error;
  std::cout << upac::to_string(bound.kind) << ' ' << upac::format_double(result.rate) << ' '
            << upac::format_double(result.standard_error) << ' ' << upac::format_double(budget)
            << ' ' << (pass ? "pass" : "fail") << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Episodic tabular RL with time-uniform confidence bounds"};
  app.require_subcommand(1);

  upac::RandomMDPSpec spec;
  std::string out_path;
  auto* gen = app.add_subcommand("gen-mdp", "Generate a random sparse-reward MDP as JSON");
  gen->add_option("--states", spec.num_states, "Number of states")->check(CLI::PositiveNumber);
  gen->add_option("--actions", spec.num_actions, "Number of actions")->check(CLI::PositiveNumber);
  gen->add_option("--horizon", spec.horizon, "Episode length")->check(CLI::PositiveNumber);
  gen->add_option("--alpha", spec.dirichlet_alpha, "Dirichlet concentration");
  gen->add_option("--zero-reward-prob", spec.zero_reward_prob, "Probability of a zero reward");
  gen->add_option("--seed", spec.seed, "64-bit seed");
  gen->add_option("--out", out_path, "Output path (stdout if omitted)");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::string bound_name = "UniformHoeffding";
  std::uint64_t max_t = 10000, trials = 10000, seed = 0;
  std::map<std::string, double> params;
  double delta = 0.1;
  auto* verify = app.add_subcommand("verify-bounds", "Monte-Carlo failure rate of a uniform bound");
  verify->add_option("--bound", bound_name, "UniformHoeffding | UniformBernoulli | UniformL1 | "
                                            "VisitationLower | FixedTimeHoeffding | LogTWidth");
  verify->add_option("--delta", delta, "Failure probability");
  verify->add_option("--max-t", max_t, "Path length")->check(CLI::PositiveNumber);
  verify->add_option("--trials", trials, "Number of sample paths")->check(CLI::Range(100ULL, ~0ULL));
  verify->add_option("--seed", seed, "64-bit seed");
  for (const char* name : {"sigma", "mu", "U", "p", "W", "radius"})
    verify->add_option_function<double>(std::string("--") + name,
                                        [&params, name](double v) { params[name] = v; },
                                        std::string("Bound parameter ") + name);

  std::string summary_dir;
  auto* summarize = app.add_subcommand("summarize", "Collect summary.json files into one table");
  summarize->add_option("--dir", summary_dir, "Results directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return gen_mdp(spec, out_path);
    if (*run_cmd) return run(config_path);
    if (*verify) {
      upac::BoundSpec bound;
      bound.kind = upac::bound_kind_from_string(bound_name);
      bound.parameters = params;
      bound.parameters["delta"] = delta;
      return verify_bounds(bound, max_t, trials, seed);
    }
    if (*summarize) {
      std::cout << upac::summarize_directory(summary_dir) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
