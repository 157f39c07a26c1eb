#include "upac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace upac {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& context) {
  if (!obj.is_object()) throw std::invalid_argument(context + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw std::invalid_argument(context + ": unknown field '" + key + "'");
}

template <typename T>
T field(const json& obj, const std::string& name, const std::string& context) {
  if (!obj.contains(name))
    throw std::invalid_argument(context + ": missing required field '" + name + "'");
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(context + ": field '" + name + "' has the wrong type (" +
                                e.what() + ")");
  }
}

template <typename T>
void optional_field(const json& obj, const std::string& name, const std::string& context, T& out) {
  if (obj.contains(name)) out = field<T>(obj, name, context);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

json summary_json(const RunSummary& s) {
  json j;
  j["algorithm"] = s.algorithm;
  j["seed"] = s.seed;
  j["T"] = s.T;
  j["regret"] = s.regret;
  j["mistake_curve"] = {{"epsilon", s.mistake_curve.epsilon_grid},
                        {"counts", s.mistake_curve.counts}};
  if (s.optimism_violations)
    j["optimism_violations"] = *s.optimism_violations;
  else
    j["optimism_violations"] = nullptr;
  j["final_window_mean_return"] = s.final_window_mean_return;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n');
    const auto last_nl = text.rfind('\n', pos == 0 ? 0 : pos - 1);
    const auto column = last_nl == std::string::npos || pos == 0 ? pos + 1 : pos - last_nl;
    std::ostringstream os;
    os << "config: syntax error at line " << line << ", column " << column << ": " << e.what();
    throw std::invalid_argument(os.str());
  }

  const std::string ctx = "config";
  reject_unknown(doc,
                 {"mdp", "algorithms", "seeds", "num_episodes", "delta", "epsilon_grid",
                  "log_every", "output_dir", "known_rewards", "plan_every", "return_window",
                  "master_seed", "workers"},
                 ctx);
  ExperimentConfig cfg;
  if (!doc.contains("mdp")) throw std::invalid_argument("config: missing required field 'mdp'");
  const json& mdp = doc.at("mdp");
  reject_unknown(mdp, {"random", "file"}, "config.mdp");
  if (mdp.contains("random") == mdp.contains("file"))
    throw std::invalid_argument("config.mdp: exactly one of 'random' or 'file' is required");
  if (mdp.contains("file")) {
    cfg.mdp.file = field<std::string>(mdp, "file", "config.mdp");
  } else {
    const json& r = mdp.at("random");
    const std::string rctx = "config.mdp.random";
    reject_unknown(r, {"states", "actions", "horizon", "dirichlet_alpha", "zero_reward_prob", "seed"},
                   rctx);
    RandomMDPSpec spec;
    optional_field(r, "states", rctx, spec.num_states);
    optional_field(r, "actions", rctx, spec.num_actions);
    optional_field(r, "horizon", rctx, spec.horizon);
    optional_field(r, "dirichlet_alpha", rctx, spec.dirichlet_alpha);
    optional_field(r, "zero_reward_prob", rctx, spec.zero_reward_prob);
    optional_field(r, "seed", rctx, spec.seed);
    cfg.mdp.random = spec;
  }
  cfg.algorithms = field<std::vector<std::string>>(doc, "algorithms", ctx);
  cfg.seeds = field<std::vector<std::uint64_t>>(doc, "seeds", ctx);
  optional_field(doc, "num_episodes", ctx, cfg.num_episodes);
  optional_field(doc, "delta", ctx, cfg.delta);
  optional_field(doc, "epsilon_grid", ctx, cfg.epsilon_grid);
  optional_field(doc, "log_every", ctx, cfg.log_every);
  optional_field(doc, "output_dir", ctx, cfg.output_dir);
  optional_field(doc, "known_rewards", ctx, cfg.known_rewards);
  optional_field(doc, "plan_every", ctx, cfg.plan_every);
  optional_field(doc, "return_window", ctx, cfg.return_window);
  optional_field(doc, "master_seed", ctx, cfg.master_seed);
  optional_field(doc, "workers", ctx, cfg.workers);
  validate(cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json doc;
  if (cfg.mdp.random) {
    const auto& r = *cfg.mdp.random;
    doc["mdp"] = {{"random",
                   {{"states", r.num_states},
                    {"actions", r.num_actions},
                    {"horizon", r.horizon},
                    {"dirichlet_alpha", r.dirichlet_alpha},
                    {"zero_reward_prob", r.zero_reward_prob},
                    {"seed", r.seed}}}};
  } else {
    doc["mdp"] = {{"file", cfg.mdp.file}};
  }
  doc["algorithms"] = cfg.algorithms;
  doc["seeds"] = cfg.seeds;
  doc["num_episodes"] = cfg.num_episodes;
  doc["delta"] = cfg.delta;
  doc["epsilon_grid"] = cfg.epsilon_grid;
  doc["log_every"] = cfg.log_every;
  doc["output_dir"] = cfg.output_dir;
  doc["known_rewards"] = cfg.known_rewards;
  doc["plan_every"] = cfg.plan_every;
  doc["return_window"] = cfg.return_window;
  doc["master_seed"] = cfg.master_seed;
  doc["workers"] = cfg.workers;
  return doc.dump(2);
}

ExperimentConfig load_config(const fs::path& path) {
  ExperimentConfig cfg = parse_config(read_file(path));
  if (!cfg.mdp.file.empty() && fs::path(cfg.mdp.file).is_relative())
    cfg.mdp.file = (path.parent_path() / cfg.mdp.file).lexically_normal().string();
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw std::invalid_argument("config: 'algorithms' must be nonempty");
  for (const auto& a : cfg.algorithms) algorithm_from_string(a);
  if (std::set<std::string>(cfg.algorithms.begin(), cfg.algorithms.end()).size() !=
      cfg.algorithms.size())
    throw std::invalid_argument("config: 'algorithms' contains duplicates");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: 'seeds' must be nonempty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    throw std::invalid_argument("config: 'seeds' contains duplicates");
  if (cfg.num_episodes < 1) throw std::invalid_argument("config: 'num_episodes' must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0))
    throw std::invalid_argument("config: 'delta' must lie in (0, 1]");
  if (cfg.log_every < 1) throw std::invalid_argument("config: 'log_every' must be >= 1");
  if (cfg.plan_every < 1) throw std::invalid_argument("config: 'plan_every' must be >= 1");
  if (cfg.return_window < 1) throw std::invalid_argument("config: 'return_window' must be >= 1");
  for (std::size_t i = 0; i < cfg.epsilon_grid.size(); ++i)
    if (!(cfg.epsilon_grid[i] > 0.0) || (i > 0 && !(cfg.epsilon_grid[i] > cfg.epsilon_grid[i - 1])))
      throw std::invalid_argument("config: 'epsilon_grid' must be positive and strictly increasing");
  if (cfg.mdp.random.has_value() == !cfg.mdp.file.empty())
    throw std::invalid_argument("config: exactly one MDP source is required");
  if (cfg.mdp.random) validate(*cfg.mdp.random);
}

TabularMDP load_mdp(const ExperimentConfig& cfg) {
  if (cfg.mdp.random) return random_mdp(*cfg.mdp.random);
  return mdp_from_json(read_file(cfg.mdp.file));
}

Rng run_rng(std::uint64_t master_seed, const std::string& algorithm, std::uint64_t seed) {
  return Rng::stream(master_seed, {fnv1a64(algorithm), seed});
}

RunLog run_single(const TabularMDP& mdp, const ExperimentConfig& cfg, const std::string& algorithm,
                  std::uint64_t seed, std::span<const EpisodeObserver> observers) {
  AgentOptions options;
  options.algorithm = algorithm_from_string(algorithm);
  options.delta = cfg.delta;
  options.known_rewards = cfg.known_rewards;
  options.plan_every = cfg.plan_every;
  Rng rng = run_rng(cfg.master_seed, algorithm, seed);
  RunLog log = run_agent(mdp, cfg.num_episodes, options, rng, observers);
  log.meta.seed = seed;
  return log;
}

RunSummary summarize_run(const RunLog& log, std::span<const double> epsilon_grid,
                         std::uint64_t return_window) {
  RunSummary s;
  s.algorithm = log.meta.algorithm;
  s.seed = log.meta.seed;
  s.T = log.size();
  s.regret = regret(log, s.T);
  const auto grid = epsilon_grid.empty() ? default_epsilon_grid(log.meta.horizon)
                                         : std::vector<double>(epsilon_grid.begin(), epsilon_grid.end());
  s.mistake_curve = mistake_counts(log, grid, s.T);
  if (log.meta.algorithm != to_string(Algorithm::Random))
    s.optimism_violations = optimism_violations(log, log.meta.rho_star, 1e-9);
  const std::uint64_t window = std::min<std::uint64_t>(return_window, s.T);
  double acc = 0.0;
  for (std::uint64_t k = s.T - window; k < s.T; ++k) acc += log.records[k].policy_return;
  s.final_window_mean_return = window == 0 ? 0.0 : acc / static_cast<double>(window);
  return s;
}

unsigned effective_workers(const ExperimentConfig& cfg) {
  unsigned workers = cfg.workers;
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    unsigned parsed = 0;
    const auto* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, parsed);
    if (ec != std::errc{} || ptr != end)
      throw std::invalid_argument(std::string(kWorkersEnv) + " must be a nonnegative integer");
    workers = parsed;
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return workers;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string episodes_csv(std::span<const RunLog> logs, std::uint64_t log_every,
                         std::uint64_t return_window) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& log : logs) {
    double cum = 0.0, window_sum = 0.0;
    const std::uint64_t T = log.size();
    for (std::uint64_t i = 0; i < T; ++i) {
      const auto& rec = log.records[i];
      cum += rec.delta_k;
      window_sum += rec.policy_return;
      if (i >= return_window) window_sum -= log.records[i - return_window].policy_return;
      if (rec.k % log_every != 0 && rec.k != T) continue;
      const auto width = std::min<std::uint64_t>(i + 1, return_window);
      out += log.meta.algorithm;
      out += ',';
      out += std::to_string(log.meta.seed);
      out += ',';
      out += std::to_string(rec.k);
      out += ',';
      out += format_double(rec.delta_k);
      out += ',';
      out += format_double(cum);
      out += ',';
      out += format_double(rec.optimistic_value);
      out += ',';
      out += format_double(window_sum / static_cast<double>(width));
      out += '\n';
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto started = std::chrono::system_clock::now();
  const TabularMDP mdp = load_mdp(cfg);
  validate(mdp);

  struct Task {
    std::string algorithm;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& a : cfg.algorithms)
    for (auto s : cfg.seeds) tasks.push_back({a, s});
  std::sort(tasks.begin(), tasks.end(), [](const Task& x, const Task& y) {
    return std::tie(x.algorithm, x.seed) < std::tie(y.algorithm, y.seed);
  });

  std::vector<RunLog> logs(tasks.size());
  std::vector<double> wall_seconds(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        logs[i] = run_single(mdp, cfg, tasks[i].algorithm, tasks[i].seed);
        wall_seconds[i] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(effective_workers(cfg), tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentReport report;
  report.rho_star = logs.front().meta.rho_star;
  report.output_dir = cfg.output_dir;
  json summaries = json::array();
  for (const auto& log : logs) {
    report.summaries.push_back(summarize_run(log, cfg.epsilon_grid, cfg.return_window));
    summaries.push_back(summary_json(report.summaries.back()));
  }

  fs::create_directories(report.output_dir);
  write_file(report.output_dir / "episodes.csv",
             episodes_csv(logs, cfg.log_every, cfg.return_window));
  write_file(report.output_dir / "summary.json", summaries.dump(2) + "\n");
  write_file(report.output_dir / "mdp.json", to_json(mdp) + "\n");

  json meta;
  meta["rng"] = std::string(kRngIdentifier);
  meta["mdp_digest"] = hex64(mdp_digest(mdp));
  meta["rho_star"] = report.rho_star;
  meta["config"] = json::parse(serialize_config(cfg));
  meta["plan_every"] = cfg.plan_every;
  meta["replans_every_episode"] = cfg.plan_every == 1;
  meta["known_rewards"] = cfg.known_rewards;
  meta["workers"] = workers;
  meta["started_at"] = utc_timestamp(started);
  meta["finished_at"] = utc_timestamp(std::chrono::system_clock::now());
  json runs = json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i)
    runs.push_back({{"algorithm", tasks[i].algorithm},
                    {"seed", tasks[i].seed},
                    {"stream_key", {cfg.master_seed, hex64(fnv1a64(tasks[i].algorithm)), tasks[i].seed}},
                    {"wall_seconds", wall_seconds[i]}});
  meta["runs"] = std::move(runs);
  write_file(report.output_dir / "metadata.json", meta.dump(2) + "\n");

  report.logs = std::move(logs);
  return report;
}

std::string summarize_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "summary.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  json table = json::array();
  for (const auto& f : files) {
    json runs = json::parse(read_file(f));
    for (auto& run : runs) {
      run["source"] = fs::relative(f.parent_path(), dir).generic_string();
      table.push_back(std::move(run));
    }
  }
  return table.dump(2);
}

}  // namespace upac
