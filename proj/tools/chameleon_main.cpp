// Command-line entry point: simulate, sweep, bounds, analyze, play-llm,
// replay. JSON specs in, CSV/JSON out; every output directory carries a run
// manifest and files are written atomically.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chameleon/bounds.hpp"
#include "chameleon/inference.hpp"
#include "chameleon/llm.hpp"
#include "chameleon/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

/// Thrown for configuration mistakes (exit code 1); anything else that
/// escapes a subcommand is a runtime error (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

/// Collects outputs and writes the manifest last, so a complete manifest
/// marks a complete run.
class OutputDir {
 public:
  OutputDir(std::optional<std::string> dir, std::string subcommand, std::string config_path,
            std::uint64_t seed)
      : dir_(std::move(dir)), subcommand_(std::move(subcommand)),
        config_path_(std::move(config_path)), seed_(seed), started_(now_iso8601()) {
    if (dir_) fs::create_directories(*dir_);
  }

  void write(const std::string& name, const std::string& content) const {
    if (!dir_) return;
    atomic_write(fs::path(*dir_) / name, content);
  }

  void finish() const {
    if (!dir_) return;
    const json manifest{{"subcommand", subcommand_}, {"config_path", config_path_},
                        {"output_dir", *dir_},      {"seed", seed_},
                        {"tool_version", kToolVersion}, {"started_at", started_},
                        {"finished_at", now_iso8601()}};
    atomic_write(fs::path(*dir_) / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::optional<std::string> dir_;
  std::string subcommand_;
  std::string config_path_;
  std::uint64_t seed_;
  std::string started_;
};

std::string csv_cell(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

// ---------------------------------------------------------------------------
// simulate / sweep

int run_simulate(const std::string& spec_path, std::optional<std::string> out_dir, int workers,
                 std::optional<long> trials_override) {
  json spec_json = load_json_file(spec_path);
  if (trials_override) spec_json["trials"] = *trials_override;
  chameleon::SimulationSpec spec;
  try {
    spec = chameleon::simulation_spec_from_json(spec_json);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad simulation spec: ") + e.what());
  }
  OutputDir out(out_dir, "simulate", spec_path, spec.base_seed);

  const chameleon::SimulationReport report = chameleon::simulate(spec, workers);
  const std::string csv = chameleon::reports_to_csv({report});
  std::cout << csv;
  out.write("report.json", chameleon::report_to_json(report).dump(2) + "\n");
  out.write("report.csv", csv);
  out.finish();
  return 0;
}

int run_sweep(const std::string& spec_path, std::optional<std::string> out_dir, int workers) {
  const json sweep_json = load_json_file(spec_path);
  std::uint64_t seed = 0;
  if (sweep_json.contains("base")) seed = sweep_json["base"].value("base_seed", std::uint64_t{0});
  OutputDir out(out_dir, "sweep", spec_path, seed);

  std::vector<chameleon::SimulationReport> reports;
  try {
    reports = chameleon::sweep(sweep_json, workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad sweep spec: ") + e.what());
  }
  const std::string csv = chameleon::reports_to_csv(reports);
  std::cout << csv;
  json all = json::array();
  for (const auto& report : reports) all.push_back(chameleon::report_to_json(report));
  out.write("reports.json", all.dump(2) + "\n");
  out.write("reports.csv", csv);
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int run_bounds(int n, int k, std::vector<double> alphas, const std::string& alpha_range,
               std::optional<int> l, std::optional<double> phi,
               std::optional<std::string> out_dir) {
  if (!alpha_range.empty()) {
    double start = 0, stop = 0, step = 0;
    if (std::sscanf(alpha_range.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0)
      throw ConfigError("--alpha-range expects start:stop:step with step > 0");
    for (double a = start; a <= stop + 1e-12; a += step) alphas.push_back(a);
  }
  if (alphas.empty()) alphas.push_back(0.0);

  std::ostringstream csv;
  csv << "N,K,alpha,l,trivial,prop1,prop2,prop3,prop4,amb_exact\n";
  for (double alpha : alphas) {
    // Without a strategy-specific phi the revealing bound uses the universal
    // worst case: bins can be no flatter than theta = min(1/2, 1 - alpha/2).
    const double effective_phi =
        phi ? *phi : chameleon::varphi(std::min(0.5, 1.0 - alpha / 2.0));
    csv << n << ',' << k << ',' << csv_cell(alpha) << ',' << (l ? std::to_string(*l) : "") << ','
        << csv_cell(chameleon::trivial_win_rate(n, k)) << ','
        << csv_cell(chameleon::prop1_bound(n, k, alpha)) << ','
        << csv_cell(chameleon::prop2_bound(n, k, alpha)) << ','
        << csv_cell(chameleon::prop3_bound(n, k, alpha, effective_phi)) << ','
        << (l ? csv_cell(chameleon::prop4_bound(n, *l)) : "") << ','
        << (l ? csv_cell(chameleon::amb_exact_win(n, *l)) : "") << '\n';
  }
  std::cout << csv.str();
  OutputDir out(out_dir, "bounds", "", 0);
  out.write("bounds.csv", csv.str());
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

int run_analyze(const std::string& spec_path, std::optional<std::string> out_dir) {
  const json spec = load_json_file(spec_path);
  chameleon::GameConfig config;
  std::shared_ptr<const chameleon::StationaryStrategy> strategy;
  long trials = 0;
  std::uint64_t base_seed = 0;
  try {
    json wrapped{{"config", spec.at("config")},
                 {"non_strategy", spec.at("strategy")},
                 {"ch_strategy", {{"id", "mixture"}}},
                 {"trials", spec.at("trials")},
                 {"base_seed", spec.value("base_seed", std::uint64_t{0})}};
    const chameleon::SimulationSpec sim = chameleon::simulation_spec_from_json(wrapped);
    config = sim.config;
    trials = sim.trials;
    base_seed = sim.base_seed;
    strategy = chameleon::make_stationary_strategy(sim.non_strategy, config.k());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad analyze spec: ") + e.what());
  }

  chameleon::LikelihoodTable table = chameleon::LikelihoodTable::from_strategy(*strategy);
  if (spec.contains("table_csv")) {
    std::ifstream in(spec.at("table_csv").get<std::string>());
    if (!in.good()) throw ConfigError("cannot open table_csv");
    table = chameleon::LikelihoodTable::from_counts_csv(in);
  }

  OutputDir out(out_dir, "analyze", spec_path, base_seed);
  const auto rows =
      chameleon::analyze_curves(*strategy, table, config.n_players - 1, trials, base_seed);
  const std::string csv = chameleon::analyze_rows_to_csv(rows);
  std::cout << csv;
  out.write("curves.csv", csv);
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// play-llm / replay

/// Deals the scripted replies of an offline run; the file maps per-player
/// lists of texts, reused for every game.
class FileScriptedBackend : public chameleon::ChatBackend {
 public:
  explicit FileScriptedBackend(const json& script) {
    for (const auto& player_replies : script.at("players"))
      replies_.push_back(player_replies.get<std::vector<std::string>>());
    reset();
  }

  void reset() { cursors_.assign(replies_.size(), 0); }

  Reply complete(int player, const chameleon::AgentEndpoint&,
                 const std::vector<chameleon::ChatMessage>&) override {
    if (player >= static_cast<int>(replies_.size()) ||
        cursors_[player] >= replies_[player].size())
      throw std::runtime_error("scripted replies exhausted for player " +
                               std::to_string(player + 1));
    return {replies_[player][cursors_[player]++], 0};
  }

 private:
  std::vector<std::vector<std::string>> replies_;
  std::vector<std::size_t> cursors_;
};

int run_play_llm(const std::string& spec_path, std::optional<std::string> out_dir,
                 std::optional<int> games_override) {
  const json spec = load_json_file(spec_path);
  chameleon::GameConfig base_config;
  std::vector<chameleon::AgentEndpoint> endpoints;
  try {
    json wrapped{{"config", spec.at("config")},
                 {"non_strategy", {{"id", "zero_kl"}}},
                 {"ch_strategy", {{"id", "mixture"}}},
                 {"trials", 1}};
    base_config = chameleon::simulation_spec_from_json(wrapped).config;
    for (const auto& ej : spec.at("endpoints"))
      endpoints.push_back(chameleon::endpoint_from_json(ej));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad game spec: ") + e.what());
  }
  const int games = games_override.value_or(spec.value("games", 1));
  if (games < 1) throw ConfigError("games must be at least 1");

  std::optional<chameleon::RoleAssignment> forced;
  if (spec.contains("forced_roles")) {
    forced = chameleon::RoleAssignment{spec.at("forced_roles").at("chameleon").get<int>() - 1,
                                       spec.at("forced_roles").at("secret").get<int>() - 1};
  }

  chameleon::HttpBackend http;
  std::unique_ptr<FileScriptedBackend> scripted;
  if (spec.contains("scripted_replies"))
    scripted = std::make_unique<FileScriptedBackend>(
        load_json_file(spec.at("scripted_replies").get<std::string>()));

  OutputDir out(out_dir, "play-llm", spec_path, base_config.seed);
  std::vector<chameleon::LlmGameResult> results;
  for (int g = 0; g < games; ++g) {
    chameleon::GameConfig config = base_config;
    config.seed = chameleon::derive_stream_seed(base_config.seed, static_cast<std::uint64_t>(g));
    chameleon::ChatBackend* backend = &http;
    if (scripted) {
      scripted->reset();
      backend = scripted.get();
    }
    results.push_back(chameleon::play_llm_game(config, endpoints, *backend, forced));
    char name[32];
    std::snprintf(name, sizeof name, "game_%04d.json", g + 1);
    out.write(name, results.back().log.dump(2) + "\n");
  }

  const chameleon::LlmBatchSummary summary = chameleon::summarize_llm_games(results);
  std::ostringstream csv;
  csv << "games,valid_games,valid_ratio,non_win_ratio,identification_ratio,"
         "second_chance_win_ratio\n"
      << summary.games << ',' << summary.valid_games << ',' << csv_cell(summary.valid_ratio) << ','
      << csv_cell(summary.non_win_ratio) << ',' << csv_cell(summary.identification_ratio) << ','
      << csv_cell(summary.second_chance_win_ratio) << '\n';
  std::cout << csv.str();
  out.write("summary.csv", csv.str());
  out.finish();
  return 0;
}

int run_replay(const std::string& log_path, std::optional<std::string> out_dir) {
  const json log = load_json_file(log_path);
  chameleon::LlmGameResult result;
  try {
    result = chameleon::replay_llm_game(log);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad log: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad log: ") + e.what());
  }
  OutputDir out(out_dir, "replay", log_path,
                log.contains("config") ? log["config"].value("seed", std::uint64_t{0}) : 0);
  json output;
  if (result.valid()) {
    output = chameleon::transcript_to_json(*result.transcript);
  } else {
    output = json{{"invalid_reason", result.invalid_reason}};
  }
  std::cout << output.dump(2) << '\n';
  out.write("transcript.json", output.dump(2) + "\n");
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation laboratory for the hidden-identity game The Chameleon"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  auto* simulate_cmd = app.add_subcommand("simulate", "Run one Monte Carlo experiment");
  std::string sim_spec;
  std::optional<std::string> sim_out;
  std::optional<long> sim_trials;
  simulate_cmd->add_option("spec", sim_spec, "simulation spec JSON")->required();
  simulate_cmd->add_option("--out", sim_out, "output directory");
  simulate_cmd->add_option("--workers", workers, "worker threads");
  simulate_cmd->add_option("--trials", sim_trials, "override the spec's trial count");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of experiments");
  std::string sweep_spec;
  std::optional<std::string> sweep_out;
  sweep_cmd->add_option("spec", sweep_spec, "sweep spec JSON")->required();
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_option("--workers", workers, "worker threads");

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the closed-form bounds as CSV");
  int bn = 4, bk = 16;
  std::vector<double> alphas;
  std::string alpha_range;
  std::optional<int> bl;
  std::optional<double> bphi;
  std::optional<std::string> bounds_out;
  bounds_cmd->add_option("--n", bn, "number of players")->required();
  bounds_cmd->add_option("--k", bk, "number of words")->required();
  bounds_cmd->add_option("--alpha", alphas, "alpha value (repeatable)");
  bounds_cmd->add_option("--alpha-range", alpha_range, "start:stop:step sweep");
  bounds_cmd->add_option("--l", bl, "ambiguity block size");
  bounds_cmd->add_option("--phi", bphi, "strategy-specific phi for the revealing bound");
  bounds_cmd->add_option("--out", bounds_out, "output directory");

  auto* analyze_cmd = app.add_subcommand("analyze", "Posterior entropy and top-k curves");
  std::string analyze_spec;
  std::optional<std::string> analyze_out;
  analyze_cmd->add_option("spec", analyze_spec, "analyze spec JSON")->required();
  analyze_cmd->add_option("--out", analyze_out, "output directory");

  auto* play_cmd = app.add_subcommand("play-llm", "Play games against chat endpoints");
  std::string play_spec;
  std::optional<std::string> play_out;
  std::optional<int> play_games;
  play_cmd->add_option("spec", play_spec, "game spec JSON")->required();
  play_cmd->add_option("--out", play_out, "output directory");
  play_cmd->add_option("--games", play_games, "number of games");

  auto* replay_cmd = app.add_subcommand("replay", "Re-derive a transcript from a stored log");
  std::string replay_log;
  std::optional<std::string> replay_out;
  replay_cmd->add_option("log", replay_log, "conversation log JSON")->required();
  replay_cmd->add_option("--out", replay_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (simulate_cmd->parsed()) return run_simulate(sim_spec, sim_out, workers, sim_trials);
    if (sweep_cmd->parsed()) return run_sweep(sweep_spec, sweep_out, workers);
    if (bounds_cmd->parsed())
      return run_bounds(bn, bk, alphas, alpha_range, bl, bphi, bounds_out);
    if (analyze_cmd->parsed()) return run_analyze(analyze_spec, analyze_out);
    if (play_cmd->parsed()) return run_play_llm(play_spec, play_out, play_games);
    if (replay_cmd->parsed()) return run_replay(replay_log, replay_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
