#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chameleon/game.hpp"
#include "chameleon/strategies.hpp"

namespace chameleon {

/// Strategy identifier plus free-form parameters.
/// Non-chameleon ids: zero_kl, full_reveal, interpolated (eps, vote_rule), amb.
/// Chameleon ids: mixture, amb_best_response.
struct StrategySpec {
  std::string id;
  nlohmann::json params = nlohmann::json::object();
};

struct SimulationSpec {
  GameConfig config;
  StrategySpec non_strategy;
  StrategySpec ch_strategy;
  long trials = 0;
  std::uint64_t base_seed = 0;

  void validate() const;
};

SimulationSpec simulation_spec_from_json(const nlohmann::json& j);
nlohmann::json simulation_spec_to_json(const SimulationSpec& spec);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% (z = 1.96) Wilson score interval by default.
Interval wilson_ci(long successes, long trials, double z = 1.96);

struct RatioStat {
  long successes = 0;
  long trials = 0;
  double ratio = 0.0;
  Interval ci;
};

/// Instantiated strategies for a spec. `stationary` is set when the
/// non-chameleon side is a stationary strategy.
struct StrategyPair {
  std::shared_ptr<const NonChameleonStrategy> non;
  std::shared_ptr<const ChameleonStrategy> ch;
  std::shared_ptr<const StationaryStrategy> stationary;
};

StrategyPair make_strategies(const SimulationSpec& spec);

/// Builds a stationary strategy from its id and parameters (zero_kl,
/// full_reveal, interpolated); honors a vote_rule override.
std::shared_ptr<const StationaryStrategy> make_stationary_strategy(const StrategySpec& spec,
                                                                   int k);

struct BoundAttachment {
  std::string name;
  double value = 0.0;  // clamped to [0, 1]
  double raw = 0.0;    // pre-clamp
};

struct SimulationReport {
  SimulationSpec spec;
  long trials = 0;
  long non_wins = 0;
  long identified = 0;
  long second_chance_wins = 0;
  RatioStat non_win;
  RatioStat identification;
  std::optional<RatioStat> second_chance;  // absent when no game identified
  std::string vote_rule;                   // tag; empty for word-subset games
  std::optional<double> alpha_kl;
  std::optional<double> alpha_l1;
  std::optional<double> phi;
  std::vector<BoundAttachment> bounds;
  double wall_seconds = 0.0;
};

/// Runs spec.trials independent games. Trial t draws its random stream from
/// derive_stream_seed(base_seed, t), so the aggregate counts are identical
/// for any worker count.
SimulationReport simulate(const SimulationSpec& spec, int workers = 1);

/// Cartesian sweep. JSON shape:
///   {"base": <simulation spec>,
///    "axes": [{"pointer": "/config/n_players", "values": [3, 4]},
///             {"patches": [{"/config/amb_block": 4, "/config/k": 16}, ...]}]}
/// Every axis combination is applied to the base spec; one report per cell.
std::vector<SimulationReport> sweep(const nlohmann::json& sweep_spec, int workers = 1);

nlohmann::json report_to_json(const SimulationReport& report);

/// CSV with a fixed, documented column set; excludes timing so that a fixed
/// seed reproduces byte-identical bodies.
std::string reports_to_csv(const std::vector<SimulationReport>& reports);

}  // namespace chameleon
