#include "chameleon/simulate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "chameleon/bounds.hpp"

namespace chameleon {

void SimulationSpec::validate() const {
  config.validate();
  if (trials < 1) throw std::invalid_argument("SimulationSpec: trials must be at least 1");
  if (non_strategy.id.empty() || ch_strategy.id.empty())
    throw std::invalid_argument("SimulationSpec: missing strategy id");
}

namespace {

GameConfig config_from_spec_json(const nlohmann::json& j) {
  if (j.contains("k") && !j.contains("words")) {
    std::optional<int> amb;
    if (j.contains("amb_block") && !j.at("amb_block").is_null()) amb = j.at("amb_block").get<int>();
    GameConfig config = GameConfig::generic(j.at("n_players").get<int>(), j.at("k").get<int>(), amb,
                                            j.value("seed", std::uint64_t{0}));
    if (j.contains("category")) config.category = j.at("category").get<std::string>();
    return config;
  }
  return config_from_json(j);
}

StrategySpec strategy_spec_from_json(const nlohmann::json& j) {
  StrategySpec spec;
  spec.id = j.at("id").get<std::string>();
  spec.params = j;
  spec.params.erase("id");
  return spec;
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

SimulationSpec simulation_spec_from_json(const nlohmann::json& j) {
  SimulationSpec spec;
  spec.config = config_from_spec_json(j.at("config"));
  spec.non_strategy = strategy_spec_from_json(j.at("non_strategy"));
  spec.ch_strategy = strategy_spec_from_json(j.at("ch_strategy"));
  spec.trials = j.at("trials").get<long>();
  spec.base_seed = j.value("base_seed", std::uint64_t{0});
  spec.validate();
  return spec;
}

nlohmann::json simulation_spec_to_json(const SimulationSpec& spec) {
  nlohmann::json config{{"n_players", spec.config.n_players},
                        {"words", spec.config.words},
                        {"category", spec.config.category},
                        {"amb_block", spec.config.amb_block ? nlohmann::json(*spec.config.amb_block)
                                                            : nlohmann::json(nullptr)},
                        {"seed", spec.config.seed}};
  nlohmann::json non = spec.non_strategy.params;
  non["id"] = spec.non_strategy.id;
  nlohmann::json ch = spec.ch_strategy.params;
  ch["id"] = spec.ch_strategy.id;
  return nlohmann::json{{"config", config},
                        {"non_strategy", non},
                        {"ch_strategy", ch},
                        {"trials", spec.trials},
                        {"base_seed", spec.base_seed}};
}

Interval wilson_ci(long successes, long trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson_ci: trials must be at least 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_ci: successes out of range");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The interval endpoints are exact at the degenerate counts.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

std::shared_ptr<const StationaryStrategy> make_stationary_strategy(const StrategySpec& spec,
                                                                   int k) {
  std::shared_ptr<const StationaryStrategy> strategy;
  if (spec.id == "zero_kl") {
    strategy = std::make_shared<StationaryStrategy>(zero_kl_strategy(k));
  } else if (spec.id == "full_reveal") {
    strategy = std::make_shared<StationaryStrategy>(full_reveal_strategy(k));
  } else if (spec.id == "interpolated") {
    strategy = std::make_shared<StationaryStrategy>(
        interpolated_strategy(k, spec.params.at("eps").get<double>()));
  } else {
    throw std::invalid_argument("unknown stationary strategy: " + spec.id);
  }
  if (spec.params.contains("vote_rule"))
    strategy = std::make_shared<StationaryStrategy>(strategy->with_vote_rule(
        vote_rule_from_string(spec.params.at("vote_rule").get<std::string>())));
  return strategy;
}

StrategyPair make_strategies(const SimulationSpec& spec) {
  spec.validate();
  const int k = spec.config.k();
  StrategyPair pair;

  const std::string& non_id = spec.non_strategy.id;
  if (non_id == "amb") {
    if (!spec.config.amb_block)
      throw std::invalid_argument("strategy 'amb' requires config.amb_block");
    pair.non = std::make_shared<AmbStrategy>(*spec.config.amb_block);
  } else {
    pair.stationary = make_stationary_strategy(spec.non_strategy, k);
    pair.non = pair.stationary;
  }

  const std::string& ch_id = spec.ch_strategy.id;
  if (ch_id == "mixture") {
    if (!pair.stationary)
      throw std::invalid_argument("chameleon 'mixture' requires a stationary non-strategy");
    pair.ch = std::make_shared<MixtureChameleonStrategy>(pair.stationary);
  } else if (ch_id == "amb_best_response") {
    if (non_id != "amb")
      throw std::invalid_argument("chameleon 'amb_best_response' requires the 'amb' strategy");
    pair.ch = std::make_shared<AmbChameleonStrategy>(*spec.config.amb_block);
  } else {
    throw std::invalid_argument("unknown chameleon strategy: " + ch_id);
  }
  return pair;
}

namespace {

struct Tally {
  long non_wins = 0;
  long identified = 0;
  long second_chance_wins = 0;

  void add(const GameTranscript& t) {
    if (t.identified == t.roles.chameleon) ++identified;
    switch (t.outcome) {
      case Outcome::NonChameleonsWin: ++non_wins; break;
      case Outcome::ChameleonWinsSecondChance: ++second_chance_wins; break;
      case Outcome::ChameleonWinsMisidentified: break;
    }
  }

  void merge(const Tally& other) {
    non_wins += other.non_wins;
    identified += other.identified;
    second_chance_wins += other.second_chance_wins;
  }
};

void attach_bounds(SimulationReport& report, const StrategyPair& pair) {
  const SimulationSpec& spec = report.spec;
  const int n = spec.config.n_players;
  const int k = spec.config.k();
  const double trivial = trivial_win_rate(n, k);
  report.bounds.push_back({"trivial", trivial, trivial});

  if (pair.stationary) {
    report.vote_rule = to_string(pair.stationary->vote_rule());
    const double alpha_kl = pair.stationary->kl_pairwise_max();
    const double alpha_l1 = pair.stationary->l1_pairwise_min();
    double phi = std::numeric_limits<double>::infinity();
    for (int wi = 0; wi < k; ++wi)
      for (int wj = 0; wj < k; ++wj)
        if (wi != wj) phi = std::min(phi, varphi(theta(pair.stationary->pair_bins(wi, wj))));
    report.alpha_kl = alpha_kl;
    report.alpha_l1 = alpha_l1;
    report.phi = phi;
    report.bounds.push_back(
        {"prop1", prop1_bound(n, k, alpha_kl), prop1_bound_raw(n, k, alpha_kl)});
    report.bounds.push_back(
        {"prop2", prop2_bound(n, k, alpha_kl), prop2_bound_raw(n, k, alpha_kl)});
    report.bounds.push_back({"prop3", prop3_bound(n, k, alpha_l1, phi),
                             prop3_bound_raw(n, k, alpha_l1, phi)});
  }
  if (spec.config.amb_block) {
    const int l = *spec.config.amb_block;
    report.bounds.push_back({"prop4", prop4_bound(n, l), prop4_bound(n, l)});
    report.bounds.push_back({"amb_exact", amb_exact_win(n, l), amb_exact_win(n, l)});
  }
}

}  // namespace

SimulationReport simulate(const SimulationSpec& spec, int workers) {
  spec.validate();
  if (workers < 1) throw std::invalid_argument("simulate: workers must be at least 1");
  const StrategyPair pair = make_strategies(spec);

  const auto start = std::chrono::steady_clock::now();
  Tally total;
  if (workers == 1) {
    for (long t = 0; t < spec.trials; ++t) {
      Rng rng(derive_stream_seed(spec.base_seed, static_cast<std::uint64_t>(t)));
      total.add(run_game(spec.config, *pair.non, *pair.ch, rng));
    }
  } else {
    std::vector<Tally> tallies(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (long t = w; t < spec.trials; t += workers) {
          Rng rng(derive_stream_seed(spec.base_seed, static_cast<std::uint64_t>(t)));
          tallies[w].add(run_game(spec.config, *pair.non, *pair.ch, rng));
        }
      });
    }
    for (std::thread& th : threads) th.join();
    for (const Tally& t : tallies) total.merge(t);
  }
  const auto stop = std::chrono::steady_clock::now();

  SimulationReport report;
  report.spec = spec;
  report.trials = spec.trials;
  report.non_wins = total.non_wins;
  report.identified = total.identified;
  report.second_chance_wins = total.second_chance_wins;
  report.non_win = {total.non_wins, spec.trials,
                    static_cast<double>(total.non_wins) / spec.trials,
                    wilson_ci(total.non_wins, spec.trials)};
  report.identification = {total.identified, spec.trials,
                           static_cast<double>(total.identified) / spec.trials,
                           wilson_ci(total.identified, spec.trials)};
  if (total.identified > 0) {
    report.second_chance = {total.second_chance_wins, total.identified,
                            static_cast<double>(total.second_chance_wins) / total.identified,
                            wilson_ci(total.second_chance_wins, total.identified)};
  }
  attach_bounds(report, pair);
  report.wall_seconds = std::chrono::duration<double>(stop - start).count();
  return report;
}

std::vector<SimulationReport> sweep(const nlohmann::json& sweep_spec, int workers) {
  if (!sweep_spec.contains("base")) throw std::invalid_argument("sweep: missing base spec");
  const nlohmann::json base = sweep_spec.at("base");

  // Expand every axis into a list of patches (pointer -> value maps).
  std::vector<std::vector<nlohmann::json>> axis_patches;
  if (sweep_spec.contains("axes")) {
    for (const auto& axis : sweep_spec.at("axes")) {
      std::vector<nlohmann::json> patches;
      if (axis.contains("pointer")) {
        for (const auto& value : axis.at("values"))
          patches.push_back(nlohmann::json{{axis.at("pointer").get<std::string>(), value}});
      } else if (axis.contains("patches")) {
        for (const auto& patch : axis.at("patches")) patches.push_back(patch);
      } else {
        throw std::invalid_argument("sweep: axis needs 'pointer'+'values' or 'patches'");
      }
      if (patches.empty()) throw std::invalid_argument("sweep: empty grid axis");
      axis_patches.push_back(std::move(patches));
    }
  }

  std::vector<SimulationReport> reports;
  std::vector<std::size_t> index(axis_patches.size(), 0);
  while (true) {
    nlohmann::json combined = base;
    for (std::size_t a = 0; a < axis_patches.size(); ++a)
      for (const auto& [pointer, value] : axis_patches[a][index[a]].items())
        combined[nlohmann::json::json_pointer(pointer)] = value;
    reports.push_back(simulate(simulation_spec_from_json(combined), workers));

    std::size_t a = 0;
    for (; a < index.size(); ++a) {
      if (++index[a] < axis_patches[a].size()) break;
      index[a] = 0;
    }
    if (a == index.size()) break;
  }
  return reports;
}

namespace {

nlohmann::json ratio_to_json(const RatioStat& r) {
  return nlohmann::json{{"successes", r.successes},
                        {"trials", r.trials},
                        {"ratio", r.ratio},
                        {"ci95", {r.ci.lo, r.ci.hi}}};
}

}  // namespace

nlohmann::json report_to_json(const SimulationReport& report) {
  nlohmann::json bounds = nlohmann::json::object();
  for (const BoundAttachment& b : report.bounds)
    bounds[b.name] = nlohmann::json{{"value", json_number(b.value)}, {"raw", json_number(b.raw)}};
  nlohmann::json j{{"spec", simulation_spec_to_json(report.spec)},
                   {"trials", report.trials},
                   {"counts",
                    {{"non_wins", report.non_wins},
                     {"identified", report.identified},
                     {"second_chance_wins", report.second_chance_wins}}},
                   {"non_win", ratio_to_json(report.non_win)},
                   {"identification", ratio_to_json(report.identification)},
                   {"second_chance", report.second_chance ? ratio_to_json(*report.second_chance)
                                                          : nlohmann::json(nullptr)},
                   {"bounds", bounds},
                   {"wall_seconds", report.wall_seconds}};
  if (!report.vote_rule.empty()) j["vote_rule"] = report.vote_rule;
  if (report.alpha_kl) j["alpha_kl"] = json_number(*report.alpha_kl);
  if (report.alpha_l1) j["alpha_l1"] = json_number(*report.alpha_l1);
  if (report.phi) j["phi"] = json_number(*report.phi);
  return j;
}

namespace {

std::string csv_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

std::string find_bound(const SimulationReport& r, const std::string& name) {
  for (const BoundAttachment& b : r.bounds)
    if (b.name == name) return csv_number(b.value);
  return "";
}

}  // namespace

std::string reports_to_csv(const std::vector<SimulationReport>& reports) {
  std::ostringstream out;
  out << "non_id,non_params,ch_id,n_players,k,l,trials,vote_rule,"
         "non_wins,non_win_ratio,non_win_lo,non_win_hi,"
         "identified,identification_ratio,identification_lo,identification_hi,"
         "second_chance_wins,second_chance_ratio,second_chance_lo,second_chance_hi,"
         "alpha_kl,alpha_l1,phi,trivial,prop1,prop2,prop3,prop4,amb_exact\n";
  for (const SimulationReport& r : reports) {
    std::string params = r.spec.non_strategy.params.empty()
                             ? ""
                             : r.spec.non_strategy.params.dump();
    // JSON parameter blobs are quoted; embedded quotes are doubled per CSV rules.
    std::string quoted;
    for (char c : params) {
      if (c == '"') quoted += "\"\"";
      else quoted += c;
    }
    out << r.spec.non_strategy.id << ",\"" << quoted << "\"," << r.spec.ch_strategy.id << ','
        << r.spec.config.n_players << ',' << r.spec.config.k() << ','
        << (r.spec.config.amb_block ? std::to_string(*r.spec.config.amb_block) : "") << ','
        << r.trials << ',' << r.vote_rule << ',' << r.non_wins << ','
        << csv_number(r.non_win.ratio) << ',' << csv_number(r.non_win.ci.lo) << ','
        << csv_number(r.non_win.ci.hi) << ',' << r.identified << ','
        << csv_number(r.identification.ratio) << ',' << csv_number(r.identification.ci.lo) << ','
        << csv_number(r.identification.ci.hi) << ',' << r.second_chance_wins << ','
        << (r.second_chance ? csv_number(r.second_chance->ratio) : "") << ','
        << (r.second_chance ? csv_number(r.second_chance->ci.lo) : "") << ','
        << (r.second_chance ? csv_number(r.second_chance->ci.hi) : "") << ','
        << (r.alpha_kl ? csv_number(*r.alpha_kl) : "") << ','
        << (r.alpha_l1 ? csv_number(*r.alpha_l1) : "") << ','
        << (r.phi ? csv_number(*r.phi) : "") << ',' << find_bound(r, "trivial") << ','
        << find_bound(r, "prop1") << ',' << find_bound(r, "prop2") << ',' << find_bound(r, "prop3")
        << ',' << find_bound(r, "prop4") << ',' << find_bound(r, "amb_exact") << '\n';
  }
  return out.str();
}

}  // namespace chameleon
