#include "chameleon/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chameleon {

std::string to_string(VoteRule rule) {
  switch (rule) {
    case VoteRule::VotePlayerOne: return "vote_player_one";
    case VoteRule::MinLikelihoodSuspect: return "min_likelihood_suspect";
  }
  throw std::logic_error("unknown vote rule");
}

VoteRule vote_rule_from_string(const std::string& name) {
  if (name == "vote_player_one") return VoteRule::VotePlayerOne;
  if (name == "min_likelihood_suspect") return VoteRule::MinLikelihoodSuspect;
  throw std::invalid_argument("unknown vote rule: " + name);
}

// ---------------------------------------------------------------------------
// StationaryStrategy

StationaryStrategy::StationaryStrategy(std::vector<ProbVector> response_dists, VoteRule vote_rule,
                                       std::vector<std::string> alphabet_labels)
    : rows_(std::move(response_dists)), vote_rule_(vote_rule), labels_(std::move(alphabet_labels)) {
  if (rows_.empty()) throw std::invalid_argument("StationaryStrategy: no response rows");
  const std::size_t m = rows_.front().size();
  for (const ProbVector& row : rows_)
    if (row.size() != m)
      throw std::invalid_argument("StationaryStrategy: rows over mismatched alphabets");
  if (!labels_.empty() && labels_.size() != m)
    throw std::invalid_argument("StationaryStrategy: label count != alphabet size");

  const int k = n_words();
  pair_bins_.resize(static_cast<std::size_t>(k) * k);
  pair_symbols_.resize(static_cast<std::size_t>(k) * k);
  for (int wi = 0; wi < k; ++wi) {
    for (int wj = 0; wj < k; ++wj) {
      if (wi == wj) continue;
      const ResponsePartition part = partition_responses(rows_[wi], rows_[wj]);
      const std::size_t slot = pair_slot(wi, wj);
      pair_bins_[slot] = bin_probs(rows_[wi], part);
      std::vector<std::uint8_t>& bins = pair_symbols_[slot];
      bins.assign(m, 1);
      for (std::size_t r : part.gt) bins[r] = 0;
      for (std::size_t r : part.lt) bins[r] = 2;
    }
  }
}

std::size_t StationaryStrategy::pair_slot(int wi, int wj) const {
  return static_cast<std::size_t>(wi) * n_words() + wj;
}

StationaryStrategy StationaryStrategy::with_vote_rule(VoteRule rule) const {
  return StationaryStrategy(rows_, rule, labels_);
}

double StationaryStrategy::kl_pairwise_max() const {
  double worst = 0.0;
  for (int i = 0; i < n_words(); ++i)
    for (int j = 0; j < n_words(); ++j)
      if (i != j) worst = std::max(worst, kl_divergence(rows_[i], rows_[j]));
  return worst;
}

double StationaryStrategy::l1_pairwise_min() const {
  double best = 2.0;
  for (int i = 0; i < n_words(); ++i)
    for (int j = i + 1; j < n_words(); ++j) best = std::min(best, l1_distance(rows_[i], rows_[j]));
  return best;
}

ProbVector StationaryStrategy::mixture_row() const {
  std::vector<double> mix(alphabet_size(), 0.0);
  for (const ProbVector& row : rows_)
    for (std::size_t r = 0; r < mix.size(); ++r) mix[r] += row[r];
  for (double& v : mix) v /= n_words();
  return ProbVector::normalized(std::move(mix));
}

const BinTriple& StationaryStrategy::pair_bins(int wi, int wj) const {
  if (wi == wj) throw std::invalid_argument("pair_bins: identical words");
  return pair_bins_.at(pair_slot(wi, wj));
}

std::span<const std::uint8_t> StationaryStrategy::pair_symbol_bins(int wi, int wj) const {
  if (wi == wj) throw std::invalid_argument("pair_symbol_bins: identical words");
  return pair_symbols_.at(pair_slot(wi, wj));
}

ResponseSpace StationaryStrategy::response_space(const GameConfig& config) const {
  if (config.k() != n_words())
    throw std::invalid_argument("StationaryStrategy: config word count mismatch");
  return {ResponseSpace::Kind::SymbolAlphabet, alphabet_size()};
}

Response StationaryStrategy::respond(const NonChameleonView& view, Rng& rng) const {
  return Response::symbol(static_cast<int>(rng.categorical(row(view.secret).values())));
}

int StationaryStrategy::vote(const NonChameleonVoteView& view, Rng&) const {
  return stationary_vote(*this, view.responses, view.secret);
}

nlohmann::json StationaryStrategy::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const ProbVector& row : rows_) {
    rows.push_back(std::vector<double>(row.values().begin(), row.values().end()));
  }
  nlohmann::json j{{"rows", rows}, {"vote_rule", to_string(vote_rule_)}};
  if (!labels_.empty()) j["alphabet_labels"] = labels_;
  return j;
}

StationaryStrategy StationaryStrategy::from_json(const nlohmann::json& j) {
  std::vector<ProbVector> rows;
  for (const auto& row : j.at("rows")) rows.emplace_back(row.get<std::vector<double>>());
  std::vector<std::string> labels;
  if (j.contains("alphabet_labels")) labels = j.at("alphabet_labels").get<std::vector<std::string>>();
  return StationaryStrategy(std::move(rows), vote_rule_from_string(j.at("vote_rule").get<std::string>()),
                            std::move(labels));
}

StationaryStrategy zero_kl_strategy(int k) {
  if (k < 2) throw std::invalid_argument("zero_kl_strategy: requires K >= 2");
  std::vector<ProbVector> rows(k, ProbVector({1.0}));
  return StationaryStrategy(std::move(rows), VoteRule::VotePlayerOne);
}

StationaryStrategy full_reveal_strategy(int k) {
  if (k < 2) throw std::invalid_argument("full_reveal_strategy: requires K >= 2");
  std::vector<ProbVector> rows;
  rows.reserve(k);
  for (int w = 0; w < k; ++w) rows.push_back(ProbVector::point_mass(k, w));
  return StationaryStrategy(std::move(rows), VoteRule::MinLikelihoodSuspect);
}

StationaryStrategy interpolated_strategy(int k, double eps) {
  if (k < 2) throw std::invalid_argument("interpolated_strategy: requires K >= 2");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("interpolated_strategy: eps must lie in [0, 1]");
  std::vector<ProbVector> rows;
  rows.reserve(k);
  const double base = (1.0 - eps) / k;
  for (int w = 0; w < k; ++w) {
    std::vector<double> row(k, base);
    row[w] += eps;
    rows.push_back(ProbVector::normalized(std::move(row)));
  }
  return StationaryStrategy(std::move(rows), VoteRule::MinLikelihoodSuspect);
}

Response mixture_chameleon_response(const StationaryStrategy& strategy, Rng& rng) {
  return Response::symbol(static_cast<int>(rng.categorical(strategy.mixture_row().values())));
}

namespace {

int symbol_of(const Response& r, int alphabet_size) {
  if (r.kind() != Response::Kind::Symbol)
    throw std::invalid_argument("expected a symbol response");
  const int s = r.symbol_index();
  if (s >= alphabet_size) throw std::invalid_argument("symbol outside the strategy alphabet");
  return s;
}

}  // namespace

int prop3_estimate(const StationaryStrategy& strategy, std::span<const Response> responses,
                   double alpha) {
  if (responses.empty()) throw std::invalid_argument("prop3_estimate: no responses");
  const int k = strategy.n_words();
  const double m = static_cast<double>(responses.size());
  std::vector<int> symbols;
  symbols.reserve(responses.size());
  for (const Response& r : responses) symbols.push_back(symbol_of(r, strategy.alphabet_size()));

  for (int wi = 0; wi < k; ++wi) {
    bool qualifies = true;
    for (int wj = 0; wj < k && qualifies; ++wj) {
      if (wj == wi) continue;
      const std::span<const std::uint8_t> bin_of = strategy.pair_symbol_bins(wi, wj);
      long counts[3] = {0, 0, 0};
      for (int s : symbols) ++counts[bin_of[s]];
      const BinTriple& model = strategy.pair_bins(wi, wj);
      const double l1 = std::abs(model.p_gt - counts[0] / m) + std::abs(model.p_eq - counts[1] / m) +
                        std::abs(model.p_lt - counts[2] / m);
      if (!(l1 < alpha / 2.0)) qualifies = false;
    }
    if (qualifies) return wi;
  }
  return 0;  // no qualifying word: lowest index
}

int stationary_vote(const StationaryStrategy& strategy, std::span<const Response> responses,
                    int word) {
  if (strategy.vote_rule() == VoteRule::VotePlayerOne) return 0;
  if (responses.empty()) throw std::invalid_argument("stationary_vote: no responses");
  const ProbVector& row = strategy.row(word);
  int suspect = 0;
  double min_likelihood = row[symbol_of(responses[0], strategy.alphabet_size())];
  for (std::size_t p = 1; p < responses.size(); ++p) {
    const double lik = row[symbol_of(responses[p], strategy.alphabet_size())];
    if (lik < min_likelihood) {
      min_likelihood = lik;
      suspect = static_cast<int>(p);
    }
  }
  return suspect;
}

// ---------------------------------------------------------------------------
// MixtureChameleonStrategy

MixtureChameleonStrategy::MixtureChameleonStrategy(
    std::shared_ptr<const StationaryStrategy> strategy)
    : strategy_(std::move(strategy)) {
  if (!strategy_) throw std::invalid_argument("MixtureChameleonStrategy: null strategy");
  alpha_ = strategy_->l1_pairwise_min();
}

Response MixtureChameleonStrategy::respond(const ChameleonView&, Rng& rng) const {
  return mixture_chameleon_response(*strategy_, rng);
}

int MixtureChameleonStrategy::estimate(std::span<const Response> responses, int self) const {
  std::vector<Response> others;
  others.reserve(responses.size() - 1);
  for (std::size_t p = 0; p < responses.size(); ++p)
    if (static_cast<int>(p) != self) others.push_back(responses[p]);
  return prop3_estimate(*strategy_, others, alpha_);
}

int MixtureChameleonStrategy::vote(const ChameleonVoteView& view, Rng&) const {
  if (strategy_->vote_rule() == VoteRule::VotePlayerOne)
    return stationary_vote(*strategy_, view.responses, 0);
  return stationary_vote(*strategy_, view.responses, estimate(view.responses, view.self));
}

int MixtureChameleonStrategy::guess_secret(const SecondChanceView& view, Rng&) const {
  return estimate(view.responses, view.self);
}

// ---------------------------------------------------------------------------
// Ambiguity-preserving strategy

namespace {

int amb_required_size(int block, int n_players, int turn) {
  return block * (n_players - turn);  // |r_i| = l (N + 1 - i) with 1-based i
}

bool amb_consistent(const Response& r, int secret, int block, int n_players, int turn) {
  if (r.kind() != Response::Kind::WordSubset) return false;
  if (r.words().count() != amb_required_size(block, n_players, turn)) return false;
  return secret < 0 || r.words().contains(secret);
}

}  // namespace

AmbState amb_state(int secret, std::span<const Response> prior, int turn, int block, int n_players,
                   int n_words) {
  if (block < 1 || turn < 0 || turn >= n_players ||
      static_cast<int>(prior.size()) != turn || n_words != block * (n_players + 1))
    throw std::invalid_argument("amb_state: malformed arguments");
  AmbState state{WordSet::full(n_words), turn, std::nullopt};
  for (int j = 0; j < turn; ++j) {
    if (!amb_consistent(prior[j], secret, block, n_players, j) && !state.violation_at)
      state.violation_at = j;
  }
  if (turn > 0) {
    const Response& prev = prior[turn - 1];
    state.remaining = prev.kind() == Response::Kind::WordSubset ? prev.words()
                                                                : WordSet(n_words);
  }
  return state;
}

Response amb_respond(int secret, const AmbState& state, int block, int n_players, Rng& rng) {
  if (block < 1 || state.turn < 0 || state.turn >= n_players)
    throw std::invalid_argument("amb_respond: malformed state");
  const int required_prev = block * (n_players + 1 - state.turn);
  if (state.remaining.count() != required_prev || !state.remaining.contains(secret))
    return Response::null();
  const int target = amb_required_size(block, n_players, state.turn);
  return Response::word_subset(state.remaining.sample_subset(target, secret, rng));
}

int amb_vote(std::span<const Response> responses, int secret, int block, int n_players) {
  for (int j = 0; j < static_cast<int>(responses.size()); ++j)
    if (!amb_consistent(responses[j], secret, block, n_players, j)) return j;
  return 0;
}

Response amb_chameleon_respond(const AmbState& state, int block, int n_players, Rng& rng) {
  if (block < 1 || state.turn < 0 || state.turn >= n_players)
    throw std::invalid_argument("amb_chameleon_respond: malformed state");
  const int required_prev = block * (n_players + 1 - state.turn);
  if (state.remaining.count() != required_prev) return Response::null();
  const int target = amb_required_size(block, n_players, state.turn);
  return Response::word_subset(state.remaining.sample_subset(target, -1, rng));
}

int amb_chameleon_guess(std::span<const Response> responses, int self, int block, int n_players,
                        int n_words, Rng& rng) {
  const auto uniform_from = [&rng](const std::vector<int>& words) {
    return words[rng.next_below(words.size())];
  };

  if (responses[self].kind() != Response::Kind::WordSubset)
    return static_cast<int>(rng.next_below(n_words));

  const WordSet prev = self == 0 ? WordSet::full(n_words)
                                 : responses[self - 1].words();
  const std::vector<int> eliminated = prev.difference(responses[self].words());

  if (self == 0) {
    // Identified as the default scapegoat only when the whole game looks
    // consistent; then the secret is uniform over the final remaining words.
    bool consistent = true;
    for (int j = 0; j < n_players && consistent; ++j)
      consistent = amb_consistent(responses[j], -1, block, n_players, j);
    if (consistent) return uniform_from(responses[n_players - 1].words().to_indices());
  }
  if (eliminated.empty()) return static_cast<int>(rng.next_below(n_words));
  return uniform_from(eliminated);
}

ResponseSpace AmbStrategy::response_space(const GameConfig& config) const {
  if (!config.amb_block || *config.amb_block != block_)
    throw std::invalid_argument("AmbStrategy: config amb_block mismatch");
  return {ResponseSpace::Kind::WordSubsets, 0};
}

Response AmbStrategy::respond(const NonChameleonView& view, Rng& rng) const {
  const AmbState state =
      amb_state(view.secret, view.prior, view.turn, block_, view.n_players, view.n_words);
  return amb_respond(view.secret, state, block_, view.n_players, rng);
}

int AmbStrategy::vote(const NonChameleonVoteView& view, Rng&) const {
  return amb_vote(view.responses, view.secret, block_, view.n_players);
}

Response AmbChameleonStrategy::respond(const ChameleonView& view, Rng& rng) const {
  const AmbState state = amb_state(-1, view.prior, view.turn, block_, view.n_players, view.n_words);
  return amb_chameleon_respond(state, block_, view.n_players, rng);
}

int AmbChameleonStrategy::vote(const ChameleonVoteView& view, Rng&) const {
  // Outvoted by the identical honest votes whenever it matters; never a
  // self-vote.
  return view.self == 0 ? 1 : 0;
}

int AmbChameleonStrategy::guess_secret(const SecondChanceView& view, Rng& rng) const {
  return amb_chameleon_guess(view.responses, view.self, block_, view.n_players, view.n_words, rng);
}

}  // namespace chameleon
