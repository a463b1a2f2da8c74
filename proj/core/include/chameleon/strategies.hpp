#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chameleon/game.hpp"
#include "chameleon/prob.hpp"

namespace chameleon {

enum class VoteRule { VotePlayerOne, MinLikelihoodSuspect };

std::string to_string(VoteRule rule);
VoteRule vote_rule_from_string(const std::string& name);

/// Stationary non-chameleon strategy: one response distribution per secret
/// word over a shared symbol alphabet, plus a voting rule. Immutable after
/// construction; per-pair comparison bins are precomputed.
class StationaryStrategy : public NonChameleonStrategy {
 public:
  StationaryStrategy(std::vector<ProbVector> response_dists, VoteRule vote_rule,
                     std::vector<std::string> alphabet_labels = {});

  int n_words() const { return static_cast<int>(rows_.size()); }
  int alphabet_size() const { return static_cast<int>(rows_.front().size()); }
  const ProbVector& row(int word) const { return rows_.at(word); }
  const std::vector<std::string>& alphabet_labels() const { return labels_; }
  VoteRule vote_rule() const { return vote_rule_; }

  /// Same distributions and labels, different voting rule.
  StationaryStrategy with_vote_rule(VoteRule rule) const;

  double kl_pairwise_max() const;  // alpha for the concealing definition
  double l1_pairwise_min() const;  // alpha for the revealing definition

  /// Equal-weight mixture of all rows: the response distribution of the
  /// blending chameleon.
  ProbVector mixture_row() const;

  /// Model comparison bins for the ordered pair (wi, wj), under row wi.
  const BinTriple& pair_bins(int wi, int wj) const;
  /// Bin index (0 = gt, 1 = eq, 2 = lt) of each alphabet symbol for (wi, wj).
  std::span<const std::uint8_t> pair_symbol_bins(int wi, int wj) const;

  // NonChameleonStrategy interface.
  ResponseSpace response_space(const GameConfig& config) const override;
  Response respond(const NonChameleonView& view, Rng& rng) const override;
  int vote(const NonChameleonVoteView& view, Rng& rng) const override;

  nlohmann::json to_json() const;
  static StationaryStrategy from_json(const nlohmann::json& j);

 private:
  std::size_t pair_slot(int wi, int wj) const;

  std::vector<ProbVector> rows_;
  VoteRule vote_rule_;
  std::vector<std::string> labels_;
  std::vector<BinTriple> pair_bins_;                    // K*K slots, diagonal unused
  std::vector<std::vector<std::uint8_t>> pair_symbols_; // symbol -> bin per pair
};

/// Constant response regardless of the secret; votes for player 1.
StationaryStrategy zero_kl_strategy(int k);

/// Unique response per secret word; votes for the least likely speaker.
StationaryStrategy full_reveal_strategy(int k);

/// Row w = (1 - eps) * uniform + eps * point mass at w. eps = 0 conceals
/// (all rows equal), eps = 1 is full reveal.
StationaryStrategy interpolated_strategy(int k, double eps);

/// One sample from the equal-weight row mixture.
Response mixture_chameleon_response(const StationaryStrategy& strategy, Rng& rng);

/// Pairwise-bin secret-word estimator. Returns the unique word whose model
/// bins are within L1 < alpha/2 of the empirical bins for every other word;
/// falls back to the lowest word index when no word qualifies. `responses`
/// are the observed non-chameleon symbols; `alpha` is the strategy's minimum
/// pairwise L1 distance.
int prop3_estimate(const StationaryStrategy& strategy, std::span<const Response> responses,
                   double alpha);

/// Voting rule shared by all players. VotePlayerOne ignores everything;
/// MinLikelihoodSuspect votes the player whose response is least likely under
/// the voter's word (ties to the lowest index). Non-chameleons pass the
/// secret; the chameleon passes its estimate.
int stationary_vote(const StationaryStrategy& strategy, std::span<const Response> responses,
                    int word);

/// Blending chameleon for stationary games: responds from the row mixture,
/// votes with the shared rule using its estimated word, and spends its second
/// chance on the pairwise-bin estimate.
class MixtureChameleonStrategy : public ChameleonStrategy {
 public:
  explicit MixtureChameleonStrategy(std::shared_ptr<const StationaryStrategy> strategy);

  Response respond(const ChameleonView& view, Rng& rng) const override;
  int vote(const ChameleonVoteView& view, Rng& rng) const override;
  int guess_secret(const SecondChanceView& view, Rng& rng) const override;

 private:
  int estimate(std::span<const Response> responses, int self) const;

  std::shared_ptr<const StationaryStrategy> strategy_;
  double alpha_;
};

// ---------------------------------------------------------------------------
// History-dependent ambiguity-preserving strategy. Responses are word
// subsets that shrink by l words per turn and always contain the secret;
// votes go to the first inconsistent player.

struct AmbState {
  WordSet remaining;                 // previous response r_{i-1} (r_0 = W)
  int turn = 0;                      // 0-based
  std::optional<int> violation_at;   // first inconsistent player, if any
};

/// State seen by the responder at `turn` given the prior responses. For a
/// non-chameleon, consistency of each prior response is judged with the
/// secret; pass secret = -1 for the public (chameleon) view, which can only
/// judge sizes and nesting.
AmbState amb_state(int secret, std::span<const Response> prior, int turn, int block, int n_players,
                   int n_words);

/// Honest response: null when the previous response is inconsistent, else a
/// uniform random subset of the remaining words of size l (N + 1 - i)
/// containing the secret.
Response amb_respond(int secret, const AmbState& state, int block, int n_players, Rng& rng);

/// First player whose response dropped the secret or had the wrong size;
/// player 1 when everyone is consistent.
int amb_vote(std::span<const Response> responses, int secret, int block, int n_players);

/// Best-response chameleon move: a uniform subset of the remaining words of
/// the prescribed size (all choices are equivalent without secret knowledge).
Response amb_chameleon_respond(const AmbState& state, int block, int n_players, Rng& rng);

/// Second-chance guess once identified: uniform over the l words this player
/// eliminated, unless it is player 1 and the whole game stayed consistent, in
/// which case uniform over the final remaining words.
int amb_chameleon_guess(std::span<const Response> responses, int self, int block, int n_players,
                        int n_words, Rng& rng);

class AmbStrategy : public NonChameleonStrategy {
 public:
  explicit AmbStrategy(int block) : block_(block) {}
  ResponseSpace response_space(const GameConfig& config) const override;
  Response respond(const NonChameleonView& view, Rng& rng) const override;
  int vote(const NonChameleonVoteView& view, Rng& rng) const override;

 private:
  int block_;
};

class AmbChameleonStrategy : public ChameleonStrategy {
 public:
  explicit AmbChameleonStrategy(int block) : block_(block) {}
  Response respond(const ChameleonView& view, Rng& rng) const override;
  int vote(const ChameleonVoteView& view, Rng& rng) const override;
  int guess_secret(const SecondChanceView& view, Rng& rng) const override;

 private:
  int block_;
};

}  // namespace chameleon
