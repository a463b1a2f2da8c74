#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chameleon/rng.hpp"

namespace chameleon {

/// Subset of the K candidate words, stored as a K-bit mask.
class WordSet {
 public:
  explicit WordSet(int universe);
  static WordSet full(int universe);
  static WordSet of(int universe, std::initializer_list<int> words);

  int universe() const { return universe_; }
  int count() const;
  bool contains(int word) const;
  void insert(int word);
  void erase(int word);
  std::vector<int> to_indices() const;  // sorted, 0-based

  /// Uniform random subset of this set with exactly `size` elements. When
  /// `keep` is nonnegative it must be a member and is always included.
  WordSet sample_subset(int size, int keep, Rng& rng) const;

  /// Elements of this set that are missing from `other`.
  std::vector<int> difference(const WordSet& other) const;

  bool operator==(const WordSet&) const = default;

 private:
  void check_index(int word) const;

  int universe_ = 0;
  std::vector<std::uint64_t> blocks_;
};

/// One spoken response: a symbol from a finite alphabet, a word subset, or null.
class Response {
 public:
  enum class Kind { Null, Symbol, WordSubset };

  Response() : payload_(std::monostate{}) {}

  static Response null() { return Response(); }
  static Response symbol(int index);
  static Response word_subset(WordSet words);

  Kind kind() const;
  bool is_null() const { return kind() == Kind::Null; }
  int symbol_index() const;
  const WordSet& words() const;

  bool operator==(const Response&) const = default;

 private:
  std::variant<std::monostate, int, WordSet> payload_;
};

struct GameConfig {
  int n_players = 0;
  std::vector<std::string> words;  // K distinct identifiers
  std::string category;            // metadata only
  std::optional<int> amb_block;    // block size l; requires K = l (N + 1)
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(words.size()); }
  void validate() const;  // throws std::invalid_argument on violation

  /// Convenience config with placeholder words w01..wK.
  static GameConfig generic(int n_players, int k, std::optional<int> amb_block = std::nullopt,
                            std::uint64_t seed = 0);
};

/// Identities for one game. Indices are 0-based internally; every external
/// format (JSON, prompts, CSV) uses 1-based player and word numbering.
struct RoleAssignment {
  int chameleon = 0;  // player index
  int secret = 0;     // word index
};

enum class Outcome { NonChameleonsWin, ChameleonWinsMisidentified, ChameleonWinsSecondChance };

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& name);

struct GameTranscript {
  GameConfig config;
  RoleAssignment roles;
  std::vector<Response> responses;  // playing order
  std::vector<int> votes;           // votes[p] = player voted by p
  int identified = 0;
  std::optional<int> second_guess;  // present iff identified == roles.chameleon
  Outcome outcome = Outcome::NonChameleonsWin;
  std::vector<std::string> response_labels;  // optional symbol alphabet labels
};

nlohmann::json config_to_json(const GameConfig& config);
GameConfig config_from_json(const nlohmann::json& j);

nlohmann::json transcript_to_json(const GameTranscript& transcript);
GameTranscript transcript_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Strategy interfaces. The views are shaped so that information hiding is
// structural: a non-chameleon never sees the chameleon index and the
// chameleon never sees the secret.

struct NonChameleonView {
  int n_players = 0;
  int n_words = 0;
  int turn = 0;  // 0-based position of the responder
  int secret = 0;
  std::span<const Response> prior;  // responses of turns 0..turn-1
};

struct ChameleonView {
  int n_players = 0;
  int n_words = 0;
  int turn = 0;
  std::span<const Response> prior;
};

struct NonChameleonVoteView {
  int n_players = 0;
  int n_words = 0;
  int self = 0;
  int secret = 0;
  std::span<const Response> responses;  // all N, playing order
};

struct ChameleonVoteView {
  int n_players = 0;
  int n_words = 0;
  int self = 0;
  std::span<const Response> responses;
};

/// Handed to the chameleon after it has been correctly identified.
struct SecondChanceView {
  int n_players = 0;
  int n_words = 0;
  int self = 0;
  std::span<const Response> responses;
};

/// Legal response shape for a game; the engine validates every response
/// against the non-chameleon strategy's declared space.
struct ResponseSpace {
  enum class Kind { SymbolAlphabet, WordSubsets };
  Kind kind = Kind::SymbolAlphabet;
  int alphabet_size = 0;  // meaningful for SymbolAlphabet
};

class GameConfigError;  // below

class NonChameleonStrategy {
 public:
  virtual ~NonChameleonStrategy() = default;
  virtual ResponseSpace response_space(const GameConfig& config) const = 0;
  virtual Response respond(const NonChameleonView& view, Rng& rng) const = 0;
  virtual int vote(const NonChameleonVoteView& view, Rng& rng) const = 0;
};

class ChameleonStrategy {
 public:
  virtual ~ChameleonStrategy() = default;
  virtual Response respond(const ChameleonView& view, Rng& rng) const = 0;
  virtual int vote(const ChameleonVoteView& view, Rng& rng) const = 0;
  virtual int guess_secret(const SecondChanceView& view, Rng& rng) const = 0;
};

/// A strategy emitted a response outside the game's response space.
class InvalidResponseError : public std::runtime_error {
 public:
  InvalidResponseError(int player, const std::string& what)
      : std::runtime_error("player " + std::to_string(player + 1) + ": " + what),
        player_(player) {}
  int player() const { return player_; }

 private:
  int player_;
};

// ---------------------------------------------------------------------------
// Engine

/// Chameleon index and secret index, independent uniform draws.
RoleAssignment assign_roles(const GameConfig& config, Rng& rng);

/// Majority vote; ties broken uniformly among the tied players.
int resolve_votes(std::span<const int> votes, Rng& rng);

/// Plays one full game: sequential responses, simultaneous votes, tie-break,
/// second chance, outcome judgment. Deterministic given (config, strategies,
/// rng state).
GameTranscript run_game(const GameConfig& config, const NonChameleonStrategy& non_strategy,
                        const ChameleonStrategy& ch_strategy, Rng& rng);

}  // namespace chameleon
