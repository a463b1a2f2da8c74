#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chameleon/game.hpp"

namespace chameleon {

/// One chat-completion endpoint. Credentials are referenced by environment
/// variable name only and never appear in configs or logs.
struct AgentEndpoint {
  std::string base_url;  // e.g. https://api.example.com
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string auth_env;  // name of the env var holding the bearer token
  double temperature = 0.0;
  int max_tokens = 256;
  int max_retries = 2;
  long token_budget = 5000;  // per reply; exceeding invalidates the game

  void validate() const;
};

AgentEndpoint endpoint_from_json(const nlohmann::json& j);
nlohmann::json endpoint_to_json(const AgentEndpoint& endpoint);

// ---------------------------------------------------------------------------
// Prompts

enum class Stage { Rules, Category, Order, Identity, Respond, Vote, SecondChance, RevealLevel };

struct PromptContext {
  Stage stage = Stage::Rules;
  int n_players = 0;
  std::string category;
  std::vector<std::string> words;
  int player_number = 0;  // 1-based, as spoken in prompts
  bool is_chameleon = false;
  std::optional<std::string> secret;  // must be absent for chameleon identity
  std::vector<std::pair<int, std::string>> prior_responses;  // (player number, word)
  std::optional<int> reveal_level;  // 1..10
};

/// Byte-exact prompt text for the stage; throws std::invalid_argument when a
/// required field is missing or inconsistent.
std::string render_prompt(const PromptContext& ctx);

/// Relay of the words spoken after a player's own turn, sent before voting.
std::string render_relay(const std::vector<std::pair<int, std::string>>& later_responses);

// ---------------------------------------------------------------------------
// Reply parsing. nullopt marks an unparseable reply (the game becomes
// invalid; the raw text is retained in the conversation log).

/// Trims whitespace and trailing punctuation; accepts a single token only.
std::optional<std::string> parse_single_word(const std::string& reply);

/// Accepts a bare player number in [1, n_players]; returns it 1-based.
std::optional<int> parse_vote(const std::string& reply, int n_players);

std::optional<bool> parse_yes_no(const std::string& reply);

/// Case-insensitive match of the reply against the word list; returns the
/// 0-based word index.
std::optional<int> parse_secret_guess(const std::string& reply,
                                      const std::vector<std::string>& words);

// ---------------------------------------------------------------------------
// Chat backends

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

class ChatBackend {
 public:
  struct Reply {
    std::string text;
    long tokens_used = 0;  // 0 when the backend does not report usage
  };

  virtual ~ChatBackend() = default;
  /// Completes the conversation for one player. Throws on transport failure.
  virtual Reply complete(int player, const AgentEndpoint& endpoint,
                         const std::vector<ChatMessage>& conversation) = 0;
};

/// Canned replies for tests and offline runs; records every call.
class ScriptedBackend : public ChatBackend {
 public:
  void push_reply(int player, std::string text, long tokens_used = 0);
  Reply complete(int player, const AgentEndpoint& endpoint,
                 const std::vector<ChatMessage>& conversation) override;

  struct Call {
    int player;
    std::vector<ChatMessage> conversation;
  };
  const std::vector<Call>& calls() const { return calls_; }

 private:
  std::map<int, std::deque<Reply>> replies_;
  std::vector<Call> calls_;
};

/// Minimal chat-completion client over HTTP(S): messages array in, first
/// choice's message content out. Retries per the endpoint policy.
class HttpBackend : public ChatBackend {
 public:
  Reply complete(int player, const AgentEndpoint& endpoint,
                 const std::vector<ChatMessage>& conversation) override;
};

// ---------------------------------------------------------------------------
// Orchestration

struct LlmGameResult {
  std::optional<GameTranscript> transcript;  // empty for invalid games
  std::string invalid_reason;                // set for invalid games
  nlohmann::json log;                        // always written
  bool valid() const { return transcript.has_value(); }
};

/// Plays one game with one isolated conversation per player. `endpoints`
/// holds either one endpoint shared by all players or one per player. Role
/// assignment and vote tie-breaks draw from config.seed, so a stored log
/// replays to the identical transcript.
LlmGameResult play_llm_game(const GameConfig& config, std::span<const AgentEndpoint> endpoints,
                            ChatBackend& backend,
                            std::optional<RoleAssignment> forced_roles = std::nullopt);

/// Re-derives the transcript from a stored conversation log with no network
/// access; throws std::runtime_error when the log diverges from the game
/// grammar.
LlmGameResult replay_llm_game(const nlohmann::json& log);

struct LlmBatchSummary {
  long games = 0;
  long valid_games = 0;
  double valid_ratio = 0.0;
  // Ratios over valid games only (Table-style accounting).
  long non_wins = 0;
  long identified = 0;
  long second_chance_wins = 0;
  double non_win_ratio = 0.0;
  double identification_ratio = 0.0;
  double second_chance_win_ratio = 0.0;  // over identified valid games
};

LlmBatchSummary summarize_llm_games(std::span<const LlmGameResult> results);

}  // namespace chameleon
