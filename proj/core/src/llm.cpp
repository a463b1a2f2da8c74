#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "chameleon/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <stdexcept>

#include <httplib.h>

namespace chameleon {

void AgentEndpoint::validate() const {
  if (temperature < 0.0) throw std::invalid_argument("AgentEndpoint: negative temperature");
  if (max_tokens < 1) throw std::invalid_argument("AgentEndpoint: max_tokens must be positive");
  if (max_retries < 0 || max_retries > 10)
    throw std::invalid_argument("AgentEndpoint: max_retries must lie in [0, 10]");
  if (token_budget < 0) throw std::invalid_argument("AgentEndpoint: negative token budget");
}

AgentEndpoint endpoint_from_json(const nlohmann::json& j) {
  AgentEndpoint e;
  e.base_url = j.value("base_url", std::string{});
  e.path = j.value("path", std::string{"/v1/chat/completions"});
  e.model = j.value("model", std::string{});
  e.auth_env = j.value("auth_env", std::string{});
  e.temperature = j.value("temperature", 0.0);
  e.max_tokens = j.value("max_tokens", 256);
  e.max_retries = j.value("max_retries", 2);
  e.token_budget = j.value("token_budget", 5000L);
  e.validate();
  return e;
}

nlohmann::json endpoint_to_json(const AgentEndpoint& e) {
  return nlohmann::json{{"base_url", e.base_url},     {"path", e.path},
                        {"model", e.model},           {"auth_env", e.auth_env},
                        {"temperature", e.temperature}, {"max_tokens", e.max_tokens},
                        {"max_retries", e.max_retries}, {"token_budget", e.token_budget}};
}

// ---------------------------------------------------------------------------
// Prompts

namespace {

void require(bool condition, const char* what) {
  if (!condition) throw std::invalid_argument(std::string("render_prompt: ") + what);
}

std::string previous_said(const std::vector<std::pair<int, std::string>>& prior) {
  std::string out = "Here are what the previous players said.";
  for (const auto& [number, word] : prior)
    out += " Player " + std::to_string(number) + " said " + word + ".";
  return out + " ";
}

std::string respond_core(const PromptContext& ctx, const std::string& level_sentence) {
  std::string out;
  if (!ctx.prior_responses.empty()) out += previous_said(ctx.prior_responses);
  out +=
      "It is now your turn to say your word. If your word is too obvious, the Chameleon might "
      "catch on and figure out the secret word. If it's too cryptic, people might start to think "
      "that you're the Chameleon. ";
  out += level_sentence;
  out += "Make sure that your response is a single word. What is your word?";
  return out;
}

}  // namespace

std::string render_prompt(const PromptContext& ctx) {
  switch (ctx.stage) {
    case Stage::Rules: {
      require(ctx.n_players >= 2, "Rules stage needs n_players");
      return "You will play a game of Chameleon with " + std::to_string(ctx.n_players - 1) +
             " other players. The aim in this game is to unmask the Chameleon without giving away "
             "the secret word. If you are the Chameleon, your mission is to blend in with the "
             "other players, avoid detection, and work out the secret word. One of the players "
             "will be randomly selected as the Chameleon. The Chameleon will know its identity but "
             "not the secret word. The other players will know the secret word but will not know "
             "who the Chameleon is. Each player (including the Chameleon) takes it in turns to say "
             "one word related to the secret word. Take a few moments to think of your word. If "
             "another player says the word you were going to say, you can repeat it. Choose "
             "wisely! If your word is too obvious, the Chameleon might catch on and figure out the "
             "secret word. If it's too cryptic, people might start to think that you're the "
             "Chameleon. After all players have said their word, you will vote for who you think "
             "the Chameleon is. The player with the most votes will be revealed as the Chameleon. "
             "If the Chameleon is correctly revealed, the Chameleon has one last chance to guess "
             "the secret word. If the Chameleon guesses correctly, the Chameleon wins. If not, the "
             "other players win. If the Chameleon is not correctly revealed, the Chameleon wins. "
             "The other players lose. Just say yes or no to confirm that you understand the rules "
             "of the game. Do not say anything else than yes or no.";
    }
    case Stage::Category: {
      require(!ctx.category.empty(), "Category stage needs a category");
      require(!ctx.words.empty(), "Category stage needs the word list");
      std::string joined;
      for (std::size_t i = 0; i < ctx.words.size(); ++i) {
        if (i > 0) joined += ", ";
        joined += ctx.words[i];
      }
      return "The category for this game is " + ctx.category + ". The possible secret words are " +
             joined +
             ". Just say yes or no to confirm that you understand the category and possible "
             "secret words. Do not say anything else.";
    }
    case Stage::Order: {
      require(ctx.player_number >= 1, "Order stage needs the player number");
      return "Let's start the game. You are player number " + std::to_string(ctx.player_number) +
             " in the running order. Wait for the identities to be chosen. Just say your player "
             "number to confirm that you understood your running order. Do not say anything else "
             "other than the number.";
    }
    case Stage::Identity: {
      if (ctx.is_chameleon) {
        require(!ctx.secret.has_value(), "chameleon identity prompt must not carry the secret");
        return "You are the Chameleon. You do not know the secret word. Wait for your turn to say "
               "your word. To confirm that you understand your identity, say yes if you are the "
               "Chameleon. Say no if you are not the Chameleon. Do not say anything else.";
      }
      require(ctx.secret.has_value(), "non-chameleon identity prompt needs the secret");
      return "You are not the Chameleon. The secret word is: " + *ctx.secret +
             ". Wait for your turn to say your word. To confirm that you understand your "
             "identity, say yes if you are the Chameleon. Say no if you are not the Chameleon. Do "
             "not say anything else.";
    }
    case Stage::Respond:
      return respond_core(ctx, "");
    case Stage::RevealLevel: {
      require(ctx.reveal_level.has_value(), "RevealLevel stage needs the level");
      require(*ctx.reveal_level >= 1 && *ctx.reveal_level <= 10, "reveal level must lie in [1, 10]");
      return respond_core(ctx,
                          "On a scale of 1 to 10, where 1 is very cryptic and concealing, and 10 "
                          "is highly information-revealing, your strategy should be around " +
                              std::to_string(*ctx.reveal_level) + ". ");
    }
    case Stage::Vote:
      return "It is now your turn to vote for who you think the Chameleon is. Remember that the "
             "Chameleon does not know the secret word and the other players do. If you are the "
             "Chameleon, you can vote for another player to win the game. If you are not the "
             "Chameleon, you are trying to identify the Chameleon. Who do you think the Chameleon "
             "is? Only give the player number. Do not say anything else.";
    case Stage::SecondChance:
      return "You have been correctly identified as the Chameleon. You have one last chance to "
             "win the game by guessing the secret word. What do you think the secret word is? "
             "Only say your guess for the secret word. Do not say anything else.";
  }
  throw std::logic_error("render_prompt: unknown stage");
}

std::string render_relay(const std::vector<std::pair<int, std::string>>& later_responses) {
  if (later_responses.empty())
    throw std::invalid_argument("render_relay: no later responses");
  std::string out = "Here are the words that the next players said:";
  for (const auto& [number, word] : later_responses)
    out += " Player " + std::to_string(number) + " said " + word + ".";
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string trim_reply(const std::string& reply) {
  std::size_t begin = 0, end = reply.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(reply[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(reply[end - 1]))) --end;
  std::string out = reply.substr(begin, end - begin);
  const auto is_punct = [](char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
  };
  while (!out.empty() &&
         (is_punct(out.back()) || std::isspace(static_cast<unsigned char>(out.back()))))
    out.pop_back();
  return out;
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Lowercase with internal whitespace runs collapsed to single spaces.
std::string normalize_phrase(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim_reply(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::optional<std::string> parse_single_word(const std::string& reply) {
  const std::string word = trim_reply(reply);
  if (word.empty()) return std::nullopt;
  for (char c : word)
    if (std::isspace(static_cast<unsigned char>(c))) return std::nullopt;
  return word;
}

std::optional<int> parse_vote(const std::string& reply, int n_players) {
  const std::string token = trim_reply(reply);
  if (token.empty() || token.size() > 3) return std::nullopt;
  for (char c : token)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  const int value = std::stoi(token);
  if (value < 1 || value > n_players) return std::nullopt;
  return value;
}

std::optional<bool> parse_yes_no(const std::string& reply) {
  const std::string token = lowercase(trim_reply(reply));
  if (token == "yes") return true;
  if (token == "no") return false;
  return std::nullopt;
}

std::optional<int> parse_secret_guess(const std::string& reply,
                                      const std::vector<std::string>& words) {
  const std::string guess = normalize_phrase(reply);
  if (guess.empty()) return std::nullopt;
  for (std::size_t w = 0; w < words.size(); ++w)
    if (normalize_phrase(words[w]) == guess) return static_cast<int>(w);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Backends

void ScriptedBackend::push_reply(int player, std::string text, long tokens_used) {
  replies_[player].push_back({std::move(text), tokens_used});
}

ChatBackend::Reply ScriptedBackend::complete(int player, const AgentEndpoint&,
                                             const std::vector<ChatMessage>& conversation) {
  calls_.push_back({player, conversation});
  auto it = replies_.find(player);
  if (it == replies_.end() || it->second.empty())
    throw std::runtime_error("ScriptedBackend: no reply scripted for player " +
                             std::to_string(player + 1));
  Reply reply = std::move(it->second.front());
  it->second.pop_front();
  return reply;
}

ChatBackend::Reply HttpBackend::complete(int, const AgentEndpoint& endpoint,
                                         const std::vector<ChatMessage>& conversation) {
  nlohmann::json messages = nlohmann::json::array();
  for (const ChatMessage& m : conversation)
    messages.push_back({{"role", m.role}, {"content", m.content}});
  const nlohmann::json request{{"model", endpoint.model},
                               {"messages", messages},
                               {"temperature", endpoint.temperature},
                               {"max_tokens", endpoint.max_tokens}};

  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (!endpoint.auth_env.empty()) {
    const char* token = std::getenv(endpoint.auth_env.c_str());
    if (!token)
      throw std::runtime_error("auth environment variable not set: " + endpoint.auth_env);
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const auto res = client.Post(endpoint.path, headers, request.dump(), "application/json");
  if (!res) throw std::runtime_error("chat request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw std::runtime_error("chat request returned status " + std::to_string(res->status));

  const nlohmann::json body = nlohmann::json::parse(res->body);
  Reply reply;
  reply.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
  if (body.contains("usage")) {
    const auto& usage = body.at("usage");
    if (usage.contains("completion_tokens"))
      reply.tokens_used = usage.at("completion_tokens").get<long>();
    else if (usage.contains("total_tokens"))
      reply.tokens_used = usage.at("total_tokens").get<long>();
  }
  return reply;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

struct GameInvalid {
  std::string reason;
};

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Message channel between the driver and either a live backend or a stored
/// log. exchange() expects a reply; notify() does not.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void notify(int player, const std::string& prompt) = 0;
  virtual ChatBackend::Reply exchange(int player, const std::string& prompt) = 0;
};

class LiveTransport : public Transport {
 public:
  LiveTransport(std::span<const AgentEndpoint> endpoints, ChatBackend& backend,
                nlohmann::json& events)
      : endpoints_(endpoints), backend_(backend), events_(events),
        conversations_(endpoints.size()) {}

  void notify(int player, const std::string& prompt) override {
    conversations_[player].push_back({"user", prompt});
    log(player, "prompt", prompt, std::nullopt);
  }

  ChatBackend::Reply exchange(int player, const std::string& prompt) override {
    conversations_[player].push_back({"user", prompt});
    log(player, "prompt", prompt, std::nullopt);
    const AgentEndpoint& endpoint = endpoints_[player];
    ChatBackend::Reply reply;
    for (int attempt = 0;; ++attempt) {
      try {
        reply = backend_.complete(player, endpoint, conversations_[player]);
        break;
      } catch (const std::exception& e) {
        if (attempt >= endpoint.max_retries)
          throw GameInvalid{"player " + std::to_string(player + 1) +
                            " transport failure: " + e.what()};
      }
    }
    log(player, "reply", reply.text, reply.tokens_used);
    conversations_[player].push_back({"assistant", reply.text});
    return reply;
  }

 private:
  void log(int player, const char* direction, const std::string& text,
           std::optional<long> tokens) {
    nlohmann::json event{{"player", player + 1},
                         {"direction", direction},
                         {"text", text},
                         {"timestamp", now_iso8601()}};
    if (tokens) event["tokens"] = *tokens;
    events_.push_back(std::move(event));
  }

  std::span<const AgentEndpoint> endpoints_;
  ChatBackend& backend_;
  nlohmann::json& events_;
  std::vector<std::vector<ChatMessage>> conversations_;
};

class ReplayTransport : public Transport {
 public:
  ReplayTransport(const nlohmann::json& events, std::string original_invalid_reason)
      : events_(events), original_invalid_reason_(std::move(original_invalid_reason)) {}

  void notify(int player, const std::string& prompt) override {
    expect(player, "prompt", prompt);
  }

  ChatBackend::Reply exchange(int player, const std::string& prompt) override {
    expect(player, "prompt", prompt);
    const nlohmann::json& event = next(player, "reply");
    ChatBackend::Reply reply;
    reply.text = event.at("text").get<std::string>();
    reply.tokens_used = event.value("tokens", 0L);
    return reply;
  }

  bool exhausted() const { return cursor_ == events_.size(); }

 private:
  const nlohmann::json& next(int player, const char* direction) {
    if (cursor_ >= events_.size()) {
      // A truncated log means the original game aborted here.
      if (!original_invalid_reason_.empty()) throw GameInvalid{original_invalid_reason_};
      throw std::runtime_error("replay: log ends before the game does");
    }
    const nlohmann::json& event = events_.at(cursor_++);
    if (event.at("player").get<int>() != player + 1 ||
        event.at("direction").get<std::string>() != direction)
      throw std::runtime_error("replay: log diverges from the game sequence");
    return event;
  }

  void expect(int player, const char* direction, const std::string& text) {
    const nlohmann::json& event = next(player, direction);
    if (event.at("text").get<std::string>() != text)
      throw std::runtime_error("replay: logged prompt differs from the regenerated prompt");
  }

  const nlohmann::json& events_;
  std::string original_invalid_reason_;
  std::size_t cursor_ = 0;
};

std::vector<AgentEndpoint> expand_endpoints(std::span<const AgentEndpoint> endpoints, int n) {
  if (endpoints.empty())
    throw std::invalid_argument("play_llm_game: at least one endpoint required");
  if (endpoints.size() != 1 && static_cast<int>(endpoints.size()) != n)
    throw std::invalid_argument("play_llm_game: endpoint count must be 1 or N");
  std::vector<AgentEndpoint> out;
  for (int p = 0; p < n; ++p) {
    const AgentEndpoint& e = endpoints.size() == 1 ? endpoints[0] : endpoints[p];
    e.validate();
    out.push_back(e);
  }
  return out;
}

/// Runs the full game grammar over a transport. Fills transcript or
/// invalid_reason into both the result and the log.
LlmGameResult drive_game(const GameConfig& config, std::span<const AgentEndpoint> endpoints,
                         Transport& transport, const RoleAssignment& roles, Rng& rng,
                         nlohmann::json log) {
  const int n = config.n_players;
  LlmGameResult result;

  const auto ask = [&](int player, const std::string& prompt) -> std::string {
    const ChatBackend::Reply reply = transport.exchange(player, prompt);
    const long budget = endpoints[player].token_budget;
    if (budget > 0 && reply.tokens_used > budget)
      throw GameInvalid{"player " + std::to_string(player + 1) + " exceeded the token budget"};
    return reply.text;
  };

  // One re-ask with the identical prompt, then the game is invalid.
  const auto confirm = [&](int player, const std::string& prompt,
                           const std::function<bool(const std::string&)>& accepted,
                           const char* what) {
    if (accepted(ask(player, prompt))) return;
    if (accepted(ask(player, prompt))) return;
    throw GameInvalid{"player " + std::to_string(player + 1) + ": " + what};
  };

  try {
    PromptContext base;
    base.n_players = n;
    base.category = config.category;
    base.words = config.words;

    const auto says_yes = [](const std::string& reply) {
      return parse_yes_no(reply) == std::optional<bool>(true);
    };

    for (int p = 0; p < n; ++p) {
      PromptContext ctx = base;
      ctx.stage = Stage::Rules;
      confirm(p, render_prompt(ctx), says_yes, "did not confirm the rules");
    }
    for (int p = 0; p < n; ++p) {
      PromptContext ctx = base;
      ctx.stage = Stage::Category;
      confirm(p, render_prompt(ctx), says_yes, "did not confirm the category");
    }
    for (int p = 0; p < n; ++p) {
      PromptContext ctx = base;
      ctx.stage = Stage::Order;
      ctx.player_number = p + 1;
      confirm(
          p, render_prompt(ctx),
          [&](const std::string& reply) { return parse_vote(reply, n) == p + 1; },
          "did not confirm the running order");
    }
    for (int p = 0; p < n; ++p) {
      PromptContext ctx = base;
      ctx.stage = Stage::Identity;
      ctx.player_number = p + 1;
      ctx.is_chameleon = (p == roles.chameleon);
      if (!ctx.is_chameleon) ctx.secret = config.words[roles.secret];
      const bool expected = ctx.is_chameleon;
      confirm(
          p, render_prompt(ctx),
          [&](const std::string& reply) {
            return parse_yes_no(reply) == std::optional<bool>(expected);
          },
          "did not confirm its identity");
    }

    std::vector<std::string> spoken;
    spoken.reserve(n);
    for (int turn = 0; turn < n; ++turn) {
      PromptContext ctx = base;
      ctx.stage = Stage::Respond;
      ctx.player_number = turn + 1;
      for (int i = 0; i < turn; ++i) ctx.prior_responses.emplace_back(i + 1, spoken[i]);
      const auto word = parse_single_word(ask(turn, render_prompt(ctx)));
      if (!word)
        throw GameInvalid{"player " + std::to_string(turn + 1) + ": unparseable response word"};
      spoken.push_back(*word);
    }

    for (int p = 0; p + 1 < n; ++p) {
      std::vector<std::pair<int, std::string>> later;
      for (int i = p + 1; i < n; ++i) later.emplace_back(i + 1, spoken[i]);
      transport.notify(p, render_relay(later));
    }

    std::vector<int> votes;
    votes.reserve(n);
    for (int p = 0; p < n; ++p) {
      PromptContext ctx = base;
      ctx.stage = Stage::Vote;
      const auto vote = parse_vote(ask(p, render_prompt(ctx)), n);
      if (!vote) throw GameInvalid{"player " + std::to_string(p + 1) + ": unparseable vote"};
      votes.push_back(*vote - 1);
    }

    GameTranscript t;
    t.config = config;
    t.roles = roles;
    t.votes = votes;
    t.identified = resolve_votes(votes, rng);

    for (const std::string& word : spoken) {
      auto it = std::find(t.response_labels.begin(), t.response_labels.end(), word);
      if (it == t.response_labels.end()) {
        t.response_labels.push_back(word);
        it = std::prev(t.response_labels.end());
      }
      t.responses.push_back(
          Response::symbol(static_cast<int>(it - t.response_labels.begin())));
    }

    if (t.identified == roles.chameleon) {
      PromptContext ctx = base;
      ctx.stage = Stage::SecondChance;
      const auto guess = parse_secret_guess(ask(roles.chameleon, render_prompt(ctx)), config.words);
      if (!guess)
        throw GameInvalid{"player " + std::to_string(roles.chameleon + 1) +
                          ": secret guess is not one of the possible words"};
      t.second_guess = guess;
      t.outcome = (*guess == roles.secret) ? Outcome::ChameleonWinsSecondChance
                                           : Outcome::NonChameleonsWin;
    } else {
      t.outcome = Outcome::ChameleonWinsMisidentified;
    }

    log["transcript"] = transcript_to_json(t);
    result.transcript = std::move(t);
  } catch (const GameInvalid& invalid) {
    result.invalid_reason = invalid.reason;
    log["invalid_reason"] = invalid.reason;
  }
  result.log = std::move(log);
  return result;
}

}  // namespace

LlmGameResult play_llm_game(const GameConfig& config, std::span<const AgentEndpoint> endpoints,
                            ChatBackend& backend, std::optional<RoleAssignment> forced_roles) {
  config.validate();
  const std::vector<AgentEndpoint> expanded = expand_endpoints(endpoints, config.n_players);

  Rng rng(config.seed);
  const bool forced = forced_roles.has_value();
  const RoleAssignment roles = forced ? *forced_roles : assign_roles(config, rng);
  if (roles.chameleon < 0 || roles.chameleon >= config.n_players || roles.secret < 0 ||
      roles.secret >= config.k())
    throw std::invalid_argument("play_llm_game: forced roles out of range");

  nlohmann::json log;
  log["format_version"] = 1;
  log["config"] = config_to_json(config);
  log["roles_forced"] = forced;
  log["roles"] = {{"chameleon", roles.chameleon + 1}, {"secret", roles.secret + 1}};
  nlohmann::json eps = nlohmann::json::array();
  for (const AgentEndpoint& e : expanded) eps.push_back(endpoint_to_json(e));
  log["endpoints"] = eps;
  log["events"] = nlohmann::json::array();

  LiveTransport transport(expanded, backend, log["events"]);
  return drive_game(config, expanded, transport, roles, rng, std::move(log));
}

LlmGameResult replay_llm_game(const nlohmann::json& log) {
  const GameConfig config = config_from_json(log.at("config"));
  std::vector<AgentEndpoint> endpoints;
  for (const auto& ej : log.at("endpoints")) endpoints.push_back(endpoint_from_json(ej));
  if (static_cast<int>(endpoints.size()) != config.n_players)
    throw std::runtime_error("replay: endpoint count does not match the player count");

  Rng rng(config.seed);
  RoleAssignment roles;
  roles.chameleon = log.at("roles").at("chameleon").get<int>() - 1;
  roles.secret = log.at("roles").at("secret").get<int>() - 1;
  if (!log.at("roles_forced").get<bool>()) {
    const RoleAssignment derived = assign_roles(config, rng);
    if (derived.chameleon != roles.chameleon || derived.secret != roles.secret)
      throw std::runtime_error("replay: logged roles do not match the seed");
  }

  nlohmann::json fresh = log;
  fresh.erase("transcript");
  fresh.erase("invalid_reason");
  ReplayTransport transport(log.at("events"), log.value("invalid_reason", std::string{}));
  LlmGameResult result = drive_game(config, endpoints, transport, roles, rng, std::move(fresh));
  if (result.valid() && !transport.exhausted())
    throw std::runtime_error("replay: log has trailing events");
  return result;
}

LlmBatchSummary summarize_llm_games(std::span<const LlmGameResult> results) {
  LlmBatchSummary s;
  s.games = static_cast<long>(results.size());
  for (const LlmGameResult& r : results) {
    if (!r.valid()) continue;
    ++s.valid_games;
    const GameTranscript& t = *r.transcript;
    if (t.identified == t.roles.chameleon) ++s.identified;
    if (t.outcome == Outcome::NonChameleonsWin) ++s.non_wins;
    if (t.outcome == Outcome::ChameleonWinsSecondChance) ++s.second_chance_wins;
  }
  if (s.games > 0) s.valid_ratio = static_cast<double>(s.valid_games) / s.games;
  if (s.valid_games > 0) {
    s.non_win_ratio = static_cast<double>(s.non_wins) / s.valid_games;
    s.identification_ratio = static_cast<double>(s.identified) / s.valid_games;
  }
  if (s.identified > 0)
    s.second_chance_win_ratio = static_cast<double>(s.second_chance_wins) / s.identified;
  return s;
}

}  // namespace chameleon
