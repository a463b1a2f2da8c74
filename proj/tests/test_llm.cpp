#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "chameleon/llm.hpp"

using namespace chameleon;

namespace {

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(CHAMELEON_PRESETS_DIR) + "/prompts/" + name);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::vector<std::string> kHistoricalPeriods = {
    "elizabethan era", "bronze age",       "renaissance",      "roman empire",
    "industrial revolution", "baroque period", "iron age",     "ancient egypt",
    "cold war",        "age of enlightenment", "byzantine era", "great depression",
    "roaring twenties", "stone age",       "victorian era",    "middle ages"};

GameConfig appendix_config(std::uint64_t seed = 7) {
  GameConfig config;
  config.n_players = 4;
  config.category = "Historical Periods";
  config.words = kHistoricalPeriods;
  config.seed = seed;
  config.validate();
  return config;
}

// Scripts the appendix gameplay: chameleon is player 2, secret is
// "industrial revolution", and the chameleon's second-chance guess misses.
ScriptedBackend appendix_backend() {
  ScriptedBackend backend;
  const char* confirmations[4] = {"1", "2", "3", "4"};
  for (int p = 0; p < 4; ++p) {
    backend.push_reply(p, "Yes");  // rules
    backend.push_reply(p, "Yes");  // category
    backend.push_reply(p, confirmations[p]);
    backend.push_reply(p, p == 1 ? "Yes" : "No");  // identity
  }
  backend.push_reply(0, "Factory");
  backend.push_reply(1, "Steam");
  backend.push_reply(2, " Textiles\n");
  backend.push_reply(3, "Coal");
  backend.push_reply(0, "2");
  backend.push_reply(1, "3");
  backend.push_reply(2, "2");
  backend.push_reply(3, "2");
  backend.push_reply(1, "cold war");  // wrong second-chance guess
  return backend;
}

AgentEndpoint test_endpoint() {
  AgentEndpoint e;
  e.base_url = "http://localhost:0";
  e.model = "scripted";
  return e;
}

}  // namespace

TEST_CASE("prompts match the golden files") {
  PromptContext rules{.stage = Stage::Rules, .n_players = 4};
  CHECK(render_prompt(rules) == read_golden("rules_n4.txt"));

  PromptContext category{.stage = Stage::Category};
  category.category = "Historical Periods";
  category.words = kHistoricalPeriods;
  CHECK(render_prompt(category) == read_golden("category_historical_periods.txt"));

  PromptContext order{.stage = Stage::Order, .player_number = 3};
  CHECK(render_prompt(order) == read_golden("order_player3.txt"));

  PromptContext identity{.stage = Stage::Identity, .player_number = 3};
  identity.secret = "industrial revolution";
  const std::string identity_text = render_prompt(identity);
  CHECK(identity_text == read_golden("identity_non_chameleon.txt"));
  CHECK(identity_text.find("The secret word is: industrial revolution.") != std::string::npos);

  PromptContext chameleon_identity{.stage = Stage::Identity, .is_chameleon = true};
  CHECK(render_prompt(chameleon_identity) == read_golden("identity_chameleon.txt"));

  PromptContext respond{.stage = Stage::Respond, .player_number = 3};
  respond.prior_responses = {{1, "Factory"}, {2, "Steam"}};
  CHECK(render_prompt(respond) == read_golden("respond_player3.txt"));

  CHECK(render_relay({{4, "Coal"}}) == read_golden("relay_player3.txt"));

  PromptContext vote{.stage = Stage::Vote};
  CHECK(render_prompt(vote) == read_golden("vote.txt"));

  PromptContext second{.stage = Stage::SecondChance};
  CHECK(render_prompt(second) == read_golden("second_chance.txt"));

  // The reveal-level template instantiates the placeholder.
  PromptContext reveal{.stage = Stage::RevealLevel, .reveal_level = 1};
  std::string expected = read_golden("reveal_level_template.txt");
  const std::string placeholder = "<INFORMATION-REVEALING-LEVEL>";
  expected.replace(expected.find(placeholder), placeholder.size(), "1");
  const std::string rendered = render_prompt(reveal);
  CHECK(rendered == expected);
  CHECK(rendered.find("where 1 is very cryptic and concealing") != std::string::npos);
}

TEST_CASE("rules prompt opens with the player count") {
  PromptContext rules{.stage = Stage::Rules, .n_players = 4};
  CHECK(render_prompt(rules).rfind("You will play a game of Chameleon with 3 other players.", 0) ==
        0);
  rules.n_players = 6;
  CHECK(render_prompt(rules).rfind("You will play a game of Chameleon with 5 other players.", 0) ==
        0);
}

TEST_CASE("prompt context validation") {
  CHECK_THROWS_AS(render_prompt({.stage = Stage::Category}), std::invalid_argument);
  CHECK_THROWS_AS(render_prompt({.stage = Stage::Order}), std::invalid_argument);
  PromptContext bad_identity{.stage = Stage::Identity, .is_chameleon = true};
  bad_identity.secret = "leak";
  CHECK_THROWS_AS(render_prompt(bad_identity), std::invalid_argument);
  PromptContext no_secret{.stage = Stage::Identity};
  CHECK_THROWS_AS(render_prompt(no_secret), std::invalid_argument);
  PromptContext bad_level{.stage = Stage::RevealLevel, .reveal_level = 11};
  CHECK_THROWS_AS(render_prompt(bad_level), std::invalid_argument);
}

TEST_CASE("reply parsing") {
  CHECK(parse_single_word(" Textiles\n") == "Textiles");
  CHECK(parse_single_word("Coal.") == "Coal");
  CHECK(parse_single_word("in-n-out") == "in-n-out");
  CHECK_FALSE(parse_single_word("I think player 2").has_value());
  CHECK_FALSE(parse_single_word("  ").has_value());

  CHECK(parse_vote("2", 4) == 2);
  CHECK(parse_vote(" 4.\n", 4) == 4);
  CHECK_FALSE(parse_vote("5", 4).has_value());
  CHECK_FALSE(parse_vote("player 2", 4).has_value());
  CHECK_FALSE(parse_vote("-1", 4).has_value());

  CHECK(parse_yes_no("Yes") == true);
  CHECK(parse_yes_no(" no.\n") == false);
  CHECK_FALSE(parse_yes_no("maybe").has_value());

  CHECK(parse_secret_guess("Industrial Revolution", kHistoricalPeriods) == 4);
  CHECK(parse_secret_guess(" industrial  revolution.\n", kHistoricalPeriods) == 4);
  CHECK_FALSE(parse_secret_guess("french revolution", kHistoricalPeriods).has_value());
}

TEST_CASE("endpoint JSON and validation") {
  AgentEndpoint e = test_endpoint();
  const AgentEndpoint back = endpoint_from_json(endpoint_to_json(e));
  CHECK(back.base_url == e.base_url);
  CHECK(back.token_budget == 5000);
  e.max_retries = 99;
  CHECK_THROWS_AS(e.validate(), std::invalid_argument);
  e.max_retries = 2;
  e.temperature = -1;
  CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("scripted appendix game reproduces the published transcript") {
  const GameConfig config = appendix_config();
  ScriptedBackend backend = appendix_backend();
  const AgentEndpoint endpoint = test_endpoint();
  const RoleAssignment roles{1, 4};  // player 2, "industrial revolution"
  const LlmGameResult result = play_llm_game(config, {&endpoint, 1}, backend, roles);

  REQUIRE(result.valid());
  const GameTranscript& t = *result.transcript;
  CHECK(t.roles.chameleon == 1);
  CHECK(t.roles.secret == 4);
  CHECK(t.response_labels == std::vector<std::string>{"Factory", "Steam", "Textiles", "Coal"});
  CHECK(t.responses[2].symbol_index() == 2);  // player 3 said Textiles
  CHECK(t.votes == std::vector<int>{1, 2, 1, 1});
  CHECK(t.identified == 1);
  CHECK(t.second_guess == 8);  // cold war
  CHECK(t.outcome == Outcome::NonChameleonsWin);

  // Player 3's conversation equals the appendix exchange byte for byte.
  std::vector<std::pair<std::string, std::string>> expected = {
      {"prompt", read_golden("rules_n4.txt")},
      {"reply", "Yes"},
      {"prompt", read_golden("category_historical_periods.txt")},
      {"reply", "Yes"},
      {"prompt", read_golden("order_player3.txt")},
      {"reply", "3"},
      {"prompt", read_golden("identity_non_chameleon.txt")},
      {"reply", "No"},
      {"prompt", read_golden("respond_player3.txt")},
      {"reply", " Textiles\n"},
      {"prompt", read_golden("relay_player3.txt")},
      {"prompt", read_golden("vote.txt")},
      {"reply", "2"},
  };
  std::vector<std::pair<std::string, std::string>> actual;
  for (const auto& event : result.log.at("events"))
    if (event.at("player").get<int>() == 3)
      actual.emplace_back(event.at("direction").get<std::string>(),
                          event.at("text").get<std::string>());
  REQUIRE(actual.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(actual[i].first == expected[i].first);
    CHECK(actual[i].second == expected[i].second);
  }
}

TEST_CASE("conversations stay isolated") {
  const GameConfig config = appendix_config();
  ScriptedBackend backend = appendix_backend();
  const AgentEndpoint endpoint = test_endpoint();
  const LlmGameResult result =
      play_llm_game(config, {&endpoint, 1}, backend, RoleAssignment{1, 4});
  REQUIRE(result.valid());

  const std::vector<std::string> spoken = {"Factory", "Steam", "Textiles", "Coal"};
  for (const ScriptedBackend::Call& call : backend.calls()) {
    for (int other = 0; other < 4; ++other) {
      if (other == call.player) continue;
      const std::string relayed = "Player " + std::to_string(other + 1) + " said " + spoken[other];
      for (const ChatMessage& message : call.conversation) {
        if (message.role != "user") continue;
        // Another player's word may appear only inside the formatted relay.
        std::size_t at = 0;
        while ((at = message.content.find(spoken[other], at)) != std::string::npos) {
          CHECK(message.content.find(relayed) != std::string::npos);
          ++at;
        }
      }
    }
  }
}

TEST_CASE("replay re-derives the identical transcript with no backend") {
  const GameConfig config = appendix_config();
  ScriptedBackend backend = appendix_backend();
  const AgentEndpoint endpoint = test_endpoint();
  const LlmGameResult original =
      play_llm_game(config, {&endpoint, 1}, backend, RoleAssignment{1, 4});
  REQUIRE(original.valid());

  const LlmGameResult replayed = replay_llm_game(original.log);
  REQUIRE(replayed.valid());
  CHECK(transcript_to_json(*replayed.transcript) == transcript_to_json(*original.transcript));

  const LlmGameResult again = replay_llm_game(original.log);
  CHECK(transcript_to_json(*again.transcript) == transcript_to_json(*replayed.transcript));

  // Tampered prompts are rejected.
  nlohmann::json tampered = original.log;
  tampered["events"][0]["text"] = "something else";
  CHECK_THROWS_AS(replay_llm_game(tampered), std::runtime_error);
}

TEST_CASE("non-forced roles come from the seed and replay verifies them") {
  const GameConfig config = appendix_config(123);
  ScriptedBackend backend;
  // Peek at the roles the seed implies, then script accordingly.
  Rng peek(123);
  const RoleAssignment roles = assign_roles(config, peek);
  for (int p = 0; p < 4; ++p) {
    backend.push_reply(p, "Yes");
    backend.push_reply(p, "Yes");
    backend.push_reply(p, std::to_string(p + 1));
    backend.push_reply(p, p == roles.chameleon ? "Yes" : "No");
  }
  for (int p = 0; p < 4; ++p) backend.push_reply(p, "word" + std::to_string(p));
  for (int p = 0; p < 4; ++p) backend.push_reply(p, "1");
  if (roles.chameleon == 0) backend.push_reply(0, config.words[0]);

  const AgentEndpoint endpoint = test_endpoint();
  const LlmGameResult result = play_llm_game(config, {&endpoint, 1}, backend);
  REQUIRE(result.valid());
  CHECK(result.transcript->roles.chameleon == roles.chameleon);
  CHECK(result.log.at("roles_forced") == false);
  const LlmGameResult replayed = replay_llm_game(result.log);
  CHECK(transcript_to_json(*replayed.transcript) == transcript_to_json(*result.transcript));
}

TEST_CASE("confirmation gets one re-ask before the game is invalid") {
  const GameConfig config = appendix_config();
  ScriptedBackend backend = appendix_backend();
  // Player 1 fumbles the rules confirmation once.
  ScriptedBackend fumbling;
  fumbling.push_reply(0, "ready!");
  int player = 0;
  for (const char* text : {"Yes", "Yes", "1", "No"}) fumbling.push_reply(player, text);
  for (int p = 1; p < 4; ++p) {
    fumbling.push_reply(p, "Yes");
    fumbling.push_reply(p, "Yes");
    fumbling.push_reply(p, std::to_string(p + 1));
    fumbling.push_reply(p, p == 1 ? "Yes" : "No");
  }
  fumbling.push_reply(0, "Factory");
  fumbling.push_reply(1, "Steam");
  fumbling.push_reply(2, "Textiles");
  fumbling.push_reply(3, "Coal");
  for (int p = 0; p < 4; ++p) fumbling.push_reply(p, "2");
  fumbling.push_reply(1, "cold war");

  const AgentEndpoint endpoint = test_endpoint();
  const LlmGameResult result =
      play_llm_game(config, {&endpoint, 1}, fumbling, RoleAssignment{1, 4});
  CHECK(result.valid());

  // Two fumbles invalidate.
  ScriptedBackend hopeless;
  hopeless.push_reply(0, "ready!");
  hopeless.push_reply(0, "absolutely!");
  const LlmGameResult invalid =
      play_llm_game(config, {&endpoint, 1}, hopeless, RoleAssignment{1, 4});
  CHECK_FALSE(invalid.valid());
  CHECK(invalid.invalid_reason.find("did not confirm the rules") != std::string::npos);
  // The invalid log still replays to the same conclusion.
  const LlmGameResult replayed = replay_llm_game(invalid.log);
  CHECK_FALSE(replayed.valid());
  CHECK(replayed.invalid_reason == invalid.invalid_reason);
}

TEST_CASE("garbage replies make every game invalid") {
  const GameConfig config = appendix_config();
  const AgentEndpoint endpoint = test_endpoint();
  std::vector<LlmGameResult> results;
  for (int game = 0; game < 3; ++game) {
    ScriptedBackend garbage;
    for (int p = 0; p < 4; ++p)
      for (int i = 0; i < 8; ++i) garbage.push_reply(p, "I love this game!!");
    results.push_back(play_llm_game(config, {&endpoint, 1}, garbage, RoleAssignment{1, 4}));
  }
  const LlmBatchSummary summary = summarize_llm_games(results);
  CHECK(summary.games == 3);
  CHECK(summary.valid_games == 0);
  CHECK(summary.valid_ratio == 0.0);
}

TEST_CASE("token budget exceedance invalidates") {
  const GameConfig config = appendix_config();
  AgentEndpoint endpoint = test_endpoint();
  endpoint.token_budget = 100;
  ScriptedBackend backend;
  backend.push_reply(0, "Yes", 101);
  const LlmGameResult result =
      play_llm_game(config, {&endpoint, 1}, backend, RoleAssignment{1, 4});
  CHECK_FALSE(result.valid());
  CHECK(result.invalid_reason.find("token budget") != std::string::npos);
}

TEST_CASE("unlisted secret guesses invalidate the game") {
  const GameConfig config = appendix_config();
  ScriptedBackend backend = appendix_backend();
  // Replace the scripted guess with an off-card phrase.
  ScriptedBackend bad = appendix_backend();
  const AgentEndpoint endpoint = test_endpoint();
  // Drain the good guess and push a bad one by re-scripting player 2 fully.
  ScriptedBackend rebuilt;
  const char* numbers[4] = {"1", "2", "3", "4"};
  for (int p = 0; p < 4; ++p) {
    rebuilt.push_reply(p, "Yes");
    rebuilt.push_reply(p, "Yes");
    rebuilt.push_reply(p, numbers[p]);
    rebuilt.push_reply(p, p == 1 ? "Yes" : "No");
  }
  rebuilt.push_reply(0, "Factory");
  rebuilt.push_reply(1, "Steam");
  rebuilt.push_reply(2, "Textiles");
  rebuilt.push_reply(3, "Coal");
  for (int p = 0; p < 4; ++p) rebuilt.push_reply(p, "2");
  rebuilt.push_reply(1, "steam engine");  // not a Historical Periods word
  const LlmGameResult result =
      play_llm_game(config, {&endpoint, 1}, rebuilt, RoleAssignment{1, 4});
  CHECK_FALSE(result.valid());
  CHECK(result.invalid_reason.find("not one of the possible words") != std::string::npos);
}

TEST_CASE("summary counts table-style ratios over valid games") {
  const GameConfig config = appendix_config();
  const AgentEndpoint endpoint = test_endpoint();
  std::vector<LlmGameResult> results;
  {
    ScriptedBackend backend = appendix_backend();
    results.push_back(play_llm_game(config, {&endpoint, 1}, backend, RoleAssignment{1, 4}));
  }
  {
    ScriptedBackend garbage;
    for (int p = 0; p < 4; ++p) garbage.push_reply(p, "???");
    for (int p = 0; p < 4; ++p) garbage.push_reply(p, "???");
    results.push_back(play_llm_game(config, {&endpoint, 1}, garbage, RoleAssignment{1, 4}));
  }
  const LlmBatchSummary summary = summarize_llm_games(results);
  CHECK(summary.games == 2);
  CHECK(summary.valid_games == 1);
  CHECK(summary.valid_ratio == 0.5);
  CHECK(summary.identification_ratio == 1.0);
  CHECK(summary.non_win_ratio == 1.0);
  CHECK(summary.second_chance_win_ratio == 0.0);
}

TEST_CASE("http backend speaks the chat-completion shape") {
  httplib::Server server;
  nlohmann::json seen_request;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_request = nlohmann::json::parse(req.body);
    const nlohmann::json reply{
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "Yes"}}}}}},
        {"usage", {{"completion_tokens", 1}, {"total_tokens", 42}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  AgentEndpoint endpoint;
  endpoint.base_url = "http://127.0.0.1:" + std::to_string(port);
  endpoint.model = "test-model";
  endpoint.temperature = 0.0;
  endpoint.max_tokens = 64;

  HttpBackend backend;
  const ChatBackend::Reply reply =
      backend.complete(0, endpoint, {{"user", "Just say yes or no."}});
  CHECK(reply.text == "Yes");
  CHECK(reply.tokens_used == 1);
  CHECK(seen_request.at("model") == "test-model");
  CHECK(seen_request.at("messages").at(0).at("content") == "Just say yes or no.");
  CHECK(seen_request.at("max_tokens") == 64);

  server.stop();
  serving.join();
}
