#include "chameleon/game.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace chameleon {

// ---------------------------------------------------------------------------
// WordSet

WordSet::WordSet(int universe) : universe_(universe) {
  if (universe <= 0) throw std::invalid_argument("WordSet: universe must be positive");
  blocks_.assign((universe + 63) / 64, 0);
}

WordSet WordSet::full(int universe) {
  WordSet set(universe);
  for (int w = 0; w < universe; ++w) set.insert(w);
  return set;
}

WordSet WordSet::of(int universe, std::initializer_list<int> words) {
  WordSet set(universe);
  for (int w : words) set.insert(w);
  return set;
}

void WordSet::check_index(int word) const {
  if (word < 0 || word >= universe_)
    throw std::out_of_range("WordSet: word index out of range");
}

int WordSet::count() const {
  int total = 0;
  for (std::uint64_t block : blocks_) total += std::popcount(block);
  return total;
}

bool WordSet::contains(int word) const {
  check_index(word);
  return (blocks_[word / 64] >> (word % 64)) & 1;
}

void WordSet::insert(int word) {
  check_index(word);
  blocks_[word / 64] |= std::uint64_t{1} << (word % 64);
}

void WordSet::erase(int word) {
  check_index(word);
  blocks_[word / 64] &= ~(std::uint64_t{1} << (word % 64));
}

std::vector<int> WordSet::to_indices() const {
  std::vector<int> out;
  out.reserve(count());
  for (int w = 0; w < universe_; ++w)
    if (contains(w)) out.push_back(w);
  return out;
}

WordSet WordSet::sample_subset(int size, int keep, Rng& rng) const {
  if (size < 0 || size > count())
    throw std::invalid_argument("WordSet::sample_subset: size out of range");
  std::vector<int> pool = to_indices();
  WordSet out(universe_);
  int needed = size;
  if (keep >= 0) {
    if (!contains(keep))
      throw std::invalid_argument("WordSet::sample_subset: keep is not a member");
    if (size == 0)
      throw std::invalid_argument("WordSet::sample_subset: size 0 cannot keep a member");
    pool.erase(std::find(pool.begin(), pool.end(), keep));
    out.insert(keep);
    --needed;
  }
  // Partial Fisher-Yates over the remaining pool.
  for (int i = 0; i < needed; ++i) {
    const int j = i + static_cast<int>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    out.insert(pool[i]);
  }
  return out;
}

std::vector<int> WordSet::difference(const WordSet& other) const {
  if (other.universe_ != universe_)
    throw std::invalid_argument("WordSet::difference: universe mismatch");
  std::vector<int> out;
  for (int w = 0; w < universe_; ++w)
    if (contains(w) && !other.contains(w)) out.push_back(w);
  return out;
}

// ---------------------------------------------------------------------------
// Response

Response Response::symbol(int index) {
  if (index < 0) throw std::invalid_argument("Response::symbol: negative index");
  Response r;
  r.payload_ = index;
  return r;
}

Response Response::word_subset(WordSet words) {
  Response r;
  r.payload_ = std::move(words);
  return r;
}

Response::Kind Response::kind() const {
  switch (payload_.index()) {
    case 1: return Kind::Symbol;
    case 2: return Kind::WordSubset;
    default: return Kind::Null;
  }
}

int Response::symbol_index() const {
  if (kind() != Kind::Symbol) throw std::logic_error("Response: not a symbol");
  return std::get<int>(payload_);
}

const WordSet& Response::words() const {
  if (kind() != Kind::WordSubset) throw std::logic_error("Response: not a word subset");
  return std::get<WordSet>(payload_);
}

// ---------------------------------------------------------------------------
// GameConfig

void GameConfig::validate() const {
  if (n_players < 3) throw std::invalid_argument("GameConfig: requires at least 3 players");
  if (k() < 2) throw std::invalid_argument("GameConfig: requires at least 2 words");
  std::unordered_set<std::string> seen(words.begin(), words.end());
  if (static_cast<int>(seen.size()) != k())
    throw std::invalid_argument("GameConfig: words must be distinct");
  if (amb_block) {
    if (*amb_block < 1) throw std::invalid_argument("GameConfig: amb_block must be positive");
    if (k() != *amb_block * (n_players + 1))
      throw std::invalid_argument("GameConfig: amb_block requires K = l * (N + 1)");
  }
}

GameConfig GameConfig::generic(int n_players, int k, std::optional<int> amb_block,
                               std::uint64_t seed) {
  GameConfig config;
  config.n_players = n_players;
  config.words.reserve(k);
  for (int i = 1; i <= k; ++i) {
    std::string name = "w";
    if (i < 10) name += '0';
    name += std::to_string(i);
    config.words.push_back(std::move(name));
  }
  config.category = "generic";
  config.amb_block = amb_block;
  config.seed = seed;
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------
// Outcome and JSON

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::NonChameleonsWin: return "non_chameleons_win";
    case Outcome::ChameleonWinsMisidentified: return "chameleon_wins_misidentified";
    case Outcome::ChameleonWinsSecondChance: return "chameleon_wins_second_chance";
  }
  throw std::logic_error("unknown outcome");
}

Outcome outcome_from_string(const std::string& name) {
  if (name == "non_chameleons_win") return Outcome::NonChameleonsWin;
  if (name == "chameleon_wins_misidentified") return Outcome::ChameleonWinsMisidentified;
  if (name == "chameleon_wins_second_chance") return Outcome::ChameleonWinsSecondChance;
  throw std::invalid_argument("unknown outcome: " + name);
}

nlohmann::json config_to_json(const GameConfig& config) {
  nlohmann::json j{{"n_players", config.n_players},
                   {"words", config.words},
                   {"category", config.category},
                   {"seed", config.seed}};
  if (config.amb_block)
    j["amb_block"] = *config.amb_block;
  else
    j["amb_block"] = nullptr;
  return j;
}

GameConfig config_from_json(const nlohmann::json& j) {
  GameConfig config;
  config.n_players = j.at("n_players").get<int>();
  config.words = j.at("words").get<std::vector<std::string>>();
  config.category = j.value("category", std::string{});
  if (j.contains("amb_block") && !j.at("amb_block").is_null())
    config.amb_block = j.at("amb_block").get<int>();
  config.seed = j.value("seed", std::uint64_t{0});
  config.validate();
  return config;
}

namespace {

nlohmann::json response_to_json(const Response& r) {
  switch (r.kind()) {
    case Response::Kind::Null: return nullptr;
    case Response::Kind::Symbol: return nlohmann::json{{"symbol", r.symbol_index() + 1}};
    case Response::Kind::WordSubset: {
      std::vector<int> indices = r.words().to_indices();
      for (int& w : indices) ++w;  // 1-based externally
      return nlohmann::json{{"word_set", indices}};
    }
  }
  throw std::logic_error("unknown response kind");
}

Response response_from_json(const nlohmann::json& j, int k) {
  if (j.is_null()) return Response::null();
  if (j.contains("symbol")) return Response::symbol(j.at("symbol").get<int>() - 1);
  if (j.contains("word_set")) {
    WordSet set(k);
    for (int w : j.at("word_set").get<std::vector<int>>()) set.insert(w - 1);
    return Response::word_subset(std::move(set));
  }
  throw std::invalid_argument("malformed response JSON");
}

}  // namespace

nlohmann::json transcript_to_json(const GameTranscript& transcript) {
  nlohmann::json responses = nlohmann::json::array();
  for (const Response& r : transcript.responses) responses.push_back(response_to_json(r));
  std::vector<int> votes = transcript.votes;
  for (int& v : votes) ++v;
  nlohmann::json j{{"config", config_to_json(transcript.config)},
                   {"roles",
                    {{"chameleon", transcript.roles.chameleon + 1},
                     {"secret", transcript.roles.secret + 1}}},
                   {"responses", responses},
                   {"votes", votes},
                   {"identified", transcript.identified + 1},
                   {"second_guess",
                    transcript.second_guess ? nlohmann::json(*transcript.second_guess + 1)
                                            : nlohmann::json(nullptr)},
                   {"outcome", to_string(transcript.outcome)}};
  if (!transcript.response_labels.empty()) j["response_labels"] = transcript.response_labels;
  return j;
}

GameTranscript transcript_from_json(const nlohmann::json& j) {
  GameTranscript t;
  t.config = config_from_json(j.at("config"));
  t.roles.chameleon = j.at("roles").at("chameleon").get<int>() - 1;
  t.roles.secret = j.at("roles").at("secret").get<int>() - 1;
  for (const auto& rj : j.at("responses")) t.responses.push_back(response_from_json(rj, t.config.k()));
  t.votes = j.at("votes").get<std::vector<int>>();
  for (int& v : t.votes) --v;
  t.identified = j.at("identified").get<int>() - 1;
  if (!j.at("second_guess").is_null()) t.second_guess = j.at("second_guess").get<int>() - 1;
  t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  if (j.contains("response_labels"))
    t.response_labels = j.at("response_labels").get<std::vector<std::string>>();
  return t;
}

// ---------------------------------------------------------------------------
// Engine

RoleAssignment assign_roles(const GameConfig& config, Rng& rng) {
  config.validate();
  RoleAssignment roles;
  roles.chameleon = static_cast<int>(rng.next_below(config.n_players));
  roles.secret = static_cast<int>(rng.next_below(config.k()));
  return roles;
}

int resolve_votes(std::span<const int> votes, Rng& rng) {
  if (votes.empty()) throw std::invalid_argument("resolve_votes: empty vote list");
  const int n = static_cast<int>(votes.size());
  std::vector<int> counts(n, 0);
  for (int v : votes) {
    if (v < 0 || v >= n) throw std::invalid_argument("resolve_votes: vote out of range");
    ++counts[v];
  }
  const int top = *std::max_element(counts.begin(), counts.end());
  std::vector<int> tied;
  for (int p = 0; p < n; ++p)
    if (counts[p] == top) tied.push_back(p);
  if (tied.size() == 1) return tied.front();
  return tied[rng.next_below(tied.size())];
}

namespace {

void validate_response(const Response& r, const ResponseSpace& space, int k, int player) {
  switch (r.kind()) {
    case Response::Kind::Null:
      if (space.kind != ResponseSpace::Kind::WordSubsets)
        throw InvalidResponseError(player, "null response outside a word-subset game");
      return;
    case Response::Kind::Symbol:
      if (space.kind != ResponseSpace::Kind::SymbolAlphabet)
        throw InvalidResponseError(player, "symbol response in a word-subset game");
      if (r.symbol_index() >= space.alphabet_size)
        throw InvalidResponseError(player, "symbol outside the response alphabet");
      return;
    case Response::Kind::WordSubset:
      if (space.kind != ResponseSpace::Kind::WordSubsets)
        throw InvalidResponseError(player, "word-subset response in a symbol game");
      if (r.words().universe() != k)
        throw InvalidResponseError(player, "word subset over the wrong universe");
      return;
  }
}

}  // namespace

GameTranscript run_game(const GameConfig& config, const NonChameleonStrategy& non_strategy,
                        const ChameleonStrategy& ch_strategy, Rng& rng) {
  config.validate();
  const int n = config.n_players;
  const int k = config.k();
  const ResponseSpace space = non_strategy.response_space(config);

  GameTranscript t;
  t.config = config;
  t.roles = assign_roles(config, rng);

  t.responses.reserve(n);
  for (int turn = 0; turn < n; ++turn) {
    std::span<const Response> prior(t.responses.data(), t.responses.size());
    Response r = (turn == t.roles.chameleon)
                     ? ch_strategy.respond({n, k, turn, prior}, rng)
                     : non_strategy.respond({n, k, turn, t.roles.secret, prior}, rng);
    validate_response(r, space, k, turn);
    t.responses.push_back(std::move(r));
  }

  std::span<const Response> all(t.responses.data(), t.responses.size());
  t.votes.reserve(n);
  for (int p = 0; p < n; ++p) {
    const int v = (p == t.roles.chameleon)
                      ? ch_strategy.vote({n, k, p, all}, rng)
                      : non_strategy.vote({n, k, p, t.roles.secret, all}, rng);
    if (v < 0 || v >= n) throw InvalidResponseError(p, "vote out of range");
    t.votes.push_back(v);
  }

  t.identified = resolve_votes(t.votes, rng);
  if (t.identified == t.roles.chameleon) {
    const int guess = ch_strategy.guess_secret({n, k, t.roles.chameleon, all}, rng);
    if (guess < 0 || guess >= k)
      throw InvalidResponseError(t.roles.chameleon, "secret guess out of range");
    t.second_guess = guess;
    t.outcome = (guess == t.roles.secret) ? Outcome::ChameleonWinsSecondChance
                                          : Outcome::NonChameleonsWin;
  } else {
    t.outcome = Outcome::ChameleonWinsMisidentified;
  }
  return t;
}

}  // namespace chameleon
