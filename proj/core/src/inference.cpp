#include "chameleon/inference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chameleon {

LikelihoodTable::LikelihoodTable(std::vector<std::vector<double>> values,
                                 std::vector<std::string> word_labels,
                                 std::vector<std::string> response_labels)
    : values_(std::move(values)),
      word_labels_(std::move(word_labels)),
      response_labels_(std::move(response_labels)) {
  if (values_.empty() || values_.front().empty())
    throw std::invalid_argument("LikelihoodTable: empty table");
  for (const auto& row : values_) {
    if (row.size() != values_.front().size())
      throw std::invalid_argument("LikelihoodTable: ragged rows");
    for (double v : row)
      if (v < 0.0 || !std::isfinite(v))
        throw std::invalid_argument("LikelihoodTable: likelihoods must be finite and nonnegative");
  }
  if (word_labels_.size() != values_.size() ||
      response_labels_.size() != values_.front().size())
    throw std::invalid_argument("LikelihoodTable: label count mismatch");
}

LikelihoodTable LikelihoodTable::from_strategy(const StationaryStrategy& strategy) {
  std::vector<std::vector<double>> values;
  values.reserve(strategy.n_words());
  for (int w = 0; w < strategy.n_words(); ++w) {
    const auto row = strategy.row(w).values();
    values.emplace_back(row.begin(), row.end());
  }
  std::vector<std::string> words, responses;
  for (int w = 0; w < strategy.n_words(); ++w) words.push_back("w" + std::to_string(w + 1));
  if (strategy.alphabet_labels().empty()) {
    for (int r = 0; r < strategy.alphabet_size(); ++r) responses.push_back("s" + std::to_string(r + 1));
  } else {
    responses = strategy.alphabet_labels();
  }
  return LikelihoodTable(std::move(values), std::move(words), std::move(responses));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

LikelihoodTable LikelihoodTable::from_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("count CSV: empty file");
  const auto header = split_csv_line(line);
  if (header.size() != 4 || header[0] != "word" || header[1] != "response" ||
      header[2] != "joint_count" || header[3] != "word_count")
    throw std::invalid_argument("count CSV: expected header word,response,joint_count,word_count");

  // Preserve first-appearance order of labels.
  std::vector<std::string> words, responses;
  std::map<std::string, int> word_of, response_of;
  struct Entry {
    int word, response;
    double ratio;
  };
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) throw std::invalid_argument("count CSV: malformed row: " + line);
    const auto intern = [](const std::string& label, std::vector<std::string>& labels,
                           std::map<std::string, int>& index) {
      auto [it, inserted] = index.try_emplace(label, static_cast<int>(labels.size()));
      if (inserted) labels.push_back(label);
      return it->second;
    };
    const int w = intern(fields[0], words, word_of);
    const int r = intern(fields[1], responses, response_of);
    const double joint = std::stod(fields[2]);
    const double marginal = std::stod(fields[3]);
    if (joint < 0.0 || marginal <= 0.0)
      throw std::invalid_argument("count CSV: counts must be nonnegative with word_count > 0");
    entries.push_back({w, r, joint / marginal});
  }
  if (entries.empty()) throw std::invalid_argument("count CSV: no data rows");

  std::vector<std::vector<double>> values(words.size(), std::vector<double>(responses.size(), 0.0));
  for (const Entry& e : entries) values[e.word][e.response] = e.ratio;
  return LikelihoodTable(std::move(values), std::move(words), std::move(responses));
}

double LikelihoodTable::likelihood(int word, int response) const {
  if (word < 0 || word >= n_words()) throw std::out_of_range("LikelihoodTable: word out of range");
  if (response < 0 || response >= n_responses())
    throw std::out_of_range("LikelihoodTable: response out of range");
  return values_[word][response];
}

std::optional<int> LikelihoodTable::response_index(const std::string& label) const {
  const auto it = std::find(response_labels_.begin(), response_labels_.end(), label);
  if (it == response_labels_.end()) return std::nullopt;
  return static_cast<int>(it - response_labels_.begin());
}

std::optional<int> LikelihoodTable::word_index(const std::string& label) const {
  const auto it = std::find(word_labels_.begin(), word_labels_.end(), label);
  if (it == word_labels_.end()) return std::nullopt;
  return static_cast<int>(it - word_labels_.begin());
}

Posterior posterior(const LikelihoodTable& table, std::span<const int> responses,
                    const ProbVector& prior) {
  if (static_cast<int>(prior.size()) != table.n_words())
    throw std::invalid_argument("posterior: prior size != word count");
  std::vector<double> scores(prior.values().begin(), prior.values().end());
  for (int r : responses) {
    if (r < 0 || r >= table.n_responses())
      throw std::invalid_argument("posterior: unknown response symbol");
    for (int w = 0; w < table.n_words(); ++w) scores[w] *= table.likelihood(w, r);
  }
  double total = 0.0;
  for (double s : scores) total += s;
  Posterior out{ProbVector::uniform(prior.size()), static_cast<int>(responses.size()), true};
  if (total > 0.0) {
    out.dist = ProbVector::normalized(std::move(scores));
    out.degenerate = false;
  }
  return out;
}

int map_estimate(const Posterior& posterior) {
  const auto values = posterior.dist.values();
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

int secret_rank(const Posterior& posterior, int secret) {
  if (secret < 0 || secret >= static_cast<int>(posterior.dist.size()))
    throw std::out_of_range("secret_rank: secret out of range");
  const double p = posterior.dist[secret];
  int rank = 1;
  for (int w = 0; w < static_cast<int>(posterior.dist.size()); ++w) {
    if (posterior.dist[w] > p || (posterior.dist[w] == p && w < secret)) ++rank;
  }
  return rank;
}

double top_k_mass(const Posterior& posterior, int k) {
  if (k < 0) throw std::invalid_argument("top_k_mass: k must be nonnegative");
  std::vector<double> values(posterior.dist.values().begin(), posterior.dist.values().end());
  std::sort(values.begin(), values.end(), std::greater<>());
  double mass = 0.0;
  for (int i = 0; i < std::min<int>(k, static_cast<int>(values.size())); ++i) mass += values[i];
  return mass;
}

std::vector<AnalyzeRow> analyze_curves(const StationaryStrategy& strategy,
                                       const LikelihoodTable& table, int max_m, long trials,
                                       std::uint64_t base_seed) {
  if (max_m < 0) throw std::invalid_argument("analyze_curves: max_m must be nonnegative");
  if (trials < 1) throw std::invalid_argument("analyze_curves: trials must be at least 1");
  if (table.n_words() != strategy.n_words())
    throw std::invalid_argument("analyze_curves: table and strategy word counts differ");
  if (table.n_responses() < strategy.alphabet_size())
    throw std::invalid_argument("analyze_curves: table is missing response symbols");

  const int k = strategy.n_words();
  std::vector<AnalyzeRow> rows(max_m + 1);
  for (int m = 0; m <= max_m; ++m) {
    rows[m].m = m;
    rows[m].secret_in_top_k.assign(k, 0.0);
  }
  const ProbVector prior = ProbVector::uniform(k);

  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(derive_stream_seed(base_seed, static_cast<std::uint64_t>(trial)));
    const int secret = static_cast<int>(rng.next_below(k));
    std::vector<int> responses;
    responses.reserve(max_m);
    for (int m = 0; m <= max_m; ++m) {
      const Posterior post = posterior(table, responses, prior);
      rows[m].mean_entropy_bits += entropy_bits(post.dist);
      const int rank = secret_rank(post, secret);
      for (int top = rank; top <= k; ++top) rows[m].secret_in_top_k[top - 1] += 1.0;
      if (m < max_m)
        responses.push_back(static_cast<int>(rng.categorical(strategy.row(secret).values())));
    }
  }
  for (AnalyzeRow& row : rows) {
    row.mean_entropy_bits /= static_cast<double>(trials);
    for (double& hit : row.secret_in_top_k) hit /= static_cast<double>(trials);
  }
  return rows;
}

std::string analyze_rows_to_csv(const std::vector<AnalyzeRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("analyze_rows_to_csv: no rows");
  std::ostringstream out;
  out << "m,mean_entropy_bits";
  for (std::size_t k = 1; k <= rows.front().secret_in_top_k.size(); ++k)
    out << ",secret_in_top_" << k;
  out << '\n';
  out.precision(10);
  for (const AnalyzeRow& row : rows) {
    out << row.m << ',' << row.mean_entropy_bits;
    for (double hit : row.secret_in_top_k) out << ',' << hit;
    out << '\n';
  }
  return out.str();
}

}  // namespace chameleon
