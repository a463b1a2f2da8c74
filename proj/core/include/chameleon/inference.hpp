#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chameleon/prob.hpp"
#include "chameleon/strategies.hpp"

namespace chameleon {

/// Conditional response likelihoods Pr(r | w). Rows need not be normalized:
/// count-derived tables store joint/marginal ratios and normalization happens
/// in the posterior.
class LikelihoodTable {
 public:
  LikelihoodTable(std::vector<std::vector<double>> values, std::vector<std::string> word_labels,
                  std::vector<std::string> response_labels);

  static LikelihoodTable from_strategy(const StationaryStrategy& strategy);

  /// CSV rows: word,response,joint_count,word_count (header required).
  static LikelihoodTable from_counts_csv(std::istream& in);

  int n_words() const { return static_cast<int>(values_.size()); }
  int n_responses() const { return static_cast<int>(values_.front().size()); }
  double likelihood(int word, int response) const;
  const std::vector<std::string>& word_labels() const { return word_labels_; }
  const std::vector<std::string>& response_labels() const { return response_labels_; }
  std::optional<int> response_index(const std::string& label) const;
  std::optional<int> word_index(const std::string& label) const;

 private:
  std::vector<std::vector<double>> values_;  // [word][response]
  std::vector<std::string> word_labels_;
  std::vector<std::string> response_labels_;
};

struct Posterior {
  ProbVector dist;
  int observations = 0;
  /// True when every candidate had zero joint likelihood and the posterior
  /// fell back to a uniform distribution.
  bool degenerate = false;
};

/// prior(w) * prod_i Pr(r_i | w), normalized. Unknown response index throws.
Posterior posterior(const LikelihoodTable& table, std::span<const int> responses,
                    const ProbVector& prior);

/// Argmax with lowest-index tie-break.
int map_estimate(const Posterior& posterior);

/// 1-based rank of `secret` when words are sorted by decreasing posterior
/// probability (ties resolved toward lower indices).
int secret_rank(const Posterior& posterior, int secret);

/// Total mass of the k most likely words.
double top_k_mass(const Posterior& posterior, int k);

/// One point of the posterior-analytics curves: statistics of the posterior
/// after the first m honest responses, averaged over simulated histories.
struct AnalyzeRow {
  int m = 0;
  double mean_entropy_bits = 0.0;
  std::vector<double> secret_in_top_k;  // index k-1: P(rank(secret) <= k)
};

/// Simulates `trials` honest histories (secret uniform, responses iid from
/// the strategy row) and evaluates the posterior under `table` after each
/// prefix m = 0..max_m. Each trial draws its stream from
/// derive_stream_seed(base_seed, trial).
std::vector<AnalyzeRow> analyze_curves(const StationaryStrategy& strategy,
                                       const LikelihoodTable& table, int max_m, long trials,
                                       std::uint64_t base_seed);

std::string analyze_rows_to_csv(const std::vector<AnalyzeRow>& rows);

}  // namespace chameleon
