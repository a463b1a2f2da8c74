#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chameleon {

/// Probability distribution over a finite support: nonnegative entries
/// summing to 1 within 1e-12.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> values);

  static ProbVector uniform(std::size_t n);
  static ProbVector point_mass(std::size_t n, std::size_t at);
  /// Normalizes nonnegative weights with a positive total.
  static ProbVector normalized(std::vector<double> weights);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  bool operator==(const ProbVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Probabilities of the three comparison bins of a response-space partition.
struct BinTriple {
  double p_gt = 0.0;
  double p_eq = 0.0;
  double p_lt = 0.0;
};

/// Indices where d_i(r) > d_j(r), = , < respectively. Disjoint and exhaustive.
struct ResponsePartition {
  std::vector<std::size_t> gt;
  std::vector<std::size_t> eq;
  std::vector<std::size_t> lt;
};

/// KL(p || q) in nats, with 0 ln(0/q) = 0. Returns +inf when q(x) = 0 < p(x).
double kl_divergence(const ProbVector& p, const ProbVector& q);

/// Sum of |p - q|.
double l1_distance(const ProbVector& p, const ProbVector& q);

/// Total variation distance, exactly l1_distance / 2.
double tv_distance(const ProbVector& p, const ProbVector& q);

/// Shannon entropy in bits.
double entropy_bits(const ProbVector& p);

/// Exact comparison of stored values; no epsilon.
ResponsePartition partition_responses(const ProbVector& d_i, const ProbVector& d_j);

/// Mass of d over each partition bin.
BinTriple bin_probs(const ProbVector& d, const ResponsePartition& partition);

/// max over the 8 subsets A of the three bins of min(sum(A), 1 - sum(A)).
/// Result lies in [0, 1/2].
double theta(const BinTriple& bins);

/// 1/(1-2t) * ln((1-t)/t) for t in (0, 1/2); limit 2 at t = 1/2; +inf at t = 0.
double varphi(double theta_value);

}  // namespace chameleon
