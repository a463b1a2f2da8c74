#include "chameleon/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace chameleon {

namespace {

constexpr double kSumTolerance = 1e-12;

void require_same_support(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("probability vectors have mismatched supports");
}

}  // namespace

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("ProbVector: empty support");
  double sum = 0.0;
  for (double v : values_) {
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("ProbVector: entries must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("ProbVector: entries must sum to 1");
}

ProbVector ProbVector::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ProbVector::uniform: empty support");
  return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw std::invalid_argument("ProbVector::point_mass: index out of range");
  std::vector<double> v(n, 0.0);
  v[at] = 1.0;
  return ProbVector(std::move(v));
}

ProbVector ProbVector::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("ProbVector::normalized: negative or non-finite weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("ProbVector::normalized: zero total");
  for (double& w : weights) w /= total;
  return ProbVector(std::move(weights));
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
  require_same_support(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

double l1_distance(const ProbVector& p, const ProbVector& q) {
  require_same_support(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return sum;
}

double tv_distance(const ProbVector& p, const ProbVector& q) {
  return l1_distance(p, q) / 2.0;
}

double entropy_bits(const ProbVector& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) sum -= p[i] * std::log2(p[i]);
  return sum;
}

ResponsePartition partition_responses(const ProbVector& d_i, const ProbVector& d_j) {
  require_same_support(d_i, d_j);
  ResponsePartition out;
  for (std::size_t r = 0; r < d_i.size(); ++r) {
    if (d_i[r] > d_j[r])
      out.gt.push_back(r);
    else if (d_i[r] < d_j[r])
      out.lt.push_back(r);
    else
      out.eq.push_back(r);
  }
  return out;
}

BinTriple bin_probs(const ProbVector& d, const ResponsePartition& partition) {
  BinTriple bins;
  for (std::size_t r : partition.gt) bins.p_gt += d[r];
  for (std::size_t r : partition.eq) bins.p_eq += d[r];
  for (std::size_t r : partition.lt) bins.p_lt += d[r];
  return bins;
}

double theta(const BinTriple& bins) {
  const double b[3] = {bins.p_gt, bins.p_eq, bins.p_lt};
  double best = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) sum += b[i];
    best = std::max(best, std::min(sum, 1.0 - sum));
  }
  return best;
}

double varphi(double theta_value) {
  if (theta_value < 0.0 || theta_value > 0.5)
    throw std::invalid_argument("varphi: theta must lie in [0, 1/2]");
  if (theta_value == 0.0) return std::numeric_limits<double>::infinity();
  const double delta = 1.0 - 2.0 * theta_value;
  // Series around theta = 1/2: 2 (1 + delta^2/3 + delta^4/5 + ...).
  if (delta < 1e-4) return 2.0 * (1.0 + delta * delta / 3.0);
  return std::log((1.0 - theta_value) / theta_value) / delta;
}

}  // namespace chameleon
