#include "chameleon/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chameleon {

namespace {

void check_nk(int n, int k) {
  if (n < 3) throw std::invalid_argument("bounds: N must be at least 3");
  if (k < 1) throw std::invalid_argument("bounds: K must be at least 1");
}

void check_alpha(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("bounds: alpha must be nonnegative");
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double trivial_win_rate(int n, int k) {
  check_nk(n, k);
  return static_cast<double>(k - 1) / (static_cast<double>(n) * k);
}

double prop1_bound_raw(int n, int k, double alpha) {
  check_nk(n, k);
  check_alpha(alpha);
  const double nn = n;
  return 1.0 / nn + (nn - 1.0) / (nn * nn) * std::sqrt((k - 1.0) * alpha / k);
}

double prop1_bound(int n, int k, double alpha) { return clamp01(prop1_bound_raw(n, k, alpha)); }

double prop2_bound_raw(int n, int k, double alpha) {
  check_nk(n, k);
  check_alpha(alpha);
  const double kk = k;
  return 1.0 / kk + (kk - 1.0) / kk * std::sqrt((n - 1.0) * alpha);
}

double prop2_bound(int n, int k, double alpha) { return clamp01(prop2_bound_raw(n, k, alpha)); }

double prop3_bound_raw(int n, int k, double alpha, double phi) {
  check_nk(n, k);
  check_alpha(alpha);
  if (!(phi > 0.0)) throw std::invalid_argument("bounds: phi must be positive");
  if (std::isinf(phi)) return 0.0;
  return 6.0 * (k - 1.0) * std::exp(-(n - 1.0) * alpha * phi / 2.0);
}

double prop3_bound(int n, int k, double alpha, double phi) {
  return clamp01(prop3_bound_raw(n, k, alpha, phi));
}

double prop3_bound_simplified_raw(int n, int k, double alpha) {
  check_nk(n, k);
  if (alpha < 1.0)
    throw std::invalid_argument("prop3_bound_simplified: requires alpha >= 1");
  if (alpha == 1.0) return prop3_bound_raw(n, k, alpha, 2.0);  // removable singularity
  return 6.0 * (k - 1.0) *
         std::pow((2.0 - alpha) / alpha, (n - 1.0) * alpha / (2.0 * alpha - 2.0));
}

double prop3_bound_simplified(int n, int k, double alpha) {
  return clamp01(prop3_bound_simplified_raw(n, k, alpha));
}

double prop4_bound(int n, int l) {
  if (n < 3) throw std::invalid_argument("prop4_bound: N must be at least 3");
  if (l < 1) throw std::invalid_argument("prop4_bound: l must be at least 1");
  return (std::log(n + 1.0) + 0.4) / n * (l - 1.0) / l;
}

double amb_exact_win(int n, int l) {
  if (n < 3) throw std::invalid_argument("amb_exact_win: N must be at least 3");
  if (l < 1) throw std::invalid_argument("amb_exact_win: l must be at least 1");
  const double nn = n;
  const double frac = (l - 1.0) / l;
  double total = (1.0 / nn) * (nn / (nn + 1.0)) * frac;
  for (int i = 1; i <= n; ++i) total += (1.0 / nn) * (1.0 / (nn + 2.0 - i)) * frac;
  return total;
}

}  // namespace chameleon
