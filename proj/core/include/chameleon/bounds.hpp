#pragma once

namespace chameleon {

/// Win rate of the constant-response baseline: (K - 1) / (N K).
double trivial_win_rate(int n, int k);

/// Upper bound on the non-chameleon win probability against the mixture
/// chameleon when the strategy is alpha-KL pairwise concealing:
/// 1/N + (N-1)/N^2 * sqrt((K-1) alpha / K). The *_raw variants skip the
/// [0, 1] clamp.
double prop1_bound(int n, int k, double alpha);
double prop1_bound_raw(int n, int k, double alpha);

/// Upper bound on any estimator's secret-guess rate from non-chameleon
/// responses under an alpha-KL concealing strategy:
/// 1/K + (K-1)/K * sqrt((N-1) alpha).
double prop2_bound(int n, int k, double alpha);
double prop2_bound_raw(int n, int k, double alpha);

/// Upper bound on the non-chameleon win probability under an alpha-L1
/// revealing strategy: 6 (K-1) exp(-(N-1) alpha phi / 2). phi = +inf gives 0.
double prop3_bound(int n, int k, double alpha, double phi);
double prop3_bound_raw(int n, int k, double alpha, double phi);

/// Alpha-only form valid for alpha >= 1:
/// 6 (K-1) ((2 - alpha)/alpha)^((N-1) alpha / (2 alpha - 2)); the alpha = 1
/// singularity is removable and delegates to the general form at phi = 2.
double prop3_bound_simplified(int n, int k, double alpha);
double prop3_bound_simplified_raw(int n, int k, double alpha);

/// Lower bound on the non-chameleon win probability under the
/// ambiguity-preserving strategy: ((ln(N+1) + 0.4) / N) * ((l-1)/l).
double prop4_bound(int n, int l);

/// Exact win probability of the ambiguity-preserving strategy against the
/// best-response chameleon:
/// (1/N)(N/(N+1))((l-1)/l) + sum_i (1/N)(1/(N+2-i))((l-1)/l).
double amb_exact_win(int n, int l);

}  // namespace chameleon
