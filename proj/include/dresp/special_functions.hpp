#pragma once

namespace dresp {

// log of the Beta function B(a, b); a, b > 0.
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), x in [0, 1]. Continued fraction with
// log-Gamma normalization; absolute error under 1e-13 for a, b in [0.01, 100].
double regularized_incomplete_beta(double a, double b, double x);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace dresp
