#pragma once

namespace gabm::dist {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF, p in (0,1).
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double x, double a, double b);

// Student-t CDF. df > 0. Absolute error below 1e-10.
double t_cdf(double x, double df);

// F CDF. df1, df2 > 0, x >= 0 (negative x returns 0). Error below 1e-10.
double f_cdf(double x, double df1, double df2);

// CDF of the range of k iid standard normals.
double normal_range_cdf(double w, int k);

// Studentized range CDF: P(Q <= q) for k groups and df error degrees of
// freedom, by Gauss-Legendre double integration. df may be infinite.
// Absolute error well below 1e-4 over the tested domain.
double studentized_range_cdf(double q, int k, double df);

}  // namespace gabm::dist
