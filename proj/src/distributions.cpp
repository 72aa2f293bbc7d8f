#include "gabm/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gabm::dist {
namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887;
constexpr double kSqrt2Pi = 2.5066282746310005024157653;

// 20-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric halves).
constexpr int kGl = 20;
constexpr double kGlX[kGl / 2] = {
    0.0765265211334973337546404, 0.2277858511416450780804962,
    0.3737060887154195606725482, 0.5108670019508270980043641,
    0.6360536807265150254528367, 0.7463319064601507926143051,
    0.8391169718222188233945291, 0.9122344282513259058677524,
    0.9639719272779137912676661, 0.9931285991850949247861224};
constexpr double kGlW[kGl / 2] = {
    0.1527533871307258506980843, 0.1491729864726037467878287,
    0.1420961093183820513292983, 0.1316886384491766268984945,
    0.1181945319615184173123774, 0.1019301198172404350367501,
    0.0832767415767047487247581, 0.0626720483341090635695065,
    0.0406014298003869413310400, 0.0176140071391521183118620};

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

// Lentz-style continued fraction for the incomplete beta
// (Numerical Recipes betacf).
double incbeta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double eps = 1e-16;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

// Integrate f over [a, b] with one 20-point Gauss-Legendre panel.
template <typename F>
double gl_panel(F&& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kGl / 2; ++i) {
    sum += kGlW[i] * (f(mid - half * kGlX[i]) + f(mid + half * kGlX[i]));
  }
  return half * sum;
}

template <typename F>
double gl_panels(F&& f, double a, double b, int n) {
  double h = (b - a) / n, total = 0.0;
  for (int i = 0; i < n; ++i) total += gl_panel(f, a + i * h, a + (i + 1) * h);
  return total;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = normal_cdf(x) - p;
  double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incbeta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta) *
                   incbeta_cf(1.0 - x, b, a) / b;
}

double t_cdf(double x, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("t_cdf: df must be > 0");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  double ib = regularized_incomplete_beta(df / (df + x * x), 0.5 * df, 0.5);
  return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double f_cdf(double x, double df1, double df2) {
  if (!(df1 > 0.0 && df2 > 0.0))
    throw std::invalid_argument("f_cdf: df1, df2 must be > 0");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return regularized_incomplete_beta(df1 * x / (df1 * x + df2), 0.5 * df1,
                                     0.5 * df2);
}

double normal_range_cdf(double w, int k) {
  if (k < 2) throw std::invalid_argument("normal_range_cdf: k must be >= 2");
  if (w <= 0.0) return 0.0;
  // P(W <= w) = k * int phi(u) [Phi(u+w) - Phi(u)]^(k-1) du, u the minimum.
  auto f = [w, k](double u) {
    double p = normal_cdf(u + w) - normal_cdf(u);
    return normal_pdf(u) * std::pow(p, k - 1);
  };
  double v = k * gl_panels(f, -8.5, 8.5, 34);
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw std::invalid_argument("studentized_range_cdf: k must be >= 2");
  if (!(df > 0.0)) throw std::invalid_argument("studentized_range_cdf: df must be > 0");
  if (q < 0.0) throw std::invalid_argument("studentized_range_cdf: q must be >= 0");
  if (q == 0.0) return 0.0;
  if (std::isinf(df) || df > 1e8) return normal_range_cdf(q, k);

  // Outer integral over s where S = sqrt(chi2_df / df); log density keeps
  // the huge-df normalization finite.
  const double logc =
      0.5 * df * std::log(df) - (0.5 * df - 1.0) * std::log(2.0) - std::lgamma(0.5 * df);
  auto s_density = [&](double s) {
    return std::exp(logc + (df - 1.0) * std::log(s) - 0.5 * df * s * s);
  };
  double mode = df > 1.0 ? std::sqrt((df - 1.0) / df) : 0.5;
  double sig = 1.0 / std::sqrt(2.0 * df);
  double lo, hi;
  if (df >= 4.0) {
    lo = std::max(1e-10, mode - 12.0 * sig);
    hi = mode + 12.0 * sig;
  } else {
    lo = 1e-10;
    hi = mode + 14.0;
  }
  auto f = [&](double s) { return s_density(s) * normal_range_cdf(q * s, k); };
  double v = gl_panels(f, lo, hi, 48);
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

}  // namespace gabm::dist
