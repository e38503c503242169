#include "bandlab/chebyshev.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bandlab/constants.hpp"

namespace bandlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxOrder = 4'000'000;
constexpr double kMaxArgument = 1e6;
constexpr double kRescale = 1e250;
constexpr double kInvRescale = 1e-250;

}  // namespace

int truncation_index(double t) {
  double ta = std::abs(t);
  return static_cast<int>(std::ceil(constants::kTruncLinear * ta +
                                    constants::kTruncCubeRoot * std::cbrt(ta) +
                                    constants::kTruncConstant));
}

std::vector<double> bessel_j_table(int kmax, double t) {
  if (kmax < 0) throw std::invalid_argument("bessel_j: order must be nonnegative");
  if (t < 0.0) throw std::invalid_argument("bessel_j: argument must be nonnegative");
  if (kmax > kMaxOrder || t > kMaxArgument)
    throw std::invalid_argument("bessel_j: order or argument outside supported range");

  std::vector<double> out(kmax + 1, 0.0);
  if (t == 0.0) {
    out[0] = 1.0;
    return out;
  }

  // Start the downward recurrence far enough past max(kmax, t) that the
  // contamination from the dominant (Y) solution has decayed below 1e-18.
  int n_eff = std::max(kmax, static_cast<int>(std::ceil(t)));
  int start = n_eff + static_cast<int>(std::ceil(9.0 * std::cbrt(t))) + 40;

  // Values grow enormously on the way down; carry a rescale count per index
  // so the full dynamic range survives.
  std::vector<double> val(start + 2, 0.0);
  std::vector<int> scale(start + 2, 0);
  double hi = 0.0;          // J~_{k+1}
  double lo = 1e-160;       // J~_k (arbitrary small seed)
  int rescales = 0;
  val[start + 1] = hi;
  scale[start + 1] = 0;
  val[start] = lo;
  scale[start] = 0;
  for (int k = start; k >= 1; --k) {
    double next = (2.0 * k / t) * lo - hi;
    hi = lo;
    lo = next;
    if (std::abs(lo) > kRescale) {
      lo *= kInvRescale;
      hi *= kInvRescale;
      ++rescales;
    }
    val[k - 1] = lo;
    scale[k - 1] = rescales;
  }

  // Normalization: J_0 + 2 sum_{k>=1} J_{2k} = 1.  Terms rescaled earlier
  // than the final count are suppressed by powers of 1e250 and vanish.
  double norm = 0.0;
  for (int k = 0; k <= start; k += 2) {
    double w = (k == 0) ? 1.0 : 2.0;
    double term = val[k];
    for (int s = scale[k]; s < rescales; ++s) term *= kInvRescale;
    norm += w * term;
  }
  if (norm == 0.0) throw std::runtime_error("bessel_j: normalization sum vanished");

  for (int k = 0; k <= kmax; ++k) {
    double term = val[k];
    for (int s = scale[k]; s < rescales; ++s) term *= kInvRescale;
    out[k] = term / norm;
  }
  return out;
}

double bessel_j(int k, double t) { return bessel_j_table(k, t)[k]; }

namespace {

Complex i_pow_neg(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

Complex alpha(int k, double t) {
  if (k < 0) throw std::invalid_argument("alpha: index must be nonnegative");
  if (t == 0.0) return k == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  double j = bessel_j(k + 1, t);
  return i_pow_neg(k) * (2.0 * (k + 1) / t * j);
}

double ChebCoefficients::abs_tail_from(int n) const {
  double tail = 0.0;
  for (int k = n + 1; k < static_cast<int>(alphas.size()); ++k) tail += std::abs(alphas[k]);
  return tail;
}

ChebCoefficients alpha_table(double t, int kmax) {
  ChebCoefficients table;
  table.t = t;
  table.K = kmax;
  table.alphas.resize(kmax + 1);
  if (t == 0.0) {
    table.alphas.assign(kmax + 1, Complex(0.0));
    table.alphas[0] = 1.0;
    table.tail_bound = 0.0;
    return table;
  }
  std::vector<double> j = bessel_j_table(kmax + 1, t);
  double mass = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    table.alphas[k] = i_pow_neg(k) * (2.0 * (k + 1) / t * j[k + 1]);
    mass += std::norm(table.alphas[k]);
  }
  table.tail_bound = std::max(0.0, 1.0 - mass);
  return table;
}

ChebCoefficients alpha_table(double t) { return alpha_table(t, truncation_index(t)); }

Complex a_coeff(int m, double t, int M, double tol) {
  if (M < 2) throw std::invalid_argument("a_coeff: degenerate band, need M >= 2");
  if (m < 0) throw std::invalid_argument("a_coeff: index must be nonnegative");
  if (tol <= 0.0) throw std::invalid_argument("a_coeff: tolerance must be positive");
  ACoefficients tab = a_table(t, M, m, tol);
  return tab.a[m];
}

ACoefficients a_table(double t, int M, int kmax, double tol) {
  if (M < 2) throw std::invalid_argument("a_table: degenerate band, need M >= 2");
  if (tol <= 0.0) throw std::invalid_argument("a_table: tolerance must be positive");

  // Depth of the geometric sum.  For M > 2 the tail after depth k is below
  // (M-1)^{-k} / (1 - 1/(M-1)) since |alpha| <= 1.  For M = 2 there is no
  // geometric decay and the factorial decay of alpha past the turning point
  // does the work, so the table is extended past truncation_index(t).
  int depth;
  if (M > 2) {
    double q = 1.0 / (M - 1);
    depth = static_cast<int>(std::ceil(std::log(tol * (1.0 - q)) / std::log(q))) + 1;
    depth = std::max(depth, 1);
  } else {
    depth = (truncation_index(t) + 32) / 2;
  }

  int alpha_max = kmax + 2 * depth;
  ChebCoefficients alphas = alpha_table(t, alpha_max);

  ACoefficients out;
  out.t = t;
  out.M = M;
  out.a.assign(kmax + 1, Complex(0.0));
  for (int m = 0; m <= kmax; ++m) {
    Complex acc = 0.0;
    double weight = 1.0;
    for (int k = 0; k <= depth; ++k) {
      int idx = m + 2 * k;
      if (idx > alpha_max) break;
      acc += alphas.alphas[idx] * weight;
      weight /= (M - 1);
    }
    out.a[m] = acc;
  }
  return out;
}

double limit_density(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("limit_density: lambda must be nonnegative");
  if (lambda > 1.0) return 0.0;
  if (lambda == 1.0) return std::numeric_limits<double>::infinity();
  return (4.0 / kPi) * lambda * lambda / std::sqrt(1.0 - lambda * lambda);
}

double limit_cdf(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("limit_cdf: lambda must be nonnegative");
  if (lambda >= 1.0) return 1.0;
  return (2.0 / kPi) * (std::asin(lambda) - lambda * std::sqrt(1.0 - lambda * lambda));
}

double empirical_density(const ChebCoefficients& table, double lambda) {
  int n = static_cast<int>(std::floor(table.t * lambda));
  if (n >= static_cast<int>(table.alphas.size())) return 0.0;
  return table.t * std::norm(table.alphas[n]);
}

double empirical_cdf(const ChebCoefficients& table, double lambda) {
  int n = static_cast<int>(std::floor(table.t * lambda));
  double cdf = 0.0;
  for (int k = 0; k <= n && k < static_cast<int>(table.alphas.size()); ++k)
    cdf += std::norm(table.alphas[k]);
  return cdf;
}

double empirical_density(double t, double lambda) {
  if (t <= 0.0) throw std::invalid_argument("empirical_density: t must be positive");
  int n = static_cast<int>(std::floor(t * lambda));
  return t * std::norm(alpha(n, t));
}

double empirical_cdf(double t, double lambda) {
  if (t <= 0.0) throw std::invalid_argument("empirical_cdf: t must be positive");
  int n = static_cast<int>(std::floor(t * lambda));
  ChebCoefficients table = alpha_table(t, n);
  return empirical_cdf(table, lambda);
}

double krasikov_bound_sq(int nu, double t) {
  if (nu <= 0) throw std::invalid_argument("krasikov_bound_sq: need nu > -1/2 (integer nu >= 1)");
  double mu = (2.0 * nu + 1.0) * (2.0 * nu + 3.0);
  if (t <= 0.5 * std::sqrt(mu + std::cbrt(mu * mu)))
    throw std::invalid_argument("krasikov_bound_sq: argument below validity threshold");
  double q = 4.0 * t * t;
  return (4.0 / kPi) * (q - (2.0 * nu + 1.0) * (2.0 * nu + 5.0)) /
         (std::pow(q - mu, 1.5) - mu);
}

}  // namespace bandlab
