#pragma once

#include <complex>
#include <vector>

namespace bandlab {

using Complex = std::complex<double>;

// Truncation rule for coefficient sums: ceil(t + 12 t^{1/3} + 30).  Bessel
// functions of order k decay super-exponentially once k passes t, so the
// tail beyond this index is far below double precision.
int truncation_index(double t);

// Bessel function of the first kind, J_k(t), for k >= 0 and t >= 0.
// Backward (Miller) recurrence normalized with J_0 + 2 sum J_{2k} = 1;
// values whose magnitude falls below the representable range come out as 0.
double bessel_j(int k, double t);

// J_0(t) .. J_kmax(t) in one sweep.
std::vector<double> bessel_j_table(int kmax, double t);

// Chebyshev-U transform of exp(-i t xi): alpha_k(t) = 2 (-i)^k (k+1)/t J_{k+1}(t),
// with the continuous limit alpha_k(0) = delta_{k0}.
Complex alpha(int k, double t);

struct ChebCoefficients {
  double t = 0.0;
  std::vector<Complex> alphas;  // alpha_0 .. alpha_K
  int K = 0;
  double tail_bound = 0.0;      // 1 - sum |alpha_k|^2 over the table, clipped at 0

  double abs_tail_from(int n) const;  // sum_{k > n} |alpha_k| within the table
};

// Table up to truncation_index(t), or up to kmax if given.
ChebCoefficients alpha_table(double t);
ChebCoefficients alpha_table(double t, int kmax);

// a_m(t) = sum_k alpha_{m+2k}(t) / (M-1)^k with tail below tol.
Complex a_coeff(int m, double t, int M, double tol);

struct ACoefficients {
  double t = 0.0;
  int M = 0;
  std::vector<Complex> a;  // a_0 .. a_K
};

ACoefficients a_table(double t, int M, int kmax, double tol);

// Limit laws of the rescaled coefficient distribution:
// f(lambda) = (4/pi) lambda^2 / sqrt(1-lambda^2) on [0,1), +inf at lambda = 1,
// 0 beyond; F(lambda) = (2/pi)(asin(lambda) - lambda sqrt(1-lambda^2)).
double limit_density(double lambda);
double limit_cdf(double lambda);

// Empirical laws at finite t: f_t(lambda) = t |alpha_{[t lambda]}(t)|^2 and
// the integrated form F~_t(lambda) = sum_{n <= [lambda t]} |alpha_n(t)|^2.
double empirical_density(double t, double lambda);
double empirical_cdf(double t, double lambda);
double empirical_density(const ChebCoefficients& table, double lambda);
double empirical_cdf(const ChebCoefficients& table, double lambda);

// Krasikov's bound on |J_nu(t)|^2 for nu > -1/2 and 4t^2 > mu + mu^{2/3},
// mu = (2nu+1)(2nu+3).  Throws outside the validity range.
double krasikov_bound_sq(int nu, double t);

}  // namespace bandlab
