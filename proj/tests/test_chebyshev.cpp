#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bandlab/chebyshev.hpp"

using namespace bandlab;
namespace {
constexpr double kPi = std::numbers::pi;

// Independent oracle: J_k(t) = (1/pi) int_0^pi cos(t sin th - k th) dth by
// composite Simpson with enough nodes that the oscillation is resolved far
// below the comparison tolerance.
double bessel_quadrature(int k, double t) {
  const int periods = static_cast<int>(t + k) + 8;
  int n = 1200 * periods;
  if (n % 2) ++n;
  const double h = kPi / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double th = i * h;
    double f = std::cos(t * std::sin(th) - k * th);
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * h / 3.0 / kPi;
}

}  // namespace

TEST_CASE("bessel at zero argument") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  for (int k = 1; k < 8; ++k) CHECK(bessel_j(k, 0.0) == 0.0);
}

TEST_CASE("bessel agrees with the integral definition") {
  for (double t : {0.5, 1.0, 5.0, 20.0, 100.0}) {
    auto table = bessel_j_table(static_cast<int>(t) + 20, t);
    for (int k : {0, 1, 2, 3, 5, 8, 13}) {
      double oracle = bessel_quadrature(k, t);
      CHECK(table[k] == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
    }
  }
  // spot checks at higher order near the turning point
  CHECK(bessel_j(200, 200.0) ==
        doctest::Approx(bessel_quadrature(200, 200.0)).epsilon(1e-11).scale(1.0));
}

TEST_CASE("bessel normalization identity at t = 5") {
  auto table = bessel_j_table(60, 5.0);
  double acc = table[0] * table[0];
  for (int k = 1; k <= 60; ++k) acc += 2.0 * table[k] * table[k];
  CHECK(std::abs(acc - 1.0) < 1e-12);
}

TEST_CASE("bessel input guards") {
  CHECK_THROWS(bessel_j(-1, 1.0));
  CHECK_THROWS(bessel_j(1, -1.0));
  CHECK_THROWS(bessel_j(1, 2e6));
}

TEST_CASE("krasikov bound dominates the squared bessel on the audit grid") {
  const double t = 200.0;
  auto table = bessel_j_table(static_cast<int>(t) + 10, t);
  for (double lam = 0.1; lam <= 0.9 + 1e-9; lam += 0.05) {
    int nu = static_cast<int>(t * lam) + 1;
    double bound = krasikov_bound_sq(nu, t);
    CHECK(table[nu] * table[nu] <= bound);
  }
  CHECK_THROWS(krasikov_bound_sq(500, 1.0));  // below validity threshold
}

TEST_CASE("alpha basics") {
  // alpha_0(t) = 2 J_1(t)/t, limit 1 at t = 0
  for (double t : {0.3, 2.0, 11.0}) {
    CHECK(alpha(0, t).real() == doctest::Approx(2.0 * bessel_j(1, t) / t).epsilon(1e-14));
    CHECK(alpha(0, t).imag() == 0.0);
  }
  CHECK(alpha(0, 0.0) == Complex(1.0, 0.0));
  for (int k = 1; k < 6; ++k) CHECK(alpha(k, 0.0) == Complex(0.0, 0.0));

  // parity: real for even k, imaginary for odd k
  for (int k = 0; k < 12; ++k) {
    Complex a = alpha(k, 7.5);
    if (k % 2 == 0)
      CHECK(a.imag() == 0.0);
    else
      CHECK(a.real() == 0.0);
  }

  // |alpha_k(t)| <= min(1, t^k / k!)
  for (double t : {0.5, 3.0, 12.0}) {
    double fact = 1.0;
    for (int k = 0; k < 25; ++k) {
      if (k > 0) fact *= k;
      double bound = std::min(1.0, std::pow(t, k) / fact);
      CHECK(std::abs(alpha(k, t)) <= bound * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("alpha orthonormality") {
  ChebCoefficients tab = alpha_table(20.0, 200);
  double mass = 0.0;
  for (const auto& a : tab.alphas) mass += std::norm(a);
  CHECK(std::abs(mass - 1.0) < 1e-10);

  for (double t : {1.0, 5.0, 100.0}) {
    ChebCoefficients tb = alpha_table(t);
    double m2 = 0.0;
    for (const auto& a : tb.alphas) m2 += std::norm(a);
    CHECK(std::abs(m2 - 1.0) < 1e-10);
    CHECK(tb.tail_bound < 1e-10);
  }
}

TEST_CASE("a coefficients") {
  CHECK_THROWS(a_coeff(0, 1.0, 1, 1e-10));
  CHECK_THROWS(a_coeff(0, 1.0, 3, -1.0));

  // large M: a_m -> alpha_m with gap at most 2/(M-1)
  const int M = 1000000;
  for (int m : {0, 1, 3, 7}) {
    Complex gap = a_coeff(m, 6.0, M, 1e-14) - alpha(m, 6.0);
    CHECK(std::abs(gap) <= 2.0 / (M - 1));
  }

  // sum over m of |a_m|^2 differs from 1 by O(1/M); the deviation is
  // negative (the leading cross term sum_n Re alpha_n conj(alpha_{n+2})
  // is -1/2), so the band is two-sided
  {
    ACoefficients tab = a_table(10.0, 100, truncation_index(10.0), 1e-14);
    double mass = 0.0;
    for (const auto& a : tab.a) mass += std::norm(a);
    CHECK(std::abs(mass - 1.0) <= 0.05);
    CHECK(mass == doctest::Approx(1.0 - 1.0 / 99 + 1.0 / (99.0 * 99)).epsilon(1e-3));
  }

  // |a_n(t)| <= 3 t^n / n! on a spot grid
  for (double t : {2.0, 8.0}) {
    ACoefficients tab = a_table(t, 24, 40, 1e-14);
    double fact = 1.0;
    for (int n = 0; n <= 40; ++n) {
      if (n > 0) fact *= n;
      CHECK(std::abs(tab.a[n]) <= 3.0 * std::pow(t, n) / fact + 1e-300);
    }
  }

  // M = 2 has no geometric decay; factorial decay must still close the sum
  {
    ACoefficients tab = a_table(4.0, 2, 10, 1e-12);
    ChebCoefficients al = alpha_table(4.0);
    Complex direct = 0.0;
    for (int k = 0; 2 * k < static_cast<int>(al.alphas.size()); ++k) direct += al.alphas[2 * k];
    CHECK(std::abs(tab.a[0] - direct) < 1e-12);
  }
}

TEST_CASE("limit laws") {
  CHECK(limit_cdf(0.0) == 0.0);
  CHECK(limit_cdf(1.0) == 1.0);
  CHECK(limit_cdf(2.0) == 1.0);
  CHECK(limit_density(1.5) == 0.0);
  CHECK(std::isinf(limit_density(1.0)));
  CHECK_THROWS(limit_density(-0.1));

  // quadrature of f reproduces F (lambda = sin theta removes the singularity)
  auto f_integral = [](double upto) {
    const int n = 400000;
    double hi = std::asin(upto);
    double h = hi / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      double th = i * h;
      double s = std::sin(th);
      double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * (4.0 / kPi) * s * s;
    }
    return acc * h / 3.0;
  };
  CHECK(std::abs(f_integral(1.0) - 1.0) < 1e-10);
  CHECK(std::abs(f_integral(0.5) - limit_cdf(0.5)) < 1e-10);
  CHECK(limit_cdf(0.5) == doctest::Approx(0.057669).epsilon(1e-4));
}

TEST_CASE("empirical cdf approaches the limit law") {
  ChebCoefficients t200 = alpha_table(200.0);
  ChebCoefficients t400 = alpha_table(400.0);

  // nondecreasing, bounded by 1
  double prev = 0.0;
  for (double lam = 0.0; lam <= 1.2; lam += 0.05) {
    double v = empirical_cdf(t200, lam);
    CHECK(v >= prev - 1e-15);
    CHECK(v <= 1.0 + 1e-12);
    prev = v;
  }

  auto sup_gap = [](const ChebCoefficients& tab) {
    double sup = 0.0;
    for (double lam = 0.05; lam <= 0.95 + 1e-9; lam += 0.01)
      sup = std::max(sup, std::abs(empirical_cdf(tab, lam) - limit_cdf(lam)));
    return sup;
  };
  double g200 = sup_gap(t200), g400 = sup_gap(t400);
  CHECK(g400 <= 1.5 * g200);
  CHECK(g400 < 0.1);

  // f_t stays bounded on the bulk for t >= 200.  The Krasikov estimate caps
  // it near 4 lambda^2 * (4/pi) ~ 4.9 at the right edge, so 5 is the working
  // constant (3 is already exceeded at t = 200, lambda ~ 0.9).
  for (const ChebCoefficients* tab : {&t200, &t400})
    for (double lam = 0.1; lam <= 0.9 + 1e-9; lam += 0.02)
      CHECK(empirical_density(*tab, lam) <= 5.0);
}
