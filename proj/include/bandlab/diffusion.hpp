#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "bandlab/propagator.hpp"

namespace bandlab {

struct DiffusionProfile {
  LatticeConfig cfg;
  double t = 0.0;
  std::vector<double> rho;      // mean of |psi(x)|^2 over samples
  int n_samples = 0;
  std::vector<double> stderr_;  // per-site standard error of the mean

  explicit DiffusionProfile(const LatticeConfig& c) : cfg(c) {}
};

// Macroscopic scaling (t, x) = (eta T, eta^{1/2} W X) with eta = W^{d kappa}.
struct ScalingParams {
  double kappa = 0.0;
  double T = 0.0;
  double eta = 0.0;          // W^{d kappa}
  double t = 0.0;            // eta T
  double space_scale = 0.0;  // W^{1 + d kappa / 2}

  ScalingParams(const LatticeConfig& cfg, double kappa, double T);
  static bool uniformity_ok(const LatticeConfig& cfg);  // N >= W^{1 + d/6}
};

// Monte Carlo estimate of rho(t, x) = E |<delta_x, e^{-itH/2} delta_0>|^2.
// Sample seeds derive from (seed, sample index); samples run in parallel but
// accumulate in index order, so results are independent of the thread count.
DiffusionProfile estimate_rho(const LatticeConfig& cfg, EnsembleKind kind, double t,
                              int n_samples, std::uint64_t seed, int n_threads = 0);

// P_x(n): normalized count of n-step band-shell walks from the origin,
// computed by n successive shell convolutions of delta_0.
std::vector<double> path_count(const LatticeConfig& cfg, int n);

// Unnormalized walk counts D_ell(y, z) = M^ell P_{z-y}(ell), exact integers.
std::uint64_t d_ell(const LatticeConfig& cfg, int ell, const Site& y, const Site& z);
std::vector<std::uint64_t> d_ell_table(const LatticeConfig& cfg, int ell, const Site& y);

// The leading-order theory curve sum_n |alpha_n(t)|^2 P_x(n).
std::vector<double> ladder_prediction(const LatticeConfig& cfg, double t);

// Heat kernel G(T, X) = ((d+2)/(2 pi T))^{d/2} exp(-(d+2)|X|^2 / (2T)).
double heat_kernel(double T, const std::vector<double>& X, int d);

// L(T, X) = int_0^1 f(lambda) G(lambda T, X) dlambda via the lambda = sin
// theta substitution and composite Gauss-Legendre quadrature.
double limit_profile(double T, const std::vector<double>& X, int d);

// int L(T, X) phi(X) dX: inner Gaussian average by Gauss-Hermite, outer
// lambda integral as in limit_profile.
using TestFunction = std::function<double(const std::vector<double>&)>;
double limit_profile_integral(double T, int d, const TestFunction& phi);

// The named comparison set fixed for reproducible experiments:
// {1, X, exp(-|X|^2), cos(X_1), smoothed indicator of |X| > 1}.
std::vector<std::pair<std::string, TestFunction>> named_test_functions();

struct Theorem1Report {
  ScalingParams scaling;
  DiffusionProfile profile;  // Monte Carlo rho at t = eta T
  std::vector<std::string> names;
  std::vector<double> lhs;         // sum_x rho(t,x) phi(x / scale)
  std::vector<double> lhs_stderr;  // Monte Carlo error of the lhs
  std::vector<double> rhs;         // int L(T,X) phi(X) dX
};

Theorem1Report theorem1_experiment(const LatticeConfig& cfg, EnsembleKind kind, double kappa,
                                   double T, int n_samples, std::uint64_t seed,
                                   const std::vector<std::pair<std::string, TestFunction>>& fns,
                                   int n_threads = 0);

// Gauss quadrature rules (Golub-Welsch); exposed for tests.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace bandlab
