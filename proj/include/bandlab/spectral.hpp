#pragma once

#include "bandlab/propagator.hpp"

namespace bandlab {

// sum_x |psi(x)| ||P_{x,ell} psi|| where P_{x,ell} masks the sites at
// periodic distance >= ell from x.  Small values mean the vector is
// concentrated at scale ell; delocalized vectors score ~ sqrt(volume).
double localization_functional(const ComplexVector& psi, double ell, const LatticeConfig& cfg);

struct LocalizationReport {
  double eps = 0.0;
  double ell = 0.0;
  std::vector<int> members;  // indices alpha with functional < eps (strict)
  double fraction = 0.0;
  std::vector<double> functional;  // per-eigenvector values
};

LocalizationReport localized_fraction(const EigenSystem& es, double eps, double ell);

// The localization scale of the delocalization theorem: ell = W^{1 + d kappa/2}.
double theorem_scale(const LatticeConfig& cfg, double kappa);

struct SubexpReport {
  double ell = 0.0, gamma = 0.0, K = 0.0;
  std::vector<int> members;
  std::vector<std::int64_t> witness;  // localization center u per member
};

// alpha is a member iff some center u keeps sum_x |psi(x)|^2 exp((|x-u|/ell)^gamma)
// below K.  The argmax-|psi| center is tried first; membership and
// non-membership are always confirmed by the exhaustive scan over u.
SubexpReport subexponential_set(const EigenSystem& es, double ell, double gamma, double K);

// The epsilon for which the Cauchy-Schwarz chain proves, at this finite size,
// that every subexponentially localized vector at scale ell is also
// epsilon-localized at scale ell_tilde:
// eps^2 = K^2 exp(-delta (ell_tilde/ell)^gamma) sum_x exp(-(1-delta 2^gamma)(|x|/ell)^gamma).
// Requires delta 2^gamma < 1.
double subexp_inclusion_epsilon(const LatticeConfig& cfg, double ell, double ell_tilde,
                                double gamma, double K, double delta);

}  // namespace bandlab
