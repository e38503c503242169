#pragma once

#include <memory>

#include "bandlab/chebyshev.hpp"
#include "bandlab/ensemble.hpp"

namespace bandlab {

enum class EvolveMethod { ChebyshevRecursion, NonbacktrackingSeries, DenseOracle };

struct PropagatorResult {
  double t = 0.0;
  ComplexVector psi;
  EvolveMethod method = EvolveMethod::ChebyshevRecursion;
  int truncation = 0;
  double residual_bound = 0.0;
  bool rescaled = false;  // true when the spectral-safety rescaling was active
};

// Dense eigendecomposition of a small sample; feeds the dense propagation
// oracle and the spectral diagnostics.
struct EigenSystem {
  std::vector<double> eigenvalues;
  std::vector<ComplexVector> eigenvectors;  // orthonormal, one vector per column
  LatticeConfig cfg;
  std::uint64_t seed = 0;

  explicit EigenSystem(const LatticeConfig& c) : cfg(c) {}
};

EigenSystem dense_eigensystem(const BandMatrix& H);

// psi(t) = exp(-i t H / 2) applied to the basis vector at `start` (the
// origin by default).
//
// The Chebyshev route runs the three-term vector recursion on H/(1+eps_s)
// with time stretched to t(1+eps_s); the two evaluations agree exactly while
// keeping the scalar series inside its fast-convergence window even when the
// sample spectrum pokes slightly outside [-2,2].  Recursion blowup raises
// std::runtime_error (spectral range).
PropagatorResult chebyshev_evolve(const BandMatrix& H, double t, double tol,
                                  std::int64_t start = -1);

// H^{(n)} v through H^{(0)} = 1, H^{(1)} = H, H^{(2)} = H^2 - M/(M-1), and
// H^{(n)} = H H^{(n-1)} - H^{(n-2)} for n >= 3.
ComplexVector nonbacktracking_power_apply(const BandMatrix& H, int n, const ComplexVector& v);

// psi(t) = sum_m a_m(t) H^{(m)} delta_start.
PropagatorResult nonbacktracking_evolve(const BandMatrix& H, double t, double tol,
                                        std::int64_t start = -1);

// Full eigendecomposition route; refuses above the dense cap.
PropagatorResult dense_oracle_evolve(const BandMatrix& H, double t, std::int64_t start = -1);
PropagatorResult dense_oracle_evolve(const EigenSystem& es, double t, std::int64_t start = -1);

double norm2(const ComplexVector& v);

}  // namespace bandlab
