#include "bandlab/propagator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "bandlab/constants.hpp"

namespace bandlab {

double norm2(const ComplexVector& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

namespace {

std::int64_t resolve_start(const BandMatrix& H, std::int64_t start) {
  if (start < 0) return H.cfg().origin_index();
  if (start >= H.cfg().volume())
    throw std::invalid_argument("evolve: start site index out of range");
  return start;
}

}  // namespace

PropagatorResult chebyshev_evolve(const BandMatrix& H, double t, double tol, std::int64_t start) {
  if (tol <= 0.0) throw std::invalid_argument("chebyshev_evolve: tolerance must be positive");
  const std::int64_t n = H.cfg().volume();
  const std::int64_t x0 = resolve_start(H, start);

  const double stretch = 1.0 + constants::kSpectralSafety;
  const double t_eff = t * stretch;
  const int K = truncation_index(t_eff);
  // table extends past K so the reported residual is the actual tail
  ChebCoefficients coeffs = alpha_table(t_eff, K + 32);

  PropagatorResult result;
  result.t = t;
  result.method = EvolveMethod::ChebyshevRecursion;
  result.truncation = K;
  result.residual_bound = coeffs.abs_tail_from(K) + 1e-15;
  result.rescaled = true;
  if (result.residual_bound > tol + 1e-15)
    throw std::runtime_error("chebyshev_evolve: truncation rule cannot reach requested tolerance");

  // phi_n = U_n(H / (2 stretch)) delta_{x0} by the three-term recursion.
  ComplexVector prev(n, Complex(0.0)), cur(n, Complex(0.0)), next(n), psi(n, Complex(0.0));
  cur[x0] = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) {
      H.apply(cur.data(), next.data());
      const double inv = 1.0 / stretch;
      for (std::int64_t i = 0; i < n; ++i) next[i] = next[i] * inv - prev[i];
      prev.swap(cur);
      cur.swap(next);
    }
    const Complex c = coeffs.alphas[k];
    for (std::int64_t i = 0; i < n; ++i) psi[i] += c * cur[i];
    if (k % 16 == 0 || k == K) {
      double nrm = norm2(cur);
      if (!(nrm < constants::kRecursionBlowup))
        throw std::runtime_error("chebyshev_evolve: recursion blowup, spectrum outside range");
    }
  }
  result.psi = std::move(psi);
  return result;
}

ComplexVector nonbacktracking_power_apply(const BandMatrix& H, int n, const ComplexVector& v) {
  if (n < 0) throw std::invalid_argument("nonbacktracking_power_apply: order must be nonnegative");
  if (static_cast<std::int64_t>(v.size()) != H.cfg().volume())
    throw std::invalid_argument("nonbacktracking_power_apply: dimension mismatch");
  if (n == 0) return v;
  const std::int64_t vol = H.cfg().volume();
  const double ratio = static_cast<double>(H.shell_size()) / (H.shell_size() - 1);

  ComplexVector prev = v;            // H^{(0)} v
  ComplexVector cur = H.apply(v);    // H^{(1)} v
  if (n == 1) return cur;
  ComplexVector next(vol);
  for (int m = 2; m <= n; ++m) {
    H.apply(cur.data(), next.data());
    if (m == 2) {
      for (std::int64_t i = 0; i < vol; ++i) next[i] -= ratio * prev[i];
    } else {
      for (std::int64_t i = 0; i < vol; ++i) next[i] -= prev[i];
    }
    prev.swap(cur);
    cur.swap(next);
  }
  return cur;
}

PropagatorResult nonbacktracking_evolve(const BandMatrix& H, double t, double tol,
                                        std::int64_t start) {
  if (tol <= 0.0) throw std::invalid_argument("nonbacktracking_evolve: tolerance must be positive");
  const std::int64_t n = H.cfg().volume();
  const std::int64_t x0 = resolve_start(H, start);
  const int M = H.shell_size();
  const double ratio = static_cast<double>(M) / (M - 1);

  const int K = truncation_index(t);
  ACoefficients coeffs = a_table(t, M, K, tol);

  PropagatorResult result;
  result.t = t;
  result.method = EvolveMethod::NonbacktrackingSeries;
  result.truncation = K;
  result.rescaled = false;
  {
    double tail = 0.0;
    ChebCoefficients at = alpha_table(t, K + 8);
    tail = at.abs_tail_from(K);
    result.residual_bound = tail * (1.0 + 2.0 / (M - 1)) + 1e-15;
  }

  ComplexVector prev(n, Complex(0.0)), cur(n, Complex(0.0)), next(n), psi(n, Complex(0.0));
  prev[x0] = 1.0;  // H^{(0)} delta
  for (std::int64_t i = 0; i < n; ++i) psi[i] += coeffs.a[0] * prev[i];
  if (K >= 1) {
    H.apply(prev.data(), cur.data());  // H^{(1)} delta
    for (std::int64_t i = 0; i < n; ++i) psi[i] += coeffs.a[1] * cur[i];
  }
  for (int m = 2; m <= K; ++m) {
    H.apply(cur.data(), next.data());
    if (m == 2) {
      for (std::int64_t i = 0; i < n; ++i) next[i] -= ratio * prev[i];
    } else {
      for (std::int64_t i = 0; i < n; ++i) next[i] -= prev[i];
    }
    prev.swap(cur);
    cur.swap(next);
    const Complex c = coeffs.a[m];
    for (std::int64_t i = 0; i < n; ++i) psi[i] += c * cur[i];
    if (m % 16 == 0 || m == K) {
      double nrm = norm2(cur);
      if (!(nrm < constants::kRecursionBlowup))
        throw std::runtime_error("nonbacktracking_evolve: recursion blowup, spectrum outside range");
    }
  }
  result.psi = std::move(psi);
  return result;
}

EigenSystem dense_eigensystem(const BandMatrix& H) {
  const std::int64_t n = H.cfg().volume();
  if (n > constants::kDenseCap)
    throw std::invalid_argument("dense_eigensystem: lattice volume exceeds the dense cap");

  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n, n);
  for (std::int64_t x = 0; x < n; ++x)
    for (int j = 0; j < H.shell_size(); ++j)
      mat(x, H.neighbor(x, j)) += H.entry(x, j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense_eigensystem: eigensolver failed");

  EigenSystem es(H.cfg());
  es.seed = H.seed();
  es.eigenvalues.resize(n);
  es.eigenvectors.assign(n, ComplexVector(n));
  for (std::int64_t a = 0; a < n; ++a) {
    es.eigenvalues[a] = solver.eigenvalues()[a];
    for (std::int64_t i = 0; i < n; ++i) es.eigenvectors[a][i] = solver.eigenvectors()(i, a);
  }
  return es;
}

PropagatorResult dense_oracle_evolve(const EigenSystem& es, double t, std::int64_t start) {
  const std::int64_t n = es.cfg.volume();
  const std::int64_t x0 = (start < 0) ? es.cfg.origin_index() : start;
  if (x0 < 0 || x0 >= n) throw std::invalid_argument("dense_oracle_evolve: start out of range");

  PropagatorResult result;
  result.t = t;
  result.method = EvolveMethod::DenseOracle;
  result.truncation = 0;
  result.residual_bound = 0.0;
  result.psi.assign(n, Complex(0.0));
  for (std::int64_t a = 0; a < n; ++a) {
    const ComplexVector& v = es.eigenvectors[a];
    Complex overlap = std::conj(v[x0]);
    Complex phase = std::polar(1.0, -0.5 * t * es.eigenvalues[a]);
    Complex w = phase * overlap;
    for (std::int64_t i = 0; i < n; ++i) result.psi[i] += w * v[i];
  }
  return result;
}

PropagatorResult dense_oracle_evolve(const BandMatrix& H, double t, std::int64_t start) {
  EigenSystem es = dense_eigensystem(H);
  return dense_oracle_evolve(es, t, start);
}

}  // namespace bandlab
