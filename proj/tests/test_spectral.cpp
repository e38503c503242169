#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bandlab/rng.hpp"
#include "bandlab/spectral.hpp"

using namespace bandlab;

namespace {

// O(N^2) direct evaluation of sum_x |psi(x)| ||P_{x,ell} psi||, the
// definition itself.
double functional_brute(const ComplexVector& psi, double ell, const LatticeConfig& cfg) {
  const std::int64_t vol = cfg.volume();
  double acc = 0.0;
  for (std::int64_t x = 0; x < vol; ++x) {
    double far = 0.0;
    Site sx = cfg.site_of_index(x);
    for (std::int64_t y = 0; y < vol; ++y)
      if (cfg.periodic_distance(cfg.site_of_index(y), sx) >= ell) far += std::norm(psi[y]);
    acc += std::abs(psi[x]) * std::sqrt(far);
  }
  return acc;
}

ComplexVector random_unit(const LatticeConfig& cfg, std::uint64_t seed) {
  ComplexVector v(cfg.volume());
  double norm = 0.0;
  for (std::int64_t i = 0; i < cfg.volume(); ++i) {
    v[i] = Complex(uniform01(counter_rng(seed, 0, i)) - 0.5, uniform01(counter_rng(seed, 1, i)) - 0.5);
    norm += std::norm(v[i]);
  }
  norm = std::sqrt(norm);
  for (auto& z : v) z /= norm;
  return v;
}

}  // namespace

TEST_CASE("localization functional special cases") {
  LatticeConfig cfg(1, 32, 2);
  const std::int64_t vol = cfg.volume();

  // mask empty once ell exceeds the lattice diameter
  ComplexVector any = random_unit(cfg, 5);
  CHECK(localization_functional(any, 17.0, cfg) == 0.0);

  // single-site vector scores zero for any ell >= 1
  ComplexVector delta(vol, Complex(0.0));
  delta[7] = 1.0;
  for (double ell : {1.0, 3.0, 10.0}) CHECK(localization_functional(delta, ell, cfg) == 0.0);

  // uniform vector scores ~ sqrt(N * far fraction), far above any fixed eps
  ComplexVector uniform(vol, Complex(1.0 / std::sqrt(static_cast<double>(vol)), 0.0));
  double ell = vol / 4.0;
  double got = localization_functional(uniform, ell, cfg);
  long long far_count = 0;
  for (std::int64_t y = 0; y < vol; ++y)
    if (cfg.periodic_norm(cfg.site_of_index(y)) >= ell) ++far_count;
  double expected = std::sqrt(static_cast<double>(vol)) *
                    std::sqrt(static_cast<double>(far_count) / vol);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(got > 3.0);
}

TEST_CASE("localization functional matches the brute-force definition") {
  LatticeConfig cfg(2, 6, 2);
  for (std::uint64_t s : {1, 2, 3}) {
    ComplexVector psi = random_unit(cfg, s);
    for (double ell : {1.0, 2.5, 4.0})
      CHECK(localization_functional(psi, ell, cfg) ==
            doctest::Approx(functional_brute(psi, ell, cfg)).epsilon(1e-12));
  }
}

TEST_CASE("functional invariances and monotonicity") {
  LatticeConfig cfg(1, 24, 2);
  ComplexVector psi = random_unit(cfg, 9);

  double base = localization_functional(psi, 5.0, cfg);

  // global phase
  ComplexVector rotated = psi;
  for (auto& z : rotated) z *= std::polar(1.0, 1.234);
  CHECK(localization_functional(rotated, 5.0, cfg) == doctest::Approx(base).epsilon(1e-12));

  // lattice translation
  ComplexVector shifted(psi.size());
  for (std::int64_t x = 0; x < cfg.volume(); ++x) shifted[cfg.add_index(x, {3})] = psi[x];
  CHECK(localization_functional(shifted, 5.0, cfg) == doctest::Approx(base).epsilon(1e-12));

  // nonincreasing in ell
  double prev = 1e300;
  for (double ell : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    double v = localization_functional(psi, ell, cfg);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("localized fraction membership") {
  LatticeConfig cfg(1, 40, 3);
  BandMatrix H = BandMatrix::sample(cfg, EnsembleKind::HermitianUnitCircle, 12);
  EigenSystem es = dense_eigensystem(H);

  // eps = 0: strict inequality empties the set
  LocalizationReport r0 = localized_fraction(es, 0.0, 4.0);
  CHECK(r0.members.empty());
  CHECK(r0.fraction == 0.0);

  // ell beyond the diameter: every functional is 0 < eps
  LocalizationReport rall = localized_fraction(es, 0.01, 21.0);
  CHECK(static_cast<std::int64_t>(rall.members.size()) == cfg.volume());
  CHECK(rall.fraction == 1.0);

  // membership grows with eps and with ell
  LocalizationReport a = localized_fraction(es, 0.5, 6.0);
  LocalizationReport b = localized_fraction(es, 1.0, 6.0);
  LocalizationReport c = localized_fraction(es, 0.5, 12.0);
  CHECK(a.members.size() <= b.members.size());
  CHECK(a.members.size() <= c.members.size());

  CHECK(theorem_scale(cfg, 0.3) == doctest::Approx(std::pow(3.0, 1.15)));
}

TEST_CASE("subexponential set membership") {
  LatticeConfig cfg(1, 32, 2);
  const std::int64_t vol = cfg.volume();
  EigenSystem es(cfg);
  es.eigenvalues.assign(vol, 0.0);

  // a full basis: one delocalized vector, the rest single-site
  ComplexVector uniform(vol, Complex(1.0 / std::sqrt(static_cast<double>(vol)), 0.0));
  es.eigenvectors.assign(vol, ComplexVector(vol, Complex(0.0)));
  es.eigenvectors[0] = uniform;
  for (std::int64_t a = 1; a < vol; ++a) es.eigenvectors[a][a] = 1.0;

  SubexpReport rep = subexponential_set(es, 2.0, 1.0, 2.0);
  REQUIRE(rep.members.size() == static_cast<std::size_t>(vol - 1));
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    CHECK(rep.members[i] == static_cast<int>(i) + 1);  // uniform vector excluded
    CHECK(rep.witness[i] == rep.members[i]);           // centered on its site
  }

  CHECK_THROWS(subexponential_set(es, 2.0, -1.0, 2.0));
  CHECK_THROWS(subexp_inclusion_epsilon(cfg, 2.0, 4.0, 1.0, 2.0, 0.6));
}

TEST_CASE("subexponential members are epsilon-localized at the larger scale") {
  LatticeConfig cfg(1, 64, 4);
  const double gamma = 1.0, K = 2.0, delta = 0.4;
  const double ell = 4.0, ell_tilde = 12.0;
  double eps_w = subexp_inclusion_epsilon(cfg, ell, ell_tilde, gamma, K, delta);

  for (std::uint64_t seed : {3, 4}) {
    BandMatrix H = BandMatrix::sample(cfg, EnsembleKind::SymmetricBernoulli, seed);
    EigenSystem es = dense_eigensystem(H);
    SubexpReport subexp = subexponential_set(es, ell, gamma, K);
    for (int alpha : subexp.members) {
      double fval = localization_functional(es.eigenvectors[alpha], ell_tilde, cfg);
      CHECK(fval < eps_w);
    }
  }
}
