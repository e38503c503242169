#include "bandlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bandlab {

namespace {

// Permutation tables x -> x + o for a set of offsets; built once per call
// and shared across eigenvectors.
std::vector<std::vector<std::int64_t>> offset_tables(const LatticeConfig& cfg,
                                                     const std::vector<Site>& offsets) {
  const std::int64_t vol = cfg.volume();
  std::vector<std::vector<std::int64_t>> tables(offsets.size(), std::vector<std::int64_t>(vol));
  for (std::size_t k = 0; k < offsets.size(); ++k)
    for (std::int64_t x = 0; x < vol; ++x) tables[k][x] = cfg.add_index(x, offsets[k]);
  return tables;
}

// All canonical offsets with periodic norm < ell.
std::vector<Site> near_offsets(const LatticeConfig& cfg, double ell) {
  std::vector<Site> out;
  const std::int64_t vol = cfg.volume();
  for (std::int64_t i = 0; i < vol; ++i) {
    Site s = cfg.site_of_index(i);
    if (cfg.periodic_norm(s) < ell) out.push_back(s);
  }
  return out;
}

}  // namespace

double localization_functional(const ComplexVector& psi, double ell, const LatticeConfig& cfg) {
  const std::int64_t vol = cfg.volume();
  if (static_cast<std::int64_t>(psi.size()) != vol)
    throw std::invalid_argument("localization_functional: dimension mismatch");

  std::vector<double> prob(vol);
  double total = 0.0;
  for (std::int64_t x = 0; x < vol; ++x) {
    prob[x] = std::norm(psi[x]);
    total += prob[x];
  }

  auto near = near_offsets(cfg, ell);
  if (static_cast<std::int64_t>(near.size()) == vol) return 0.0;  // mask is empty everywhere
  auto tables = offset_tables(cfg, near);

  double acc = 0.0;
  for (std::int64_t x = 0; x < vol; ++x) {
    double near_mass = 0.0;
    for (const auto& tab : tables) near_mass += prob[tab[x]];
    double far = std::max(total - near_mass, 0.0);
    acc += std::sqrt(prob[x]) * std::sqrt(far);
  }
  return acc;
}

LocalizationReport localized_fraction(const EigenSystem& es, double eps, double ell) {
  const std::int64_t vol = es.cfg.volume();
  if (static_cast<std::int64_t>(es.eigenvectors.size()) != vol)
    throw std::invalid_argument("localized_fraction: eigensystem is not a full basis");
  LocalizationReport report;
  report.eps = eps;
  report.ell = ell;
  report.functional.resize(vol);

  auto near = near_offsets(es.cfg, ell);
  const bool empty_mask = static_cast<std::int64_t>(near.size()) == vol;
  auto tables = empty_mask ? std::vector<std::vector<std::int64_t>>{} : offset_tables(es.cfg, near);

  std::vector<double> prob(vol);
  for (std::int64_t a = 0; a < vol; ++a) {
    const ComplexVector& psi = es.eigenvectors[a];
    double total = 0.0;
    for (std::int64_t x = 0; x < vol; ++x) {
      prob[x] = std::norm(psi[x]);
      total += prob[x];
    }
    double value = 0.0;
    if (!empty_mask) {
      for (std::int64_t x = 0; x < vol; ++x) {
        double near_mass = 0.0;
        for (const auto& tab : tables) near_mass += prob[tab[x]];
        value += std::sqrt(prob[x]) * std::sqrt(std::max(total - near_mass, 0.0));
      }
    }
    report.functional[a] = value;
    if (value < eps) report.members.push_back(static_cast<int>(a));
  }
  report.fraction = static_cast<double>(report.members.size()) / static_cast<double>(vol);
  return report;
}

double theorem_scale(const LatticeConfig& cfg, double kappa) {
  return std::pow(static_cast<double>(cfg.W), 1.0 + cfg.d * kappa / 2.0);
}

SubexpReport subexponential_set(const EigenSystem& es, double ell, double gamma, double K) {
  if (gamma <= 0.0 || K <= 0.0)
    throw std::invalid_argument("subexponential_set: gamma and K must be positive");
  const std::int64_t vol = es.cfg.volume();
  if (static_cast<std::int64_t>(es.eigenvectors.size()) != vol)
    throw std::invalid_argument("subexponential_set: eigensystem is not a full basis");
  SubexpReport report;
  report.ell = ell;
  report.gamma = gamma;
  report.K = K;

  // Offsets sorted by decreasing distance: scanning the far tail first makes
  // the early rejection trigger almost immediately for delocalized vectors.
  std::vector<std::int64_t> order(vol);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(vol), weight_log(vol);
  for (std::int64_t i = 0; i < vol; ++i) {
    dist[i] = es.cfg.periodic_norm(es.cfg.site_of_index(i));
    weight_log[i] = std::pow(dist[i] / ell, gamma);
  }
  std::sort(order.begin(), order.end(),
            [&](std::int64_t a, std::int64_t b) { return dist[a] > dist[b]; });

  std::vector<std::vector<std::int64_t>> shift;  // shift[k][u] = index of u + offset_k
  {
    std::vector<Site> offs(vol);
    for (std::int64_t i = 0; i < vol; ++i) offs[i] = es.cfg.site_of_index(order[i]);
    shift = offset_tables(es.cfg, offs);
  }

  const double logK = std::log(K);
  std::vector<double> prob(vol);

  // Returns true when the weighted mass around u stays below K.
  auto center_ok = [&](std::int64_t u) {
    double acc = 0.0;
    for (std::int64_t k = 0; k < vol; ++k) {
      double p = prob[shift[k][u]];
      if (p == 0.0) continue;
      double arg = weight_log[order[k]];
      if (arg > 600.0) {
        double logterm = std::log(p) + arg;
        if (logterm > logK) return false;
        acc += std::exp(logterm);
      } else {
        acc += p * std::exp(arg);
      }
      if (acc > K) return false;
    }
    return acc <= K;
  };

  for (std::int64_t a = 0; a < vol; ++a) {
    const ComplexVector& psi = es.eigenvectors[a];
    std::int64_t peak = 0;
    double best = -1.0;
    for (std::int64_t x = 0; x < vol; ++x) {
      prob[x] = std::norm(psi[x]);
      if (prob[x] > best) {
        best = prob[x];
        peak = x;
      }
    }
    std::int64_t witness = -1;
    if (center_ok(peak)) {
      witness = peak;  // center_ok evaluates the membership sum exactly
    } else {
      for (std::int64_t u = 0; u < vol && witness < 0; ++u) {
        if (u == peak) continue;
        if (center_ok(u)) witness = u;
      }
    }
    if (witness >= 0) {
      report.members.push_back(static_cast<int>(a));
      report.witness.push_back(witness);
    }
  }
  return report;
}

double subexp_inclusion_epsilon(const LatticeConfig& cfg, double ell, double ell_tilde,
                                double gamma, double K, double delta) {
  if (delta * std::pow(2.0, gamma) >= 1.0)
    throw std::invalid_argument("subexp_inclusion_epsilon: need delta < 2^-gamma");
  const std::int64_t vol = cfg.volume();
  double decay = 1.0 - delta * std::pow(2.0, gamma);
  double Z = 0.0;
  for (std::int64_t i = 0; i < vol; ++i) {
    double r = cfg.periodic_norm(cfg.site_of_index(i));
    Z += std::exp(-decay * std::pow(r / ell, gamma));
  }
  double eps_sq = K * K * Z * std::exp(-delta * std::pow(ell_tilde / ell, gamma));
  return std::sqrt(eps_sq);
}

}  // namespace bandlab
