#include "bandlab/diffusion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "bandlab/constants.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

ScalingParams::ScalingParams(const LatticeConfig& cfg, double kappa_, double T_)
    : kappa(kappa_), T(T_) {
  if (kappa <= 0.0 || kappa >= 1.0 / 3.0)
    throw std::invalid_argument("scaling: kappa must lie strictly inside (0, 1/3)");
  if (T < 0.0) throw std::invalid_argument("scaling: T must be nonnegative");
  eta = std::pow(static_cast<double>(cfg.W), cfg.d * kappa);
  t = eta * T;
  space_scale = std::pow(static_cast<double>(cfg.W), 1.0 + cfg.d * kappa / 2.0);
}

bool ScalingParams::uniformity_ok(const LatticeConfig& cfg) {
  return cfg.N >= std::pow(static_cast<double>(cfg.W), 1.0 + cfg.d / 6.0);
}

namespace {

// Runs n_samples independent evolutions and hands |psi|^2 profiles to the
// caller in sample order.
void run_samples(const LatticeConfig& cfg, EnsembleKind kind, double t, int n_samples,
                 std::uint64_t seed, int n_threads,
                 const std::function<void(int, const std::vector<double>&)>& consume) {
  if (n_samples < 1) throw std::invalid_argument("estimate_rho: need at least one sample");
  const std::int64_t vol = cfg.volume();
  if (n_threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    n_threads = hc ? static_cast<int>(hc) : 1;
  }
  n_threads = std::min(n_threads, n_samples);

  const int block =
      std::max(1, std::min<int>(n_samples, static_cast<int>((1 << 24) / std::max<std::int64_t>(vol, 1)) + 1));
  std::vector<std::vector<double>> slots(block);

  std::mutex err_mutex;
  std::exception_ptr first_error;

  for (int base = 0; base < n_samples; base += block) {
    const int count = std::min(block, n_samples - base);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto worker = [&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= count) break;
        {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (first_error) break;
        }
        try {
          std::uint64_t sample_seed =
              counter_rng(seed, 0x73616d70ULL, static_cast<std::uint64_t>(base + i));
          BandMatrix H = BandMatrix::sample(cfg, kind, sample_seed);
          PropagatorResult r = chebyshev_evolve(H, t, constants::kEvolveTol);
          std::vector<double> prob(vol);
          double mass = 0.0;
          for (std::int64_t x = 0; x < vol; ++x) {
            prob[x] = std::norm(r.psi[x]);
            mass += prob[x];
          }
          if (std::abs(mass - 1.0) > constants::kTolMass)
            throw std::runtime_error("propagated mass deviates from 1 by " +
                                     std::to_string(mass - 1.0));
          slots[i] = std::move(prob);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!first_error)
            first_error = std::make_exception_ptr(
                std::runtime_error("sample " + std::to_string(base + i) + ": " + e.what()));
          break;
        }
      }
    };
    for (int th = 0; th < n_threads; ++th) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    for (int i = 0; i < count; ++i) consume(base + i, slots[i]);
  }
}

}  // namespace

DiffusionProfile estimate_rho(const LatticeConfig& cfg, EnsembleKind kind, double t,
                              int n_samples, std::uint64_t seed, int n_threads) {
  const std::int64_t vol = cfg.volume();
  DiffusionProfile profile(cfg);
  profile.t = t;
  profile.n_samples = n_samples;
  profile.rho.assign(vol, 0.0);
  profile.stderr_.assign(vol, 0.0);

  // Kahan accumulation keeps the reduction exact enough to be reproducible.
  std::vector<double> sum(vol, 0.0), comp(vol, 0.0), sumsq(vol, 0.0);
  run_samples(cfg, kind, t, n_samples, seed, n_threads,
              [&](int, const std::vector<double>& prob) {
                for (std::int64_t x = 0; x < vol; ++x) {
                  double y = prob[x] - comp[x];
                  double s = sum[x] + y;
                  comp[x] = (s - sum[x]) - y;
                  sum[x] = s;
                  sumsq[x] += prob[x] * prob[x];
                }
              });
  for (std::int64_t x = 0; x < vol; ++x) {
    double mean = sum[x] / n_samples;
    profile.rho[x] = mean;
    if (n_samples > 1) {
      double var = (sumsq[x] - n_samples * mean * mean) / (n_samples - 1);
      profile.stderr_[x] = std::sqrt(std::max(var, 0.0) / n_samples);
    }
  }
  return profile;
}

namespace {

// One convolution step with the normalized shell kernel.
void shell_step(const LatticeConfig& cfg, const std::vector<double>& in, std::vector<double>& out) {
  const std::int64_t vol = cfg.volume();
  const auto& shell = cfg.band_shell();
  const double w = 1.0 / shell.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::int64_t x = 0; x < vol; ++x) {
    if (in[x] == 0.0) continue;
    const double v = in[x] * w;
    for (const auto& u : shell) out[cfg.add_index(x, u)] += v;
  }
}

}  // namespace

std::vector<double> path_count(const LatticeConfig& cfg, int n) {
  if (n < 0) throw std::invalid_argument("path_count: step count must be nonnegative");
  const std::int64_t vol = cfg.volume();
  std::vector<double> cur(vol, 0.0), next(vol, 0.0);
  cur[cfg.origin_index()] = 1.0;
  for (int step = 0; step < n; ++step) {
    shell_step(cfg, cur, next);
    cur.swap(next);
  }
  return cur;
}

std::vector<std::uint64_t> d_ell_table(const LatticeConfig& cfg, int ell, const Site& y) {
  if (ell < 0) throw std::invalid_argument("d_ell: length must be nonnegative");
  const int M = cfg.shell_size();
  if (ell * std::log2(static_cast<double>(M)) > 62.0)
    throw std::invalid_argument("d_ell: M^ell exceeds 64-bit range");
  const std::int64_t vol = cfg.volume();
  std::vector<std::uint64_t> cur(vol, 0), next(vol, 0);
  cur[cfg.site_index(cfg.canonical(y))] = 1;
  for (int step = 0; step < ell; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (std::int64_t x = 0; x < vol; ++x) {
      if (cur[x] == 0) continue;
      for (const auto& u : cfg.band_shell()) next[cfg.add_index(x, u)] += cur[x];
    }
    cur.swap(next);
  }
  return cur;
}

std::uint64_t d_ell(const LatticeConfig& cfg, int ell, const Site& y, const Site& z) {
  return d_ell_table(cfg, ell, y)[cfg.site_index(cfg.canonical(z))];
}

std::vector<double> ladder_prediction(const LatticeConfig& cfg, double t) {
  if (t < 0.0) throw std::invalid_argument("ladder_prediction: time must be nonnegative");
  const std::int64_t vol = cfg.volume();
  ChebCoefficients coeffs = alpha_table(t);
  std::vector<double> out(vol, 0.0), cur(vol, 0.0), next(vol, 0.0);
  cur[cfg.origin_index()] = 1.0;
  for (int n = 0; n <= coeffs.K; ++n) {
    if (n > 0) {
      shell_step(cfg, cur, next);
      cur.swap(next);
    }
    const double w = std::norm(coeffs.alphas[n]);
    if (w == 0.0) continue;
    for (std::int64_t x = 0; x < vol; ++x) out[x] += w * cur[x];
  }
  return out;
}

double heat_kernel(double T, const std::vector<double>& X, int d) {
  if (T <= 0.0) throw std::domain_error("heat_kernel: time must be positive");
  if (static_cast<int>(X.size()) != d) throw std::invalid_argument("heat_kernel: dimension mismatch");
  double r2 = 0.0;
  for (double c : X) r2 += c * c;
  double pre = std::pow((d + 2) / (2.0 * kPi * T), 0.5 * d);
  return pre * std::exp(-(d + 2) * r2 / (2.0 * T));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    double v = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v * v;
  }
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(k / 2.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  const double mu0 = std::sqrt(kPi);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    double v = es.eigenvectors()(0, i);
    weights[i] = mu0 * v * v;
  }
}

namespace {

// Composite Gauss-Legendre integral of g over [0, pi/2]; the lambda = sin
// theta substitution makes the integrand smooth away from theta = 0, and
// the panel subdivision tames the remaining algebraic kink at the origin.
double theta_integral(const std::function<double(double)>& g) {
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> r;
    gauss_legendre(24, r.first, r.second);
    return r;
  }();
  const auto& nodes = rule.first;
  const auto& weights = rule.second;
  const int panels = 16;
  const double h = (kPi / 2.0) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = p * h;
    double mid = a + 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * g(mid + 0.5 * h * nodes[i]);
    total += acc * 0.5 * h;
  }
  return total;
}

}  // namespace

double limit_profile(double T, const std::vector<double>& X, int d) {
  if (T <= 0.0) throw std::domain_error("limit_profile: time must be positive");
  if (static_cast<int>(X.size()) != d) throw std::invalid_argument("limit_profile: dimension mismatch");
  return theta_integral([&](double theta) {
    double lam = std::sin(theta);
    double s2 = lam * lam;
    if (lam * T <= 0.0) return 0.0;
    return (4.0 / kPi) * s2 * heat_kernel(lam * T, X, d);
  });
}

double limit_profile_integral(double T, int d, const TestFunction& phi) {
  if (T <= 0.0) throw std::domain_error("limit_profile_integral: time must be positive");
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> r;
    gauss_hermite(64, r.first, r.second);
    return r;
  }();
  const auto& hn = rule.first;
  const auto& hw = rule.second;
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);

  // E[phi(Z)] for Z with i.i.d. N(0, sigma^2) coordinates.
  auto gaussian_mean = [&](double sigma) {
    std::vector<double> X(d, 0.0);
    double total = 0.0;
    std::vector<int> idx(d, 0);
    while (true) {
      double w = 1.0;
      for (int c = 0; c < d; ++c) {
        X[c] = std::sqrt(2.0) * sigma * hn[idx[c]];
        w *= hw[idx[c]] * inv_sqrt_pi;
      }
      total += w * phi(X);
      int c = 0;
      for (; c < d; ++c) {
        if (++idx[c] < static_cast<int>(hn.size())) break;
        idx[c] = 0;
      }
      if (c == d) break;
    }
    return total;
  };

  return theta_integral([&](double theta) {
    double lam = std::sin(theta);
    double sigma = std::sqrt(lam * T / (d + 2));
    double inner = (sigma == 0.0) ? phi(std::vector<double>(d, 0.0)) : gaussian_mean(sigma);
    return (4.0 / kPi) * lam * lam * inner;
  });
}

std::vector<std::pair<std::string, TestFunction>> named_test_functions() {
  std::vector<std::pair<std::string, TestFunction>> fns;
  fns.emplace_back("one", [](const std::vector<double>&) { return 1.0; });
  fns.emplace_back("coordinate", [](const std::vector<double>& X) { return X[0]; });
  fns.emplace_back("gaussian", [](const std::vector<double>& X) {
    double r2 = 0.0;
    for (double c : X) r2 += c * c;
    return std::exp(-r2);
  });
  fns.emplace_back("cosine", [](const std::vector<double>& X) { return std::cos(X[0]); });
  // C^1 ramp between |X| = 1 and |X| = 2, approximating the indicator of |X| > 1.
  fns.emplace_back("far_indicator", [](const std::vector<double>& X) {
    double r2 = 0.0;
    for (double c : X) r2 += c * c;
    double r = std::sqrt(r2);
    if (r <= 1.0) return 0.0;
    if (r >= 2.0) return 1.0;
    double u = r - 1.0;
    return u * u * (3.0 - 2.0 * u);
  });
  return fns;
}

Theorem1Report theorem1_experiment(const LatticeConfig& cfg, EnsembleKind kind, double kappa,
                                   double T, int n_samples, std::uint64_t seed,
                                   const std::vector<std::pair<std::string, TestFunction>>& fns,
                                   int n_threads) {
  ScalingParams scaling(cfg, kappa, T);
  const std::int64_t vol = cfg.volume();
  const int nf = static_cast<int>(fns.size());

  // phi(x / scale) per site, evaluated once.
  std::vector<std::vector<double>> phi_grid(nf, std::vector<double>(vol));
  std::vector<double> X(cfg.d);
  for (std::int64_t x = 0; x < vol; ++x) {
    Site s = cfg.site_of_index(x);
    for (int c = 0; c < cfg.d; ++c) X[c] = s[c] / scaling.space_scale;
    for (int f = 0; f < nf; ++f) phi_grid[f][x] = fns[f].second(X);
  }

  Theorem1Report report{scaling, DiffusionProfile(cfg), {}, {}, {}, {}};
  report.profile.t = scaling.t;
  report.profile.n_samples = n_samples;
  report.profile.rho.assign(vol, 0.0);
  report.profile.stderr_.assign(vol, 0.0);

  std::vector<double> sum(vol, 0.0), comp(vol, 0.0), sumsq(vol, 0.0);
  std::vector<double> fsum(nf, 0.0), fsumsq(nf, 0.0);
  run_samples(cfg, kind, scaling.t, n_samples, seed, n_threads,
              [&](int, const std::vector<double>& prob) {
                for (std::int64_t x = 0; x < vol; ++x) {
                  double y = prob[x] - comp[x];
                  double s = sum[x] + y;
                  comp[x] = (s - sum[x]) - y;
                  sum[x] = s;
                  sumsq[x] += prob[x] * prob[x];
                }
                for (int f = 0; f < nf; ++f) {
                  double v = 0.0;
                  for (std::int64_t x = 0; x < vol; ++x) v += prob[x] * phi_grid[f][x];
                  fsum[f] += v;
                  fsumsq[f] += v * v;
                }
              });

  for (std::int64_t x = 0; x < vol; ++x) {
    double mean = sum[x] / n_samples;
    report.profile.rho[x] = mean;
    if (n_samples > 1) {
      double var = (sumsq[x] - n_samples * mean * mean) / (n_samples - 1);
      report.profile.stderr_[x] = std::sqrt(std::max(var, 0.0) / n_samples);
    }
  }
  for (int f = 0; f < nf; ++f) {
    report.names.push_back(fns[f].first);
    double mean = fsum[f] / n_samples;
    report.lhs.push_back(mean);
    double se = 0.0;
    if (n_samples > 1) {
      double var = (fsumsq[f] - n_samples * mean * mean) / (n_samples - 1);
      se = std::sqrt(std::max(var, 0.0) / n_samples);
    }
    report.lhs_stderr.push_back(se);
    if (T == 0.0)
      report.rhs.push_back(fns[f].second(std::vector<double>(cfg.d, 0.0)));
    else
      report.rhs.push_back(limit_profile_integral(T, cfg.d, fns[f].second));
  }
  return report;
}

}  // namespace bandlab
