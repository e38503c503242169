// bandlab: experiment driver for the band-matrix quantum diffusion lab.
//
// Subcommands: coeffs, evolve, diffusion, theorem1, deloc, diagrams, audit,
// limitlaw.  Each run writes a manifest.json (config echo, versions, timing,
// seeds) plus subcommand CSV/JSON artifacts into --out.  All numbers in CSVs
// come from library calls; re-running with the same config reproduces the
// payload bytes (timestamps live only in the manifest).
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 cap exceeded.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "bandlab/constants.hpp"
#include "bandlab/diagrams.hpp"
#include "bandlab/diffusion.hpp"
#include "bandlab/spectral.hpp"

using json = nlohmann::ordered_json;
using namespace bandlab;

namespace {

struct RunConfig {
  int d = 1;
  int N = 64;
  int W = 4;
  std::string kind = "hermitian";  // hermitian | bernoulli
  double kappa = 0.3;
  double T = 1.0;
  double t = -1.0;  // microscopic time; derived from (kappa, T) when < 0
  int n_samples = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "out";
  // subcommand extras
  double tol = constants::kEvolveTol;
  std::string method = "all";
  int M_override = 0;
  int n = 3, nprime = 3;
  int p = 2;
  int k_critical = 0;
  double eps = constants::kDelocEpsilon;
  int seeds = 20;
  double gamma = constants::kSubexpGamma;
  double K_subexp = constants::kSubexpK;
  int start = -1;
};

EnsembleKind parse_kind(const std::string& kind) {
  if (kind == "hermitian") return EnsembleKind::HermitianUnitCircle;
  if (kind == "bernoulli") return EnsembleKind::SymmetricBernoulli;
  throw std::invalid_argument("ensemble kind must be 'hermitian' or 'bernoulli'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : os_(path) {
    if (!os_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << "\r\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\r\n";
  }

 private:
  std::ofstream os_;
};

json config_echo(const RunConfig& cfg) {
  json j;
  j["d"] = cfg.d;
  j["N"] = cfg.N;
  j["W"] = cfg.W;
  j["kind"] = cfg.kind;
  j["kappa"] = cfg.kappa;
  j["T"] = cfg.T;
  j["t"] = cfg.t;
  j["n_samples"] = cfg.n_samples;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["tol"] = cfg.tol;
  return j;
}

void write_manifest(const RunConfig& cfg, const std::string& command, json results,
                    double wall_seconds) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = "0.1.0";
  manifest["config"] = config_echo(cfg);
  manifest["tolerances"] = {
      {"cheb_vs_dense", constants::kTolChebVsDense},
      {"nb_vs_dense", constants::kTolNbVsDense},
      {"alpha_orthonormality", constants::kTolAlphaOrthonormality},
      {"limit_cdf", constants::kTolLimitCdf},
      {"theorem1", constants::kTolTheorem1},
      {"ladder_tv", constants::kTolLadderTV},
      {"quadrature", constants::kTolQuadrature},
  };
  manifest["results"] = std::move(results);
  manifest["wall_clock_seconds"] = wall_seconds;
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&now));
  manifest["timestamp"] = buf;
  std::ofstream os(std::filesystem::path(cfg.out) / "manifest.json");
  os << manifest.dump(2) << "\n";
}

double resolve_time(const RunConfig& cfg) {
  if (cfg.t >= 0.0) return cfg.t;
  return std::pow(static_cast<double>(cfg.W), cfg.d * cfg.kappa) * cfg.T;
}

std::string site_coords(const LatticeConfig& lat, std::int64_t idx) {
  Site s = lat.site_of_index(idx);
  std::string out;
  for (int c = 0; c < lat.d; ++c) out += (c ? ";" : "") + std::to_string(s[c]);
  return out;
}

json run_coeffs(const RunConfig& cfg) {
  const double t = cfg.t >= 0.0 ? cfg.t : 150.0;
  ChebCoefficients tab = alpha_table(t);
  CsvWriter alpha_csv(std::filesystem::path(cfg.out) / "alpha.csv",
                      {"k", "re_alpha", "im_alpha", "abs_sq"});
  double mass = 0.0;
  for (int k = 0; k <= tab.K; ++k) {
    mass += std::norm(tab.alphas[k]);
    alpha_csv.row({std::to_string(k), fmt(tab.alphas[k].real()), fmt(tab.alphas[k].imag()),
                   fmt(std::norm(tab.alphas[k]))});
  }

  CsvWriter cdf_csv(std::filesystem::path(cfg.out) / "cdf.csv",
                    {"lambda", "F_t", "F", "f_t", "f"});
  for (double lam = 0.0; lam <= 1.2 + 1e-9; lam += 0.005) {
    double ft = lam < 1.0 ? empirical_density(tab, lam) : 0.0;
    double f = lam < 1.0 ? limit_density(lam) : 0.0;
    cdf_csv.row({fmt(lam), fmt(empirical_cdf(tab, lam)), fmt(limit_cdf(lam)), fmt(ft), fmt(f)});
  }

  json results;
  results["t"] = t;
  results["K"] = tab.K;
  results["alpha_mass"] = mass;
  if (cfg.M_override >= 2) {
    ACoefficients at = a_table(t, cfg.M_override, tab.K, cfg.tol);
    CsvWriter a_csv(std::filesystem::path(cfg.out) / "a.csv", {"m", "re_a", "im_a"});
    for (int m = 0; m <= tab.K; ++m)
      a_csv.row({std::to_string(m), fmt(at.a[m].real()), fmt(at.a[m].imag())});
    results["M"] = cfg.M_override;
  }
  return results;
}

json run_evolve(const RunConfig& cfg) {
  LatticeConfig lat(cfg.d, cfg.N, cfg.W);
  BandMatrix H = BandMatrix::sample(lat, parse_kind(cfg.kind), cfg.seed);
  const double t = resolve_time(cfg);

  std::vector<std::pair<std::string, PropagatorResult>> runs;
  if (cfg.method == "cheb" || cfg.method == "all")
    runs.emplace_back("chebyshev", chebyshev_evolve(H, t, cfg.tol, cfg.start));
  if (cfg.method == "nb" || cfg.method == "all")
    runs.emplace_back("nonbacktracking", nonbacktracking_evolve(H, t, cfg.tol, cfg.start));
  if ((cfg.method == "dense" || cfg.method == "all") && lat.volume() <= constants::kDenseCap)
    runs.emplace_back("dense", dense_oracle_evolve(H, t, cfg.start));
  if (runs.empty()) throw std::invalid_argument("no evolution method selected (or dense cap hit)");

  std::vector<std::string> header{"index", "coords"};
  for (const auto& [name, r] : runs) {
    header.push_back("re_" + name);
    header.push_back("im_" + name);
    header.push_back("prob_" + name);
  }
  CsvWriter csv(std::filesystem::path(cfg.out) / "psi.csv", header);
  for (std::int64_t x = 0; x < lat.volume(); ++x) {
    std::vector<std::string> cells{std::to_string(x), site_coords(lat, x)};
    for (const auto& [name, r] : runs) {
      cells.push_back(fmt(r.psi[x].real()));
      cells.push_back(fmt(r.psi[x].imag()));
      cells.push_back(fmt(std::norm(r.psi[x])));
    }
    csv.row(cells);
  }

  json results;
  results["t"] = t;
  for (const auto& [name, r] : runs) {
    results[name] = {{"truncation", r.truncation},
                     {"residual_bound", r.residual_bound},
                     {"norm", norm2(r.psi)},
                     {"rescaled", r.rescaled}};
  }
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      double dist = 0.0;
      for (std::int64_t x = 0; x < lat.volume(); ++x)
        dist += std::norm(runs[a].second.psi[x] - runs[b].second.psi[x]);
      results["distance_" + runs[a].first + "_" + runs[b].first] = std::sqrt(dist);
    }
  return results;
}

json run_diffusion(const RunConfig& cfg) {
  LatticeConfig lat(cfg.d, cfg.N, cfg.W);
  const double t = resolve_time(cfg);
  DiffusionProfile prof =
      estimate_rho(lat, parse_kind(cfg.kind), t, cfg.n_samples, cfg.seed, cfg.threads);
  std::vector<double> ladder = ladder_prediction(lat, t);

  const double eta = std::pow(static_cast<double>(cfg.W), cfg.d * cfg.kappa);
  ScalingParams sc(lat, cfg.kappa, t / eta);
  const double scale = sc.space_scale;
  const double cell = std::pow(scale, -cfg.d);  // macroscopic density per site

  CsvWriter csv(std::filesystem::path(cfg.out) / "profile.csv",
                {"index", "coords", "rho", "stderr", "ladder_prediction", "L_scaled"});
  double tv = 0.0;
  std::vector<double> X(cfg.d);
  for (std::int64_t x = 0; x < lat.volume(); ++x) {
    Site s = lat.site_of_index(x);
    for (int c = 0; c < cfg.d; ++c) X[c] = s[c] / scale;
    double lsc = sc.T > 0.0 ? limit_profile(sc.T, X, cfg.d) * cell : 0.0;
    csv.row({std::to_string(x), site_coords(lat, x), fmt(prof.rho[x]), fmt(prof.stderr_[x]),
             fmt(ladder[x]), fmt(lsc)});
    tv += std::abs(prof.rho[x] - ladder[x]);
  }
  json results;
  results["t"] = t;
  results["T"] = sc.T;
  results["n_samples"] = cfg.n_samples;
  results["tv_rho_ladder"] = 0.5 * tv;
  results["uniformity_ok"] = ScalingParams::uniformity_ok(lat);
  return results;
}

json run_theorem1(const RunConfig& cfg) {
  LatticeConfig lat(cfg.d, cfg.N, cfg.W);
  if (!ScalingParams::uniformity_ok(lat))
    std::fprintf(stderr, "warning: N < W^{1+d/6}, the uniform regime is not reached\n");
  auto fns = named_test_functions();
  Theorem1Report rep = theorem1_experiment(lat, parse_kind(cfg.kind), cfg.kappa, cfg.T,
                                           cfg.n_samples, cfg.seed, fns, cfg.threads);
  CsvWriter csv(std::filesystem::path(cfg.out) / "theorem1.csv",
                {"phi", "lhs", "lhs_stderr", "rhs", "abs_gap"});
  json per_fn = json::array();
  for (std::size_t f = 0; f < fns.size(); ++f) {
    csv.row({rep.names[f], fmt(rep.lhs[f]), fmt(rep.lhs_stderr[f]), fmt(rep.rhs[f]),
             fmt(std::abs(rep.lhs[f] - rep.rhs[f]))});
    per_fn.push_back({{"phi", rep.names[f]},
                      {"lhs", rep.lhs[f]},
                      {"stderr", rep.lhs_stderr[f]},
                      {"rhs", rep.rhs[f]}});
  }

  std::vector<double> ladder = ladder_prediction(lat, rep.scaling.t);
  double tv = 0.0;
  for (std::int64_t x = 0; x < lat.volume(); ++x) tv += std::abs(rep.profile.rho[x] - ladder[x]);

  CsvWriter prof_csv(std::filesystem::path(cfg.out) / "profile.csv",
                     {"index", "coords", "rho", "stderr", "ladder_prediction"});
  for (std::int64_t x = 0; x < lat.volume(); ++x)
    prof_csv.row({std::to_string(x), site_coords(lat, x), fmt(rep.profile.rho[x]),
                  fmt(rep.profile.stderr_[x]), fmt(ladder[x])});

  json results;
  results["eta"] = rep.scaling.eta;
  results["t"] = rep.scaling.t;
  results["space_scale"] = rep.scaling.space_scale;
  results["test_functions"] = per_fn;
  results["tv_rho_ladder"] = 0.5 * tv;
  results["uniformity_ok"] = ScalingParams::uniformity_ok(lat);
  return results;
}

json run_deloc(const RunConfig& cfg) {
  LatticeConfig lat(cfg.d, cfg.N, cfg.W);
  const double ell = theorem_scale(lat, cfg.kappa);
  CsvWriter csv(std::filesystem::path(cfg.out) / "deloc.csv",
                {"seed", "alpha", "eigenvalue", "functional", "member", "subexp_member"});
  double fraction_sum = 0.0;
  json per_seed = json::array();
  for (int s = 0; s < cfg.seeds; ++s) {
    std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
    BandMatrix H = BandMatrix::sample(lat, parse_kind(cfg.kind), seed);
    EigenSystem es = dense_eigensystem(H);
    LocalizationReport rep = localized_fraction(es, cfg.eps, ell);
    SubexpReport sub = subexponential_set(es, ell, cfg.gamma, cfg.K_subexp);
    std::vector<char> is_sub(lat.volume(), 0);
    for (int a : sub.members) is_sub[a] = 1;
    std::vector<char> is_member(lat.volume(), 0);
    for (int a : rep.members) is_member[a] = 1;
    for (std::int64_t a = 0; a < lat.volume(); ++a)
      csv.row({std::to_string(seed), std::to_string(a), fmt(es.eigenvalues[a]),
               fmt(rep.functional[a]), std::to_string(static_cast<int>(is_member[a])),
               std::to_string(static_cast<int>(is_sub[a]))});
    fraction_sum += rep.fraction;
    per_seed.push_back(
        {{"seed", seed}, {"fraction", rep.fraction}, {"subexp_count", sub.members.size()}});
  }
  json results;
  results["ell"] = ell;
  results["eps"] = cfg.eps;
  results["mean_fraction"] = fraction_sum / cfg.seeds;
  results["per_seed"] = per_seed;
  return results;
}

json run_diagrams(const RunConfig& cfg) {
  using namespace bandlab::diagrams;
  Census c = census(cfg.n, cfg.nprime);
  json j;
  j["n"] = c.n;
  j["nprime"] = c.nprime;
  j["pairings_total"] = c.pairings_total;
  j["pairings_admissible"] = c.pairings_admissible;
  j["nonladder_admissible"] = c.nonladder_admissible;
  j["skeleton_classes"] = c.skeleton_classes;
  j["orbit_count_histogram"] = c.orbit_count_histogram;
  j["two_thirds_margins"] = c.two_thirds_margin;

  json listing = json::array();
  enumerate_pairings({cfg.n, cfg.nprime}, false, [&](const Pairing& p) {
    json entry;
    entry["bridges"] = json::array();
    for (auto [a, b] : p.bridges()) entry["bridges"].push_back({a, b});
    entry["admissible"] = is_admissible(p);
    entry["ladder"] = is_ladder(p);
    listing.push_back(entry);
  });
  j["pairings"] = std::move(listing);

  if (cfg.k_critical >= 1) {
    Skeleton s = critical_skeleton(cfg.k_critical);
    OrbitMap om = orbit_analysis(s);
    json crit;
    crit["k"] = cfg.k_critical;
    crit["mbar"] = s.loop.total() / 2;
    crit["L"] = om.L;
    crit["saturates"] = (3 * om.L == 2 * (s.loop.total() / 2) + 1);
    crit["bridges"] = json::array();
    for (auto [a, b] : s.bridges()) crit["bridges"].push_back({a, b});
    j["critical_skeleton"] = crit;
  }

  std::ofstream os(std::filesystem::path(cfg.out) / "census.json");
  os << j.dump(2) << "\n";
  json results;
  results["pairings_total"] = c.pairings_total;
  results["skeleton_classes"] = c.skeleton_classes;
  return results;
}

json run_audit(const RunConfig& cfg) {
  LatticeConfig lat(cfg.d, cfg.N, cfg.W);
  auto rows = bandlab::diagrams::bound_audit(cfg.p, lat);
  CsvWriter csv(std::filesystem::path(cfg.out) / "audit.csv",
                {"n", "nprime", "mbar", "ell_bar", "lhs", "rhs", "pass"});
  long long failures = 0;
  for (const auto& r : rows) {
    csv.row({std::to_string(r.n), std::to_string(r.nprime), std::to_string(r.mbar),
             std::to_string(r.ell_bar), fmt(r.lhs), fmt(r.rhs), std::to_string(r.pass ? 1 : 0)});
    if (!r.pass) ++failures;
  }
  json results;
  results["p"] = cfg.p;
  results["rows"] = rows.size();
  results["failures"] = failures;
  if (failures > 0) throw std::runtime_error("bound audit found violations");
  return results;
}

json run_limitlaw(const RunConfig& cfg) {
  const double T = cfg.T;
  CsvWriter csv(std::filesystem::path(cfg.out) / "limitlaw.csv", {"X", "G", "L"});
  for (double x = -4.0; x <= 4.0 + 1e-9; x += 0.01)
    csv.row({fmt(x), fmt(heat_kernel(T, {x}, 1)), fmt(limit_profile(T, {x}, 1))});

  auto fns = named_test_functions();
  json results;
  results["T"] = T;
  results["mass"] = limit_profile_integral(T, cfg.d, fns[0].second);
  results["second_moment_over_dT"] =
      limit_profile_integral(T, cfg.d,
                             [](const std::vector<double>& X) {
                               double r2 = 0.0;
                               for (double c : X) r2 += c * c;
                               return r2;
                             }) /
      (static_cast<double>(cfg.d) * T / (cfg.d + 2));
  return results;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"band-matrix quantum diffusion laboratory"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override file values");
    sub->add_option("--d", cfg.d, "lattice dimension");
    sub->add_option("--N", cfg.N, "lattice side length");
    sub->add_option("--W", cfg.W, "band width");
    sub->add_option("--kind", cfg.kind, "ensemble: hermitian | bernoulli");
    sub->add_option("--kappa", cfg.kappa, "scaling exponent in (0, 1/3)");
    sub->add_option("--T", cfg.T, "macroscopic time");
    sub->add_option("--t", cfg.t, "microscopic time (overrides kappa/T)");
    sub->add_option("--samples", cfg.n_samples, "Monte Carlo samples");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    sub->add_option("--tol", cfg.tol, "series tolerance");
    sub->add_option("--out", cfg.out, "output directory");
  };

  CLI::App* coeffs = app.add_subcommand("coeffs", "Chebyshev coefficient and limit-law tables");
  add_common(coeffs);
  coeffs->add_option("--M", cfg.M_override, "also emit a_m(t) for this shell size");

  CLI::App* evolve = app.add_subcommand("evolve", "propagate delta_0 and compare methods");
  add_common(evolve);
  evolve->add_option("--method", cfg.method, "cheb | nb | dense | all");
  evolve->add_option("--start", cfg.start, "start site index (-1 = origin)");

  CLI::App* diffusion = app.add_subcommand("diffusion", "Monte Carlo diffusion profile");
  add_common(diffusion);

  CLI::App* theorem1 = app.add_subcommand("theorem1", "macroscopic diffusion comparison");
  add_common(theorem1);

  CLI::App* deloc = app.add_subcommand("deloc", "eigenvector delocalization experiment");
  add_common(deloc);
  deloc->add_option("--eps", cfg.eps, "localization tolerance");
  deloc->add_option("--seeds", cfg.seeds, "number of sampled systems");
  deloc->add_option("--gamma", cfg.gamma, "subexponential exponent");
  deloc->add_option("--K", cfg.K_subexp, "subexponential mass bound");

  CLI::App* diagrams_cmd = app.add_subcommand("diagrams", "pairing census");
  add_common(diagrams_cmd);
  diagrams_cmd->add_option("--n", cfg.n, "first path length");
  diagrams_cmd->add_option("--nprime", cfg.nprime, "second path length");
  diagrams_cmd->add_option("--critical", cfg.k_critical, "include the critical skeleton for k");

  CLI::App* audit = app.add_subcommand("audit", "skeleton bound audit");
  add_common(audit);
  audit->add_option("--p", cfg.p, "half loop size nbar");

  CLI::App* limitlaw = app.add_subcommand("limitlaw", "heat-kernel superposition tables");
  add_common(limitlaw);

  // First pass: find --config, load it, then let the real parse override.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream is(argv[i + 1]);
      if (!is) {
        std::fprintf(stderr, "error: cannot read config %s\n", argv[i + 1]);
        return 2;
      }
      try {
        json j = json::parse(is);
        if (j.contains("d")) cfg.d = j["d"];
        if (j.contains("N")) cfg.N = j["N"];
        if (j.contains("W")) cfg.W = j["W"];
        if (j.contains("kind")) cfg.kind = j["kind"];
        if (j.contains("kappa")) cfg.kappa = j["kappa"];
        if (j.contains("T")) cfg.T = j["T"];
        if (j.contains("t")) cfg.t = j["t"];
        if (j.contains("n_samples")) cfg.n_samples = j["n_samples"];
        if (j.contains("seed")) cfg.seed = j["seed"];
        if (j.contains("threads")) cfg.threads = j["threads"];
        if (j.contains("tol")) cfg.tol = j["tol"];
        if (j.contains("out")) cfg.out = j["out"];
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: bad config: %s\n", e.what());
        return 2;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(cfg.out);
    json results;
    std::string command;
    if (coeffs->parsed()) {
      command = "coeffs";
      results = run_coeffs(cfg);
    } else if (evolve->parsed()) {
      command = "evolve";
      results = run_evolve(cfg);
    } else if (diffusion->parsed()) {
      command = "diffusion";
      results = run_diffusion(cfg);
    } else if (theorem1->parsed()) {
      command = "theorem1";
      results = run_theorem1(cfg);
    } else if (deloc->parsed()) {
      command = "deloc";
      results = run_deloc(cfg);
    } else if (diagrams_cmd->parsed()) {
      command = "diagrams";
      results = run_diagrams(cfg);
    } else if (audit->parsed()) {
      command = "audit";
      results = run_audit(cfg);
    } else if (limitlaw->parsed()) {
      command = "limitlaw";
      results = run_limitlaw(cfg);
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(cfg, command, std::move(results), wall);
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    bool cap = msg.find("cap") != std::string::npos || msg.find("exceed") != std::string::npos;
    return cap ? 4 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
