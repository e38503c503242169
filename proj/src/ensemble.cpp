#include "bandlab/ensemble.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "bandlab/rng.hpp"

namespace bandlab {

BandMatrix::BandMatrix(const LatticeConfig& cfg, EnsembleKind kind, std::uint64_t seed)
    : cfg_(cfg), kind_(kind), seed_(seed), M_(cfg.shell_size()) {
  const std::int64_t n = cfg_.volume();
  entries_.resize(static_cast<std::size_t>(n) * M_);
  neighbors_.resize(static_cast<std::size_t>(n) * M_);
}

BandMatrix BandMatrix::sample(const LatticeConfig& cfg, EnsembleKind kind, std::uint64_t seed) {
  BandMatrix H(cfg, kind, seed);
  const int M = H.M_;
  const std::int64_t n = cfg.volume();
  const auto& shell = cfg.band_shell();
  const double radius = 1.0 / std::sqrt(static_cast<double>(M - 1));

  // slot of -u for each shell slot u
  std::vector<int> neg_slot(M);
  for (int j = 0; j < M; ++j) {
    Site neg = cfg.negate(shell[j]);
    int found = -1;
    for (int k = 0; k < M; ++k)
      if (shell[k] == neg) { found = k; break; }
    neg_slot[j] = found;
  }

  for (std::int64_t x = 0; x < n; ++x)
    for (int j = 0; j < M; ++j)
      H.neighbors_[static_cast<std::size_t>(x) * M + j] = cfg.add_index(x, shell[j]);

  // One draw per unordered pair, keyed by the representative (smaller site
  // index) so values are independent of traversal order.
  for (std::int64_t x = 0; x < n; ++x) {
    for (int j = 0; j < M; ++j) {
      std::int64_t y = H.neighbors_[static_cast<std::size_t>(x) * M + j];
      if (x > y) continue;  // handled from the other side
      std::uint64_t pair_key = static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(M) +
                               static_cast<std::uint64_t>(j);
      std::uint64_t bits = counter_rng(seed, 0x62616e64ULL, pair_key);
      Complex v;
      if (kind == EnsembleKind::SymmetricBernoulli) {
        v = Complex((bits & 1) ? radius : -radius, 0.0);
      } else {
        double angle = 2.0 * std::numbers::pi * uniform01(bits);
        v = Complex(radius * std::cos(angle), radius * std::sin(angle));
      }
      H.entries_[static_cast<std::size_t>(x) * M + j] = v;
      H.entries_[static_cast<std::size_t>(y) * M + neg_slot[j]] = std::conj(v);
    }
  }
  return H;
}

void BandMatrix::apply(const Complex* v, Complex* out) const {
  const std::int64_t n = cfg_.volume();
  const int M = M_;
  for (std::int64_t x = 0; x < n; ++x) {
    Complex acc = 0.0;
    const Complex* row = entries_.data() + static_cast<std::size_t>(x) * M;
    const std::int64_t* nb = neighbors_.data() + static_cast<std::size_t>(x) * M;
    for (int j = 0; j < M; ++j) acc += row[j] * v[nb[j]];
    out[x] = acc;
  }
}

ComplexVector BandMatrix::apply(const ComplexVector& v) const {
  if (static_cast<std::int64_t>(v.size()) != cfg_.volume())
    throw std::invalid_argument("apply: vector length does not match lattice volume");
  ComplexVector out(v.size());
  apply(v.data(), out.data());
  return out;
}

double BandMatrix::second_moment() const {
  const std::int64_t n = cfg_.volume();
  double total = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) total += std::norm(entries_[i]);
  return total / static_cast<double>(n);
}

std::vector<ComplexVector> BandMatrix::dense() const {
  const std::int64_t n = cfg_.volume();
  std::vector<ComplexVector> rows(n, ComplexVector(n, Complex(0.0)));
  for (std::int64_t x = 0; x < n; ++x)
    for (int j = 0; j < M_; ++j)
      rows[x][neighbor(x, j)] += entry(x, j);
  return rows;
}

void BandMatrix::dump(std::ostream& os) const {
  auto put64 = [&os](std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
  put64(cfg_.d);
  put64(cfg_.N);
  put64(cfg_.W);
  put64(kind_ == EnsembleKind::SymmetricBernoulli ? 1 : 0);
  put64(static_cast<std::int64_t>(seed_));
  os.write(reinterpret_cast<const char*>(entries_.data()),
           static_cast<std::streamsize>(entries_.size() * sizeof(Complex)));
}

BandMatrix BandMatrix::load(std::istream& is) {
  auto get64 = [&is]() {
    std::int64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  };
  int d = static_cast<int>(get64());
  int N = static_cast<int>(get64());
  int W = static_cast<int>(get64());
  EnsembleKind kind = get64() ? EnsembleKind::SymmetricBernoulli : EnsembleKind::HermitianUnitCircle;
  std::uint64_t seed = static_cast<std::uint64_t>(get64());
  LatticeConfig cfg(d, N, W);
  BandMatrix H = sample(cfg, kind, seed);  // rebuild neighbor table
  is.read(reinterpret_cast<char*>(H.entries_.data()),
          static_cast<std::streamsize>(H.entries_.size() * sizeof(Complex)));
  if (!is) throw std::runtime_error("load: truncated band matrix stream");
  return H;
}

}  // namespace bandlab
