#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bandlab/lattice.hpp"

namespace bandlab {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

enum class EnsembleKind { HermitianUnitCircle, SymmetricBernoulli };

// One sampled band matrix H.  Entries live on the shell 1 <= |x-y| <= W and
// have modulus exactly 1/sqrt(M-1); each unordered pair is drawn once and
// mirrored by conjugation.  Immutable after sampling.
class BandMatrix {
 public:
  static BandMatrix sample(const LatticeConfig& cfg, EnsembleKind kind, std::uint64_t seed);

  const LatticeConfig& cfg() const { return cfg_; }
  EnsembleKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  // Entry H_{x, x+u_j} where u_j is the j-th shell offset.
  Complex entry(std::int64_t site, int shell_slot) const {
    return entries_[static_cast<std::size_t>(site) * M_ + shell_slot];
  }
  // Flattened index of x + u_j.
  std::int64_t neighbor(std::int64_t site, int shell_slot) const {
    return neighbors_[static_cast<std::size_t>(site) * M_ + shell_slot];
  }
  int shell_size() const { return M_; }

  // y = H v.  Throws on dimension mismatch.
  void apply(const Complex* v, Complex* out) const;
  ComplexVector apply(const ComplexVector& v) const;

  // (1/|A|) tr H^2 computed entrywise; equals M/(M-1) exactly by construction.
  double second_moment() const;

  // Dense materialization for small lattices (test support).
  std::vector<ComplexVector> dense() const;

  // Binary fixture format: header (d, N, W, kind, seed), then the stored
  // entries in slot order.
  void dump(std::ostream& os) const;
  static BandMatrix load(std::istream& is);

 private:
  BandMatrix(const LatticeConfig& cfg, EnsembleKind kind, std::uint64_t seed);

  LatticeConfig cfg_;
  EnsembleKind kind_;
  std::uint64_t seed_;
  int M_;
  std::vector<Complex> entries_;        // row-major: site * M + slot
  std::vector<std::int64_t> neighbors_; // same layout
};

}  // namespace bandlab
