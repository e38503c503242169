#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bandlab {

using Site = std::vector<int>;  // canonical coordinates, one entry per dimension

// Periodic d-dimensional lattice of side N with a band of width W.
// Canonical coordinates live in the window {-[N/2], ..., N-1-[N/2]}.
struct LatticeConfig {
  int d = 1;
  int N = 0;
  int W = 0;

  LatticeConfig(int d_, int N_, int W_);

  std::int64_t volume() const { return volume_; }    // N^d
  int shell_size() const { return static_cast<int>(shell_.size()); }  // M
  const std::vector<Site>& band_shell() const { return shell_; }

  // Canonical representative of the class of c mod N, per coordinate.
  int canonical_coord(long long c) const;
  Site canonical(const Site& s) const;

  // Row-major flattening of canonical sites onto [0, N^d).
  std::int64_t site_index(const Site& a) const;
  Site site_of_index(std::int64_t idx) const;

  // inf over nu in Z^d of |a - b + N nu| in the Euclidean norm.
  double periodic_distance(const Site& a, const Site& b) const;
  double periodic_norm(const Site& a) const;
  // Squared periodic norm as an exact integer.
  std::int64_t periodic_norm_sq(const Site& a) const;

  // Periodic addition, canonical result.
  Site add(const Site& a, const Site& b) const;
  Site negate(const Site& a) const;
  std::int64_t add_index(std::int64_t idx, const Site& offset) const;

  // Index of the origin site.
  std::int64_t origin_index() const;

 private:
  std::int64_t volume_ = 0;
  std::vector<Site> shell_;       // all offsets u with 1 <= |u| <= W
  std::vector<std::int64_t> strides_;
};

// Number of lattice points with 1 <= |x| <= W, independent of any lattice.
int shell_point_count(int d, int W);

}  // namespace bandlab
