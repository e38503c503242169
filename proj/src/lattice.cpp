#include "bandlab/lattice.hpp"

#include <cmath>
#include <cstdlib>

namespace bandlab {

namespace {

// Enumerate all integer vectors u in [-W, W]^d with 1 <= |u| <= W.
void enumerate_shell(int d, int W, Site& work, int coord, std::int64_t norm_sq_so_far,
                     std::vector<Site>& out) {
  if (coord == d) {
    if (norm_sq_so_far >= 1 && norm_sq_so_far <= static_cast<std::int64_t>(W) * W)
      out.push_back(work);
    return;
  }
  for (int c = -W; c <= W; ++c) {
    work[coord] = c;
    enumerate_shell(d, W, work, coord + 1,
                    norm_sq_so_far + static_cast<std::int64_t>(c) * c, out);
  }
}

}  // namespace

int shell_point_count(int d, int W) {
  std::vector<Site> shell;
  Site work(d, 0);
  enumerate_shell(d, W, work, 0, 0, shell);
  return static_cast<int>(shell.size());
}

LatticeConfig::LatticeConfig(int d_, int N_, int W_) : d(d_), N(N_), W(W_) {
  if (d < 1) throw std::invalid_argument("lattice: dimension must be >= 1");
  if (N < 3) throw std::invalid_argument("lattice: side length must be >= 3");
  // W = 1 (M = 2 in d = 1) is accepted as a desk-scale configuration.
  if (W < 1) throw std::invalid_argument("lattice: band width must be >= 1");
  if (2 * W >= N) throw std::invalid_argument("lattice: need W < N/2 so the band shell does not wrap");

  volume_ = 1;
  for (int i = 0; i < d; ++i) volume_ *= N;

  strides_.assign(d, 1);
  for (int i = d - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * N;

  Site work(d, 0);
  enumerate_shell(d, W, work, 0, 0, shell_);
  if (static_cast<int>(shell_.size()) < 2)
    throw std::invalid_argument("lattice: band shell must contain at least 2 sites");
}

int LatticeConfig::canonical_coord(long long c) const {
  long long lo = -(N / 2);
  long long r = ((c % N) + N) % N;        // in [0, N)
  if (r >= N + lo) r -= N;                // shift down into the window
  return static_cast<int>(r);
}

Site LatticeConfig::canonical(const Site& s) const {
  Site out(d);
  for (int i = 0; i < d; ++i) out[i] = canonical_coord(s[i]);
  return out;
}

std::int64_t LatticeConfig::site_index(const Site& a) const {
  std::int64_t idx = 0;
  int half = N / 2;
  for (int i = 0; i < d; ++i) idx += static_cast<std::int64_t>(a[i] + half) * strides_[i];
  return idx;
}

Site LatticeConfig::site_of_index(std::int64_t idx) const {
  Site out(d);
  int half = N / 2;
  for (int i = 0; i < d; ++i) {
    out[i] = static_cast<int>(idx / strides_[i]) - half;
    idx %= strides_[i];
  }
  return out;
}

std::int64_t LatticeConfig::periodic_norm_sq(const Site& a) const {
  std::int64_t total = 0;
  for (int i = 0; i < d; ++i) {
    long long r = ((static_cast<long long>(a[i]) % N) + N) % N;
    long long w = std::min(r, static_cast<long long>(N) - r);
    total += w * w;
  }
  return total;
}

double LatticeConfig::periodic_norm(const Site& a) const {
  return std::sqrt(static_cast<double>(periodic_norm_sq(a)));
}

double LatticeConfig::periodic_distance(const Site& a, const Site& b) const {
  Site diff(d);
  for (int i = 0; i < d; ++i) diff[i] = a[i] - b[i];
  return periodic_norm(diff);
}

Site LatticeConfig::add(const Site& a, const Site& b) const {
  Site out(d);
  for (int i = 0; i < d; ++i) out[i] = canonical_coord(static_cast<long long>(a[i]) + b[i]);
  return out;
}

Site LatticeConfig::negate(const Site& a) const {
  Site out(d);
  for (int i = 0; i < d; ++i) out[i] = canonical_coord(-static_cast<long long>(a[i]));
  return out;
}

std::int64_t LatticeConfig::add_index(std::int64_t idx, const Site& offset) const {
  std::int64_t out = 0;
  int half = N / 2;
  for (int i = 0; i < d; ++i) {
    int coord = static_cast<int>(idx / strides_[i]) - half;
    idx %= strides_[i];
    out += static_cast<std::int64_t>(canonical_coord(static_cast<long long>(coord) + offset[i]) + half) *
           strides_[i];
  }
  return out;
}

std::int64_t LatticeConfig::origin_index() const {
  Site origin(d, 0);
  return site_index(origin);
}

}  // namespace bandlab
