#include "bandlab/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bandlab/constants.hpp"
#include "bandlab/rng.hpp"

namespace bandlab::diagrams {

namespace {

constexpr int kEnumerationCap = 14;   // edges; (2p-1)!! pairings beyond this
constexpr int kValueCapEdges = 8;     // exhaustive label enumeration caps
constexpr int kValueCapVolume = 8;

long long double_factorial_odd(int edges) {
  long long v = 1;
  for (int k = edges - 1; k >= 1; k -= 2) v *= k;
  return v;
}

int m_vertex(const EdgeLoop& loop) { return loop.n % std::max(loop.total(), 1); }

}  // namespace

std::vector<std::pair<int, int>> Pairing::bridges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < static_cast<int>(partner.size()); ++i)
    if (i < partner[i]) out.emplace_back(i, partner[i]);
  return out;
}

std::vector<std::pair<int, int>> Skeleton::bridges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < static_cast<int>(partner.size()); ++i)
    if (i < partner[i]) out.emplace_back(i, partner[i]);
  return out;
}

long long Skeleton::total_multiplicity() const {
  long long total = 0;
  for (int i = 0; i < static_cast<int>(partner.size()); ++i)
    if (i < partner[i]) total += multiplicity[i];
  return total;
}

bool edges_separated(const EdgeLoop& loop, int i, int j) {
  const int V = loop.total();
  const int m = m_vertex(loop);
  if (i > j) std::swap(i, j);
  (void)V;
  // Arc from e_i forward to e_j: j-i-1 edges in between, separating vertices
  // {i+1, ..., j}.  The complementary arc always passes the vertex 0.
  if (j - i - 1 >= 2) return true;
  return i + 1 <= m && m <= j;
}

bool is_admissible(const Pairing& p) {
  for (auto [i, j] : p.bridges())
    if (!edges_separated(p.loop, i, j)) return false;
  return true;
}

bool is_ladder(const Pairing& p) {
  if (p.loop.n != p.loop.nprime || p.loop.n < 1) return false;
  const int V = p.loop.total();
  for (int i = 0; i < V; ++i)
    if (p.partner[i] != V - 1 - i) return false;
  return true;
}

Pairing ladder(int n) {
  if (n < 1) throw std::invalid_argument("ladder: need n >= 1");
  Pairing p;
  p.loop = {n, n};
  p.partner.resize(2 * n);
  for (int i = 0; i < 2 * n; ++i) p.partner[i] = 2 * n - 1 - i;
  return p;
}

void enumerate_pairings(const EdgeLoop& loop, bool admissible_only,
                        const std::function<void(const Pairing&)>& yield) {
  const int E = loop.total();
  if (E % 2 != 0) throw std::invalid_argument("enumerate_pairings: need an even number of edges");
  if (E > kEnumerationCap)
    throw std::invalid_argument("enumerate_pairings: " + std::to_string(E) +
                                " edges would stream " +
                                std::to_string(double_factorial_odd(E)) + " pairings; cap is " +
                                std::to_string(kEnumerationCap));
  if (E == 0) return;

  Pairing p;
  p.loop = loop;
  p.partner.assign(E, -1);

  // Match the smallest unpaired edge with every later one.
  std::function<void()> rec = [&]() {
    int i = 0;
    while (i < E && p.partner[i] >= 0) ++i;
    if (i == E) {
      yield(p);
      return;
    }
    for (int j = i + 1; j < E; ++j) {
      if (p.partner[j] >= 0) continue;
      if (admissible_only && !edges_separated(loop, i, j)) continue;
      p.partner[i] = j;
      p.partner[j] = i;
      rec();
      p.partner[i] = -1;
      p.partner[j] = -1;
    }
  };
  rec();
}

std::vector<Pairing> all_pairings(const EdgeLoop& loop, bool admissible_only) {
  std::vector<Pairing> out;
  enumerate_pairings(loop, admissible_only, [&](const Pairing& p) { out.push_back(p); });
  return out;
}

namespace {

// Mutable loop state shared by collapse and expansion.
struct LoopWork {
  int V = 0;
  int m = 0;
  std::vector<int> partner;
  std::vector<long long> mult;
};

// All currently collapsible pairs, reported as the edge i of the outer
// bridge {e_i, e_j}; the parallel partner is {e_{i+1}, e_{j-1}}.
std::vector<int> parallel_sites(const LoopWork& w) {
  std::vector<int> out;
  for (int i = 0; i < w.V; ++i) {
    int j = w.partner[i];
    int i1 = (i + 1) % w.V;
    int jm1 = (j - 1 + w.V) % w.V;
    if (j == i1) continue;  // single bridge, not a pair
    if (w.partner[i1] != jm1) continue;
    if (i1 == 0 || i1 == w.m) continue;
    if (j == 0 || j == w.m) continue;
    out.push_back(i);
  }
  return out;
}

void collapse_at(LoopWork& w, int i) {
  const int V = w.V;
  const int j = w.partner[i];
  const int r1 = (i + 1) % V;
  const int r2 = j;
  const int jm1 = (j - 1 + V) % V;
  const long long merged = w.mult[i] + w.mult[r1];

  auto new_label = [&](int v) { return v - (r1 < v ? 1 : 0) - (r2 < v ? 1 : 0); };

  std::vector<int> partner(V - 2, -1);
  std::vector<long long> mult(V - 2, 0);
  for (int a = 0; a < V; ++a) {
    if (a == r1 || a == r2) continue;
    int b = w.partner[a];
    if (a == i || a == jm1) continue;  // the merged bridge, set below
    if (b == r1 || b == r2) continue;  // edges of the collapsed pair
    partner[new_label(a)] = new_label(b);
    mult[new_label(a)] = w.mult[a];
  }
  int na = new_label(i), nb = new_label(jm1);
  partner[na] = nb;
  partner[nb] = na;
  mult[na] = merged;
  mult[nb] = merged;

  w.m = new_label(w.m);
  w.V = V - 2;
  w.partner = std::move(partner);
  w.mult = std::move(mult);
}

}  // namespace

bool has_parallel_bridges(const EdgeLoop& loop, const std::vector<int>& partner) {
  LoopWork w{loop.total(), m_vertex(loop), partner, {}};
  return !parallel_sites(w).empty();
}

Skeleton collapse_to_skeleton(const Pairing& p, std::uint64_t salt) {
  if (is_ladder(p))
    throw std::invalid_argument("collapse_to_skeleton: the ladder has no skeleton");
  LoopWork w{p.loop.total(), m_vertex(p.loop), p.partner,
             std::vector<long long>(p.loop.total(), 1)};
  std::uint64_t step = 0;
  while (true) {
    auto sites = parallel_sites(w);
    if (sites.empty()) break;
    std::size_t pick = salt == 0 ? 0 : mix64(salt ^ step) % sites.size();
    collapse_at(w, sites[pick]);
    ++step;
  }
  if (w.V < 4)
    throw std::invalid_argument("collapse_to_skeleton: input collapses to a single bridge");
  Skeleton s;
  s.loop = {w.m, w.V - w.m};
  s.partner = std::move(w.partner);
  s.multiplicity = std::move(w.mult);
  return s;
}

namespace {

// One expansion step: split bridge {e_a, e_b} (positions a < b) into two
// parallel bridges.  Returns the positions of the outer child.
std::pair<int, int> expand_once(LoopWork& w, int a, int b,
                                std::vector<std::array<long long, 3>>& pending) {
  if (a > b) std::swap(a, b);
  const int V = w.V;
  auto map_edge = [&](int p) { return p + (p > a ? 1 : 0) + (p > b ? 1 : 0); };

  std::vector<int> partner(V + 2, -1);
  std::vector<long long> mult(V + 2, 1);
  for (int e = 0; e < V; ++e) {
    if (e == a || e == b) continue;
    partner[map_edge(e)] = map_edge(w.partner[e]);
  }
  partner[a] = b + 2;      // outer child {A1, B2}
  partner[b + 2] = a;
  partner[a + 1] = b + 1;  // inner child {A2, B1}
  partner[b + 1] = a + 1;

  // vertices: 0..a, v1, a+1..b, v2, b+1..V-1
  w.m = w.m + (w.m >= a + 1 ? 1 : 0) + (w.m >= b + 1 ? 1 : 0);
  w.V = V + 2;
  w.partner = std::move(partner);
  w.mult = std::move(mult);

  for (auto& entry : pending) {
    entry[0] = map_edge(static_cast<int>(entry[0]));
    entry[1] = map_edge(static_cast<int>(entry[1]));
  }
  return {a, b + 2};
}

}  // namespace

Pairing expand_skeleton(const Skeleton& s, const std::vector<long long>& mult_per_bridge) {
  auto bridges = s.bridges();
  if (mult_per_bridge.size() != bridges.size())
    throw std::invalid_argument("expand_skeleton: one multiplicity per bridge required");
  for (long long l : mult_per_bridge)
    if (l < 1) throw std::invalid_argument("expand_skeleton: multiplicities must be >= 1");

  LoopWork w{s.loop.total(), m_vertex(s.loop), s.partner,
             std::vector<long long>(s.loop.total(), 1)};
  std::vector<std::array<long long, 3>> pending;
  for (std::size_t k = 0; k < bridges.size(); ++k)
    pending.push_back({bridges[k].first, bridges[k].second, mult_per_bridge[k]});

  for (std::size_t k = 0; k < pending.size(); ++k) {
    while (pending[k][2] > 1) {
      auto child = expand_once(w, static_cast<int>(pending[k][0]),
                               static_cast<int>(pending[k][1]), pending);
      pending[k][0] = child.first;
      pending[k][1] = child.second;
      --pending[k][2];
    }
  }

  Pairing out;
  out.loop = {w.m, w.V - w.m};
  out.partner = std::move(w.partner);
  return out;
}

Pairing expand_skeleton(const Skeleton& s) {
  std::vector<long long> mult;
  for (auto [i, j] : s.bridges()) {
    (void)j;
    mult.push_back(s.multiplicity[i]);
  }
  return expand_skeleton(s, mult);
}

OrbitMap orbit_analysis(const EdgeLoop& loop, const std::vector<int>& partner) {
  const int V = loop.total();
  const int m = m_vertex(loop);
  OrbitMap om;
  om.tau.resize(V);
  om.orbit_of.assign(V, -1);
  for (int i = 0; i < V; ++i) om.tau[i] = (partner[i] + 1) % V;

  for (int s = 0; s < V; ++s) {
    if (om.orbit_of[s] >= 0) continue;
    int id = static_cast<int>(om.orbits.size());
    om.orbits.emplace_back();
    int v = s;
    do {
      om.orbit_of[v] = id;
      om.orbits[id].push_back(v);
      v = om.tau[v];
    } while (v != s);
  }
  om.orbit_of_zero = om.orbit_of[0];
  om.orbit_of_m = om.orbit_of[m];
  om.L = static_cast<int>(om.orbits.size()) - 1;

  for (int i = 0; i < V; ++i) {
    if (i >= partner[i]) continue;
    om.bridge_smaller_edge.push_back(i);
    om.bridge_orbits.push_back({om.orbit_of[i], om.orbit_of[(i + 1) % V]});
  }

  // Spanning subset Sigma_T: repeatedly take the smallest vertex in an
  // uncovered orbit; the bridge through its incoming loop edge connects it
  // to an already covered orbit.
  std::vector<char> covered(om.orbits.size(), 0);
  covered[om.orbit_of_zero] = 1;
  auto bridge_id_of_edge = [&](int e) {
    int key = std::min(e, partner[e]);
    auto it = std::lower_bound(om.bridge_smaller_edge.begin(), om.bridge_smaller_edge.end(), key);
    return static_cast<int>(it - om.bridge_smaller_edge.begin());
  };
  while (true) {
    int i = -1;
    for (int v = 0; v < V; ++v)
      if (!covered[om.orbit_of[v]]) {
        i = v;
        break;
      }
    if (i < 0) break;
    om.spanning.push_back(bridge_id_of_edge((i - 1 + V) % V));
    covered[om.orbit_of[i]] = 1;
  }
  return om;
}

OrbitMap orbit_analysis(const Pairing& p) { return orbit_analysis(p.loop, p.partner); }
OrbitMap orbit_analysis(const Skeleton& s) { return orbit_analysis(s.loop, s.partner); }

Skeleton critical_skeleton(int k) {
  if (k < 1 || k > 16)
    throw std::invalid_argument("critical_skeleton: k must lie in [1, 16]");
  const int V = 12 * k + 2;
  const int m = 6 * k + 1;
  Skeleton s;
  s.loop = {m, V - m};
  s.partner.assign(V, -1);
  s.multiplicity.assign(V, 1);
  auto link = [&](int a, int b) {
    a %= V;
    b %= V;
    if (s.partner[a] != -1 || s.partner[b] != -1)
      throw std::logic_error("critical_skeleton: overlapping bridges in construction");
    s.partner[a] = b;
    s.partner[b] = a;
  };
  // k telescoped six-bridge blocks plus the vertical bridge at the vertex m.
  // Block j couples the j-th six-edge window of the first arm with the
  // mirrored window of the second arm.
  link(m - 1, m);
  for (int j = 1; j <= k; ++j) {
    const int p = 6 * (j - 1);
    const int q = m + 6 * (k - j);
    link(p, q + 6);
    link(p + 1, p + 4);
    link(p + 2, q + 2);
    link(p + 3, q + 3);
    link(p + 5, q + 5);
    link(q + 1, q + 4);
  }

  OrbitMap om = orbit_analysis(s);
  bool ok = om.L == 4 * k + 1 && static_cast<int>(om.orbits[om.orbit_of_zero].size()) == 1 &&
            static_cast<int>(om.orbits[om.orbit_of_m].size()) == 1;
  for (std::size_t id = 0; id < om.orbits.size() && ok; ++id) {
    if (static_cast<int>(id) == om.orbit_of_zero || static_cast<int>(id) == om.orbit_of_m) continue;
    ok = om.orbits[id].size() == 3;
  }
  if (!ok) throw std::logic_error("critical_skeleton: construction lost its invariants");
  return s;
}

double DiagramValue::value(int M) const {
  return static_cast<double>(count) / std::pow(static_cast<double>(M - 1), nbar);
}

namespace {

struct LabelChecker {
  int V;
  int m;
  std::int64_t vol;
  std::vector<char> band;  // vol x vol adjacency of the band shell

  explicit LabelChecker(const LatticeConfig& c, const EdgeLoop& l)
      : V(l.total()), m(m_vertex(l)), vol(c.volume()), band(vol * vol, 0) {
    const std::int64_t W_sq = static_cast<std::int64_t>(c.W) * c.W;
    for (std::int64_t a = 0; a < vol; ++a) {
      Site sa = c.site_of_index(a);
      for (std::int64_t b = 0; b < vol; ++b) {
        Site sb = c.site_of_index(b);
        Site diff(c.d);
        for (int i = 0; i < c.d; ++i) diff[i] = sa[i] - sb[i];
        std::int64_t r = c.periodic_norm_sq(diff);
        band[a * vol + b] = (r >= 1 && r <= W_sq) ? 1 : 0;
      }
    }
  }

  bool band_ok(std::int64_t a, std::int64_t b) const { return band[a * vol + b] != 0; }

  // Band condition on every loop edge plus the nonbacktracking condition at
  // every vertex other than 0 and m.
  bool q_ok(const std::vector<std::int64_t>& label) const {
    for (int i = 0; i < V; ++i)
      if (!band_ok(label[i], label[(i + 1) % V])) return false;
    for (int c = 0; c < V; ++c) {
      if (c == 0 || c == m) continue;
      if (label[(c - 1 + V) % V] == label[(c + 1) % V]) return false;
    }
    return true;
  }
};

}  // namespace

namespace {

DiagramValue diagram_value_impl(const Pairing& p, const LatticeConfig& cfg, const Site* x,
                                ValueMode mode) {
  const int V = p.loop.total();
  if (V > kValueCapEdges)
    throw std::invalid_argument("diagram_value: loop exceeds the exhaustive enumeration cap");
  if (cfg.volume() > kValueCapVolume)
    throw std::invalid_argument("diagram_value: lattice exceeds the exhaustive enumeration cap");

  const std::int64_t origin = cfg.origin_index();
  if (V == 0) {
    long long c = (!x || cfg.site_index(cfg.canonical(*x)) == origin) ? 1 : 0;
    return {c, 0};
  }

  OrbitMap om = orbit_analysis(p);
  const int n_orb = static_cast<int>(om.orbits.size());
  const std::int64_t vol = cfg.volume();
  LabelChecker checker(cfg, p.loop);

  std::vector<std::int64_t> orbit_label(n_orb, -1);
  std::vector<int> free_orbits;
  orbit_label[om.orbit_of_zero] = origin;
  if (x) {
    std::int64_t xi = cfg.site_index(cfg.canonical(*x));
    if (om.orbit_of_m == om.orbit_of_zero) {
      if (xi != origin) return {0, V / 2};
    } else {
      orbit_label[om.orbit_of_m] = xi;
    }
  }
  for (int id = 0; id < n_orb; ++id)
    if (orbit_label[id] < 0) free_orbits.push_back(id);

  auto bridges = p.bridges();
  std::vector<std::int64_t> label(V);
  long long count = 0;

  std::function<void(std::size_t)> rec = [&](std::size_t slot) {
    if (slot == free_orbits.size()) {
      for (int v = 0; v < V; ++v) label[v] = orbit_label[om.orbit_of[v]];
      if (!checker.q_ok(label)) return;
      if (mode == ValueMode::V) {
        std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
        for (auto [i, j] : bridges) {
          std::int64_t a = label[i], b = label[(i + 1) % V];
          (void)j;
          pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(pairs.begin(), pairs.end());
        if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) return;
      }
      ++count;
      return;
    }
    for (std::int64_t y = 0; y < vol; ++y) {
      orbit_label[free_orbits[slot]] = y;
      rec(slot + 1);
    }
    orbit_label[free_orbits[slot]] = -1;
  };
  rec(0);
  return {count, V / 2};
}

}  // namespace

DiagramValue diagram_value(const Pairing& p, const LatticeConfig& cfg, const Site& x,
                           ValueMode mode) {
  return diagram_value_impl(p, cfg, &x, mode);
}

DiagramValue diagram_value_summed(const Pairing& p, const LatticeConfig& cfg, ValueMode mode) {
  return diagram_value_impl(p, cfg, nullptr, mode);
}

void enumerate_even_lumpings(const EdgeLoop& loop,
                             const std::function<void(const Lumping&)>& yield) {
  const int E = loop.total();
  if (E % 2 != 0)
    throw std::invalid_argument("enumerate_even_lumpings: need an even number of edges");
  if (E > kValueCapEdges)
    throw std::invalid_argument("enumerate_even_lumpings: loop exceeds the enumeration cap");
  if (E == 0) {
    yield(Lumping{loop, {}, 0});
    return;
  }
  Lumping g;
  g.loop = loop;
  g.lump_of.assign(E, -1);

  std::vector<int> sizes;
  std::function<void(int)> rec = [&](int e) {
    if (e == E) {
      for (int s : sizes)
        if (s % 2 != 0) return;
      g.num_lumps = static_cast<int>(sizes.size());
      yield(g);
      return;
    }
    for (int id = 0; id <= static_cast<int>(sizes.size()); ++id) {
      if (id == static_cast<int>(sizes.size())) sizes.push_back(0);
      ++sizes[id];
      g.lump_of[e] = id;
      rec(e + 1);
      g.lump_of[e] = -1;
      if (--sizes[id] == 0) sizes.pop_back();
    }
  };
  rec(0);
}

DiagramValue lumping_value(const Lumping& g, const LatticeConfig& cfg, const Site& x) {
  const int E = g.loop.total();
  if (E > kValueCapEdges)
    throw std::invalid_argument("lumping_value: loop exceeds the enumeration cap");
  if (cfg.volume() > kValueCapVolume)
    throw std::invalid_argument("lumping_value: lattice exceeds the enumeration cap");

  const std::int64_t origin = cfg.origin_index();
  const std::int64_t xi = cfg.site_index(cfg.canonical(x));
  if (E == 0) return {xi == origin ? 1LL : 0LL, 0};

  const int V = E;
  const int m = m_vertex(g.loop);
  const std::int64_t vol = cfg.volume();
  LabelChecker checker(cfg, g.loop);

  std::vector<std::int64_t> label(V);
  label[0] = origin;
  if (m == 0) {
    if (xi != origin) return {0, E / 2};
  } else {
    label[m] = xi;
  }
  std::vector<int> free_vertices;
  for (int v = 1; v < V; ++v)
    if (v != m) free_vertices.push_back(v);

  long long count = 0;
  std::vector<int> induced(E);
  std::vector<std::pair<std::int64_t, std::int64_t>> seen_pairs;

  std::function<void(std::size_t)> rec = [&](std::size_t slot) {
    if (slot == free_vertices.size()) {
      if (!checker.q_ok(label)) return;
      // induced lumping: edges grouped by unordered label pair, ids in
      // first-appearance order
      seen_pairs.clear();
      for (int e = 0; e < E; ++e) {
        std::int64_t a = label[e], b = label[(e + 1) % V];
        std::pair<std::int64_t, std::int64_t> key{std::min(a, b), std::max(a, b)};
        int id = -1;
        for (std::size_t s = 0; s < seen_pairs.size(); ++s)
          if (seen_pairs[s] == key) {
            id = static_cast<int>(s);
            break;
          }
        if (id < 0) {
          id = static_cast<int>(seen_pairs.size());
          seen_pairs.push_back(key);
        }
        induced[e] = id;
        if (induced[e] != g.lump_of[e]) return;  // canonical ids match or bail
      }
      // Hermitian parity: each unordered pair must be traversed equally
      // often in both orientations.
      std::vector<int> balance(seen_pairs.size(), 0);
      for (int e = 0; e < E; ++e) {
        std::int64_t a = label[e], b = label[(e + 1) % V];
        balance[induced[e]] += (a < b) ? 1 : -1;
      }
      for (int v : balance)
        if (v != 0) return;
      ++count;
      return;
    }
    for (std::int64_t y = 0; y < vol; ++y) {
      label[free_vertices[slot]] = y;
      rec(slot + 1);
    }
  };
  rec(0);
  return {count, E / 2};
}

DiagramValue nonbacktracking_pair_expectation(const LatticeConfig& cfg, int n, int nprime,
                                              const Site& x) {
  if ((n + nprime) % 2 != 0) return {0, (n + nprime) / 2};
  if (n + nprime > kValueCapEdges)
    throw std::invalid_argument("nonbacktracking_pair_expectation: loop exceeds the cap");
  if (cfg.volume() > kValueCapVolume)
    throw std::invalid_argument("nonbacktracking_pair_expectation: lattice exceeds the cap");

  const std::int64_t origin = cfg.origin_index();
  const std::int64_t xi = cfg.site_index(cfg.canonical(x));
  const std::int64_t vol = cfg.volume();
  EdgeLoop loop{n, nprime};
  LabelChecker checker(cfg, loop);

  // Enumerate nonbacktracking label paths from `from` to `to` of given length.
  auto paths = [&](std::int64_t from, std::int64_t to, int len) {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> cur{from};
    std::function<void()> rec = [&]() {
      if (static_cast<int>(cur.size()) == len + 1) {
        if (cur.back() == to) out.push_back(cur);
        return;
      }
      for (std::int64_t y = 0; y < vol; ++y) {
        if (!checker.band_ok(cur.back(), y)) continue;
        if (cur.size() >= 2 && cur[cur.size() - 2] == y) continue;  // x_i != x_{i+2}
        cur.push_back(y);
        rec();
        cur.pop_back();
      }
    };
    if (len == 0) {
      if (from == to) out.push_back(cur);
      return out;
    }
    rec();
    return out;
  };

  auto forward = paths(origin, xi, n);
  auto backward = paths(xi, origin, nprime);

  long long count = 0;
  std::map<std::pair<std::int64_t, std::int64_t>, int> balance;
  for (const auto& pf : forward) {
    for (const auto& pb : backward) {
      balance.clear();
      auto feed = [&](const std::vector<std::int64_t>& path) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          std::int64_t a = path[i], b = path[i + 1];
          balance[{std::min(a, b), std::max(a, b)}] += (a < b) ? 1 : -1;
        }
      };
      feed(pf);
      feed(pb);
      bool ok = true;
      for (const auto& [k, v] : balance)
        if (v != 0) {
          ok = false;
          break;
        }
      if (ok) ++count;
    }
  }
  return {count, (n + nprime) / 2};
}

bool antiparallel(const EdgeLoop& loop, std::pair<int, int> b1, std::pair<int, int> b2) {
  const int V = loop.total();
  const int m = m_vertex(loop);
  auto norm = [&](std::pair<int, int> b) {
    if (b.first > b.second) std::swap(b.first, b.second);
    return b;
  };
  b1 = norm(b1);
  b2 = norm(b2);
  // b2 must be {e_{i+1}, e_{j+1}} for b1 = {e_i, e_j}, with the shifted
  // vertices away from the distinguished ones.
  int i = b1.first, j = b1.second;
  std::pair<int, int> shifted = norm({(i + 1) % V, (j + 1) % V});
  if (shifted != b2) return false;
  if ((i + 1) % V == 0 || (i + 1) % V == m) return false;
  if ((j + 1) % V == 0 || (j + 1) % V == m) return false;
  return true;
}

Census census(int n, int nprime) {
  Census c;
  c.n = n;
  c.nprime = nprime;
  EdgeLoop loop{n, nprime};

  std::map<std::pair<int, std::vector<int>>, int> skeleton_classes;
  enumerate_pairings(loop, false, [&](const Pairing& p) {
    ++c.pairings_total;
    if (!is_admissible(p)) return;
    ++c.pairings_admissible;
    if (is_ladder(p)) return;
    ++c.nonladder_admissible;
    Skeleton s = collapse_to_skeleton(p);
    OrbitMap om = orbit_analysis(s);
    if (static_cast<int>(c.orbit_count_histogram.size()) <= om.L)
      c.orbit_count_histogram.resize(om.L + 1, 0);
    ++c.orbit_count_histogram[om.L];
    auto key = std::make_pair(s.loop.n, s.partner);
    if (!skeleton_classes.count(key)) {
      skeleton_classes[key] = om.L;
      double mbar = s.loop.total() / 2.0;
      c.two_thirds_margin.push_back(2.0 * mbar / 3.0 + 1.0 / 3.0 - om.L);
    }
  });
  c.skeleton_classes = static_cast<long long>(skeleton_classes.size());
  return c;
}

std::vector<BoundAuditRow> bound_audit(int p, const LatticeConfig& cfg) {
  if (p < 1 || p > 4) throw std::invalid_argument("bound_audit: p must lie in [1, 4]");
  const int M = cfg.shell_size();
  std::vector<BoundAuditRow> rows;

  for (int n = 0; n <= 2 * p; ++n) {
    int nprime = 2 * p - n;
    EdgeLoop loop{n, nprime};
    enumerate_pairings(loop, true, [&](const Pairing& gamma) {
      if (is_ladder(gamma)) return;
      BoundAuditRow row;
      row.n = n;
      row.nprime = nprime;
      row.lhs = diagram_value_summed(gamma, cfg, ValueMode::R).value(M);

      Skeleton s = collapse_to_skeleton(gamma);
      OrbitMap om = orbit_analysis(s);
      row.mbar = s.loop.total() / 2;

      // ell of the audited bridge: the largest multiplicity outside the
      // spanning set (any choice is valid; the largest is the hardest test).
      std::vector<char> in_spanning(om.bridge_smaller_edge.size(), 0);
      for (int id : om.spanning) in_spanning[id] = 1;
      long long ell_bar = 0;
      for (std::size_t id = 0; id < om.bridge_smaller_edge.size(); ++id)
        if (!in_spanning[id]) ell_bar = std::max(ell_bar, s.multiplicity[om.bridge_smaller_edge[id]]);
      if (ell_bar == 0) ell_bar = 1;  // cannot happen for mbar >= 2
      row.ell_bar = ell_bar;

      double Md = static_cast<double>(M);
      row.rhs = constants::kBoundAuditConstant * std::pow(Md / (M - 1), p) *
                (1.0 / std::sqrt(static_cast<double>(ell_bar)) + std::pow(Md, -1.0 / 6.0)) *
                std::pow(Md, 1.0 / 3.0 - row.mbar / 3.0);
      row.pass = row.lhs <= row.rhs;
      rows.push_back(row);
    });
  }
  return rows;
}

}  // namespace bandlab::diagrams
