#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bandlab/lattice.hpp"

namespace bandlab::diagrams {

// The loop of n + n' vertices underlying E H^{(n)}_{0x} H^{(n')}_{x0}.
// Edges e_i = (i, i+1) on the periodic vertex set; vertices 0 and n are
// distinguished (they carry the fixed labels 0 and x, and the
// nonbacktracking constraints skip them).
struct EdgeLoop {
  int n = 0;
  int nprime = 0;
  int total() const { return n + nprime; }
};

struct Pairing {
  EdgeLoop loop;
  std::vector<int> partner;  // involution on edge indices, no fixed points

  // Two pairings are the same object when they have the same loop size, the
  // same distinguished vertex position (n modulo the loop size -- the splits
  // (n, 0) and (0, n) describe one loop), and the same matching.
  bool operator==(const Pairing& o) const {
    int v = loop.total(), ov = o.loop.total();
    if (v != ov || partner != o.partner) return false;
    return v == 0 || loop.n % v == o.loop.n % v;
  }
  std::vector<std::pair<int, int>> bridges() const;  // (i, j) with i < j, sorted
};

// Separation rule for two edges of the same lump: on each arc between them,
// at least two edges or a vertex in {0, n}.
bool edges_separated(const EdgeLoop& loop, int i, int j);
bool is_admissible(const Pairing& p);
bool is_ladder(const Pairing& p);

Pairing ladder(int n);

// All perfect matchings of the edge set, optionally filtered by the
// separation rule.  Refuses loops beyond 14 edges, quoting the (2p-1)!!
// count the caller was about to stream.
void enumerate_pairings(const EdgeLoop& loop, bool admissible_only,
                        const std::function<void(const Pairing&)>& yield);
std::vector<Pairing> all_pairings(const EdgeLoop& loop, bool admissible_only);

// A pairing with no parallel bridges, remembered together with the number of
// parallel bridges that were collapsed into each of its bridges.
struct Skeleton {
  EdgeLoop loop;  // (m, m')
  std::vector<int> partner;
  std::vector<long long> multiplicity;  // per edge; equal on both edges of a bridge

  std::vector<std::pair<int, int>> bridges() const;
  long long total_multiplicity() const;  // |l_Sigma| = nbar of the expanded pairing
};

// Two bridges {e_i, e_j}, {e_{i+1}, e_{j-1}} somewhere in the matching, with
// the enclosed vertices i+1, j away from {0, m}.
bool has_parallel_bridges(const EdgeLoop& loop, const std::vector<int>& partner);

// Successively collapse parallel bridges.  The result is independent of the
// collapse order; `salt` selects a different order for testing exactly that.
// Ladder input is rejected (its collapse would leave a single bridge, which
// the skeleton set excludes).
Skeleton collapse_to_skeleton(const Pairing& p, std::uint64_t salt = 0);

// G_{l_Sigma}(Sigma): expand each bridge into its multiplicity of parallel
// copies.  The overload with explicit multiplicities orders them by the
// smaller edge index of each bridge.
Pairing expand_skeleton(const Skeleton& s);
Pairing expand_skeleton(const Skeleton& s, const std::vector<long long>& mult_per_bridge);

struct OrbitMap {
  std::vector<int> tau;        // vertex -> vertex, tau(i) = partner(i) + 1
  std::vector<int> orbit_of;   // vertex -> orbit id
  std::vector<std::vector<int>> orbits;
  int orbit_of_zero = 0;
  int orbit_of_m = 0;
  int L = 0;  // number of orbits excluding [0]
  // Bridge incidence on the orbit multigraph: per bridge (keyed by the
  // smaller edge), the two orbits it sits between.
  std::vector<std::array<int, 2>> bridge_orbits;
  std::vector<int> bridge_smaller_edge;
  // Spanning subset Sigma_T (indices into bridge_* arrays): a tree reaching
  // every orbit from [0].
  std::vector<int> spanning;
};

OrbitMap orbit_analysis(const EdgeLoop& loop, const std::vector<int>& partner);
OrbitMap orbit_analysis(const Pairing& p);
OrbitMap orbit_analysis(const Skeleton& s);

// The critical family saturating the 2/3 rule: mbar = 6k+1, L = 4k+1.
// The published figure is pinned by its invariants; the construction places
// k telescoped six-bridge blocks plus the vertical bridge at the vertex m.
Skeleton critical_skeleton(int k);

// Exact diagram values: every value is count / (M-1)^nbar with an integer
// count, so comparisons are bit-exact.
struct DiagramValue {
  long long count = 0;
  int nbar = 0;
  double value(int M) const;
  bool operator==(const DiagramValue& o) const { return count == o.count && nbar == o.nbar; }
};

enum class ValueMode { V, R };

// V_x resp. R_x of a pairing by exhaustive label enumeration (labels are
// constant on tau-orbits; mode V additionally requires distinct label pairs
// across bridges).  Caps: total edges <= 8 and N^d <= 8.
DiagramValue diagram_value(const Pairing& p, const LatticeConfig& cfg, const Site& x,
                           ValueMode mode);
// sum over x of R_x (the audit quantity), same caps.
DiagramValue diagram_value_summed(const Pairing& p, const LatticeConfig& cfg, ValueMode mode);

// Even lumpings and the master identity -----------------------------------

struct Lumping {
  EdgeLoop loop;
  std::vector<int> lump_of;  // edge -> lump id
  int num_lumps = 0;
};

void enumerate_even_lumpings(const EdgeLoop& loop,
                             const std::function<void(const Lumping&)>& yield);

// V_x(Gamma) for a general even lumping: label configurations realizing
// exactly this lumping, counted with the Hermitian parity rule.
DiagramValue lumping_value(const Lumping& g, const LatticeConfig& cfg, const Site& x);

// Independent oracle: E H^{(n)}_{0x} H^{(n')}_{x0} by enumerating the two
// nonbacktracking paths separately and applying the parity rule.
DiagramValue nonbacktracking_pair_expectation(const LatticeConfig& cfg, int n, int nprime,
                                              const Site& x);

// Symmetric-ensemble bridge tags (enumeration-level support only).
enum class BridgeTag { Straight, Twisted };
// Bridges {e_i, e_j} and {e_{i+1}, e_{j+1}} are antiparallel if i+1, j+1
// are not distinguished.
bool antiparallel(const EdgeLoop& loop, std::pair<int, int> b1, std::pair<int, int> b2);

// Census and audit ----------------------------------------------------------

struct Census {
  int n = 0, nprime = 0;
  long long pairings_total = 0;
  long long pairings_admissible = 0;
  long long nonladder_admissible = 0;
  long long skeleton_classes = 0;
  std::vector<long long> orbit_count_histogram;   // index = L(S(Gamma))
  std::vector<double> two_thirds_margin;          // 2 mbar/3 + 1/3 - L per skeleton class
};

Census census(int n, int nprime);

struct BoundAuditRow {
  int n = 0, nprime = 0;
  int mbar = 0;
  long long ell_bar = 1;  // multiplicity of the audited bridge
  double lhs = 0.0;       // sum_x R_x(Gamma)
  double rhs = 0.0;       // C (M/(M-1))^p (ell^{-1/2} + M^{-1/6}) M^{1/3 - mbar/3}
  bool pass = false;
};

// Audits every admissible non-ladder pairing with nbar = p against the
// skeleton bound, with the audit constant fixed in constants.hpp.
std::vector<BoundAuditRow> bound_audit(int p, const LatticeConfig& cfg);

}  // namespace bandlab::diagrams
