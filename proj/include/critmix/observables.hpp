#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "critmix/lattice.hpp"
#include "critmix/model.hpp"

namespace critmix {

// ---------------------------------------------------------------------------
// Crossings.
//
// Default connectivity follows the restricted convention: the path may only
// use edges with at least one endpoint strictly inside the region (edges
// between two region-boundary vertices are dropped).  The inclusive variant
// (include_region_boundary_edges) admits every edge with both endpoints in
// the region; planar crossing/dual-crossing complementarity and the
// self-dual P=1/2 geometry hold exactly in the inclusive convention.
// ---------------------------------------------------------------------------

enum class CrossDirection { Vertical, Horizontal };

struct CrossingSpec {
  Rect region;
  CrossDirection direction = CrossDirection::Vertical;
  bool dual = false;  // evaluate on the dual configuration / dual lattice
  bool include_region_boundary_edges = false;
};

bool detect_crossing(const Lattice& lat, const BondConfig& omega,
                     const CrossingSpec& spec);

// Dual configuration on dual_map(lat).dual: mapped edges get 1-omega(e),
// unmapped dual edges (crossing primal edges outside the box) are open.
BondConfig dual_config(const Lattice& lat, const DualEdgeMap& map,
                       const BondConfig& omega);

// The dual rectangle paired with a whole-box crossing: for C_h(box) the
// complementary event is a vertical dual crossing of the full dual box.
Rect full_dual_rect(const DualEdgeMap& map);

// Open circuit of nontrivial homology inside annulus minus its boundary.
// Primary implementation: no dual-open path from the hole to the outside
// blocks the circuit (planar criterion).
bool detect_circuit(const Lattice& lat, const BondConfig& omega,
                    const Annulus& annulus);

// ---------------------------------------------------------------------------
// Torus homology loops and the bottleneck set S = cap_i S_v^i cap S_h^i.
// ---------------------------------------------------------------------------

struct TorusLoopEvents {
  std::array<bool, 3> vertical;    // S_v^1..3
  std::array<bool, 3> horizontal;  // S_h^1..3
  bool all;                        // S
};

// S_v^i: some column x in the i-th vertical strip [ (i-1)n/3, in/3 ] x [0,n']
// joins (x,0) to (x,n') inside the strip (read on the universal cover; the
// path may use both boundary columns).  Requires n, n' divisible by 3.
TorusLoopEvents torus_loop_events(const Lattice& lat, const BondConfig& omega);

// Same strip/loop structure for Potts configurations with same-spin
// adjacency in the given color.
TorusLoopEvents potts_loop_events(const Lattice& lat, const SpinConfig& sigma,
                                  const PottsBoundary& bc, int color);

// Open edges e with (omega - e) notin S.  Rejects omega notin S.
std::vector<int> pivotal_edges_for_S(const Lattice& lat,
                                     const BondConfig& omega);

// ---------------------------------------------------------------------------
// Monte Carlo estimators.
// ---------------------------------------------------------------------------

struct WilsonInterval {
  double lo = 0.0, hi = 0.0;
};
WilsonInterval wilson_interval(long long hits, long long trials,
                               double z = 1.96);

struct BottleneckReport {
  long long samples = 0;
  long long in_S = 0;
  long long in_boundary_S = 0;  // in S and some pivotal edge exists
  double p_S = 0.0;
  WilsonInterval p_S_ci;
  bool no_data = false;  // zero samples landed in S
  double p_dS_given_S = 0.0;
  WilsonInterval p_dS_given_S_ci;
  bool approximate_sampler = false;
};

struct BottleneckOptions {
  int replicas = 200;
  double burnin_sweeps = 200.0;
  std::uint64_t seed = 1;
  int threads = 1;
  // q = 1 shortcut: sample i.i.d. Bernoulli(p) configurations exactly.
  bool iid_percolation = false;
};

BottleneckReport estimate_conductance_bottleneck(int n, const Params& prm,
                                                 const BottleneckOptions& opts);

struct FrequencyEstimate {
  long long hits = 0;
  long long trials = 0;
  double frequency = 0.0;
  WilsonInterval ci;
};

// P(origin connects to the boundary of the centered half box) on a free
// box of side n (origin-centered convention mapped to corner coordinates).
FrequencyEstimate one_arm_probability(int n, const Params& prm, int replicas,
                                      double burnin_sweeps, std::uint64_t seed,
                                      int threads = 1);

struct PairCorrelation {
  int x1, y1, x2, y2;
  FrequencyEstimate estimate;
};

std::vector<PairCorrelation> two_point_correlation(
    int n, const Params& prm, const std::vector<std::array<int, 4>>& pairs,
    int replicas, double burnin_sweeps, std::uint64_t seed, int threads = 1);

// f(sigma) = #\{x in inner : sigma(x) = color\}.
long long variance_test_function(const Lattice& lat, const SpinConfig& sigma,
                                 const PottsBoundary& bc, const Rect& inner,
                                 int color);

}  // namespace critmix
