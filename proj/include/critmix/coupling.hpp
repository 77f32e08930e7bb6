#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "critmix/dynamics.hpp"
#include "critmix/lattice.hpp"
#include "critmix/model.hpp"

namespace critmix {

// Grand coupling of the FK single-bond heat-bath chain: the chains from the
// all-open and all-closed initial configurations are driven by an identical
// update stream.  Monotonicity keeps upper >= lower at all times, so the
// coalescence time bounds the coupling time from every initial state.
struct CouplingRun {
  BondConfig upper, lower;
  // Coalescence time in sweeps; empty if t_max was reached first.
  std::optional<double> coalesce_time;
  // (time, fraction of active edges agreeing) samples, once per sweep.
  std::vector<std::pair<double, double>> agreement_trace;
  std::uint64_t seed = 0;

  bool coalesced() const { return coalesce_time.has_value(); }
};

struct GrandCouplingOptions {
  bool record_trace = false;
  // Debug sandwich check: run a third chain from this configuration and
  // assert upper >= middle >= lower after every step.
  std::optional<BondConfig> middle_start;
  // Called instead of aborting on a sandwich violation (tests).
  bool* sandwich_violated = nullptr;
};

CouplingRun grand_coupling_run(const Lattice& lat, const FKBoundary& bc,
                               const Params& prm, std::uint64_t seed,
                               double t_max_sweeps,
                               const GrandCouplingOptions& opts = {});

// Coupling-based upper-bound estimator for bar d_tv(t):
// 2 |E| * (fraction of replicas not coalesced by t), clipped to 1.
// This is an upper-bound proxy (P(no coalescence) >= ||H_t(1,.)-H_t(0,.)||),
// not an exact total-variation value.
struct TvBound {
  double value = 0.0;
  bool clipped = false;
};
TvBound tv_upper_bound(std::span<const CouplingRun> runs, const Lattice& lat,
                       const FKBoundary& bc, double t);

// Median coalescence time over seeded replicas for a list of sizes.
struct ScalingRow {
  int n;
  double median_sweeps;
  double iqr_low, iqr_high;
  int censored;  // replicas that hit t_max
  std::vector<double> per_replica;
  std::vector<std::uint64_t> seeds;
};

enum class BcFamily { Free, Wired, Periodic };

std::vector<ScalingRow> coupling_time_scaling(
    const std::vector<int>& sizes, BcFamily family, double q,
    std::uint64_t seed, int replicas, double t_max_sweeps, int threads = 1);

}  // namespace critmix
