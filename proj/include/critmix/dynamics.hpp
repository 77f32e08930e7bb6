#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "critmix/connectivity.hpp"
#include "critmix/lattice.hpp"
#include "critmix/model.hpp"
#include "critmix/rng.hpp"

namespace critmix {

// ---------------------------------------------------------------------------
// Random mapping representation: a deterministic seeded sequence of
// (location, uniform, timestamp) triples shared by coupled chains.
//
// DiscreteRandomScan counts time in sweeps: T_i = i / #locations.
// ContinuousPoisson increments time by Exponential(#locations), i.e. each
// location rings at rate 1.  The (J, U) draws are made before the time draw,
// so the embedded jump chains of the two modes coincide for equal seeds.
// ---------------------------------------------------------------------------

enum class StreamMode { DiscreteRandomScan, ContinuousPoisson };

struct Update {
  int location;
  double u;
  double time;
};

class UpdateStream {
 public:
  UpdateStream(std::uint64_t seed, StreamMode mode, int num_locations);

  Update next();
  std::uint64_t seed() const { return seed_; }
  StreamMode mode() const { return mode_; }
  int num_locations() const { return nloc_; }
  std::uint64_t position() const { return count_; }
  double time() const { return time_; }

  // Rebuild a stream and fast-forward to a saved position.
  static UpdateStream resume(std::uint64_t seed, StreamMode mode,
                             int num_locations, std::uint64_t position);

 private:
  std::uint64_t seed_;
  StreamMode mode_;
  int nloc_;
  Rng rng_;
  std::uint64_t count_ = 0;
  double time_ = 0.0;
};

// ---------------------------------------------------------------------------
// Chain state and single-update kernels.
// ---------------------------------------------------------------------------

template <typename Config>
struct ChainState {
  Config config;
  double clock = 0.0;
  std::uint64_t stream_position = 0;
};

using PottsChainState = ChainState<SpinConfig>;
using FKChainState = ChainState<BondConfig>;

// Heat-bath resampling of one site from the conditional Potts distribution.
// The new color is drawn by inverse CDF on u with colors ordered 1..q (the
// fixed order makes grand couplings reproducible).  Sites fixed by the
// boundary condition are rejected.
void potts_glauber_update(const Lattice& lat, SpinConfig& sigma, int site,
                          double u, const PottsBoundary& bc,
                          const Params& prm);

// Heat-bath resampling of one bond: open iff u <= p when the endpoints are
// connected without the edge, iff u <= p/(p+q(1-p)) otherwise.
void fk_glauber_update(const Lattice& lat, BondConfig& omega, int e, double u,
                       const FKBoundary& bc, const Params& prm,
                       ConnectivityQuery& query);

// Probability thresholds used by the bond update.
double fk_open_threshold(const Params& prm, bool connected_without);

// One Swendsen-Wang sweep: percolate agreeing edges with probability p, then
// recolor every cluster uniformly; clusters touching a vertex whose color is
// dictated by the boundary keep that color.
SpinConfig swendsen_wang_step(const Lattice& lat, const SpinConfig& sigma,
                              const PottsBoundary& bc, const Params& prm,
                              Rng& rng);

// One Chayes-Machta sweep: activate clusters independently with probability
// 1/q (clusters wired to the boundary are never activated) and resample every
// edge whose endpoints both lie in active clusters with Bernoulli(p).
BondConfig chayes_machta_step(const Lattice& lat, const BondConfig& omega,
                              const FKBoundary& bc, const Params& prm,
                              Rng& rng);

// ---------------------------------------------------------------------------
// Block dynamics: resample the sites of one block from the exact conditional
// distribution given everything else.  Blocks are explicit vertex regions;
// sites fixed by the boundary condition are skipped.  Exact resampling
// enumerates q^{#block sites}; beyond the cap a nested Glauber chain with
// `fallback_sweeps` substitutes (flagged in the result).
// ---------------------------------------------------------------------------

struct BlockDynamics {
  std::vector<Region> blocks;
  std::int64_t exact_cap = kDefaultStateCap;
  int fallback_sweeps = 0;  // 0 = exact mode only, error past cap

  // Returns false iff the fallback path was taken.
  bool step(const Lattice& lat, SpinConfig& sigma, int which,
            const PottsBoundary& bc, const Params& prm, Rng& rng) const;
};

// ---------------------------------------------------------------------------
// Censoring schedule: ordered intervals [t_{i-1}, t_i) with an allowed
// region each; updates whose location falls outside the region are skipped
// (the clock still advances).  Optional reset actions at interval starts.
// ---------------------------------------------------------------------------

struct CensorInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::optional<Region> allowed;  // nullopt = everything allowed
  // Reset applied to bond configs at the interval start.
  enum class Reset { None, AllOpen, AllClosed };
  Reset reset = Reset::None;
  std::optional<Region> reset_region;  // nullopt = whole lattice
};

struct CensorSchedule {
  std::vector<CensorInterval> intervals;
  void validate(double t_from, double t_until) const;
  const CensorInterval* interval_at(double t) const;
};

// Drive a Potts chain with stream updates until the stream clock passes
// `until`.
void run_potts(const Lattice& lat, PottsChainState& state, UpdateStream& stream,
               double until, const PottsBoundary& bc, const Params& prm,
               const CensorSchedule* schedule = nullptr);

// Same for the FK single-bond chain.
void run_fk(const Lattice& lat, FKChainState& state, UpdateStream& stream,
            double until, const FKBoundary& bc, const Params& prm,
            const CensorSchedule* schedule = nullptr);

// ---------------------------------------------------------------------------
// Chain checkpoints (text format shared with the model serialization).
// ---------------------------------------------------------------------------

void write_checkpoint(std::ostream& os, const Lattice& lat,
                      const FKChainState& state, const FKBoundary& bc,
                      const Params& prm, const UpdateStream& stream);
struct FKCheckpoint {
  FKChainState state;
  std::uint64_t stream_seed;
  StreamMode stream_mode;
  std::uint64_t stream_position;
};
FKCheckpoint read_checkpoint(std::istream& is, const Lattice& lat);

}  // namespace critmix
