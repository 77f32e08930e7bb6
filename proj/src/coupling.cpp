#include "critmix/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace critmix {

CouplingRun grand_coupling_run(const Lattice& lat, const FKBoundary& bc,
                               const Params& prm, std::uint64_t seed,
                               double t_max_sweeps,
                               const GrandCouplingOptions& opts) {
  auto edges = active_edges(lat, bc);
  const int m = static_cast<int>(edges.size());
  if (m == 0) throw std::invalid_argument("no active edges to couple");

  CouplingRun run;
  run.seed = seed;
  run.upper = all_bonds(lat, bc, true);
  run.lower = all_bonds(lat, bc, false);
  BondConfig middle;
  const bool track_middle = opts.middle_start.has_value();
  if (track_middle) middle = *opts.middle_start;

  UpdateStream stream(seed, StreamMode::DiscreteRandomScan, m);
  ConnectivityQuery q_upper(lat, bc), q_lower(lat, bc), q_middle(lat, bc);

  int disagree = 0;
  for (int e : edges) disagree += run.upper.open[e] != run.lower.open[e];

  std::uint64_t total_updates =
      static_cast<std::uint64_t>(t_max_sweeps * m + 0.5);
  std::uint64_t next_trace = 0;
  for (std::uint64_t i = 0; i < total_updates; ++i) {
    Update u = stream.next();
    int e = edges[u.location];
    if (disagree > 0) {
      int before_u = run.upper.open[e], before_l = run.lower.open[e];
      fk_glauber_update(lat, run.upper, e, u.u, bc, prm, q_upper);
      fk_glauber_update(lat, run.lower, e, u.u, bc, prm, q_lower);
      disagree += (run.upper.open[e] != run.lower.open[e]) -
                  (before_u != before_l);
      if (run.upper.open[e] < run.lower.open[e])
        throw std::logic_error("monotonicity violated in grand coupling");
      if (track_middle) {
        fk_glauber_update(lat, middle, e, u.u, bc, prm, q_middle);
        if (middle.open[e] > run.upper.open[e] ||
            middle.open[e] < run.lower.open[e]) {
          if (opts.sandwich_violated) *opts.sandwich_violated = true;
          else throw std::logic_error("sandwich invariant violated");
        }
      }
      if (disagree == 0 && !run.coalesce_time) run.coalesce_time = u.time;
    } else {
      // coalescence is absorbing under a shared stream: keep chains equal
      fk_glauber_update(lat, run.upper, e, u.u, bc, prm, q_upper);
      run.lower.open[e] = run.upper.open[e];
      if (track_middle) middle.open[e] = run.upper.open[e];
    }
    if (opts.record_trace && i >= next_trace) {
      run.agreement_trace.emplace_back(
          u.time, 1.0 - static_cast<double>(disagree) / m);
      next_trace += m;  // once per sweep
    }
  }
  return run;
}

TvBound tv_upper_bound(std::span<const CouplingRun> runs, const Lattice& lat,
                       const FKBoundary& bc, double t) {
  if (runs.empty())
    throw std::invalid_argument("tv_upper_bound needs at least one replica");
  const double m = static_cast<double>(active_edges(lat, bc).size());
  int not_coalesced = 0;
  for (const auto& r : runs)
    not_coalesced += !(r.coalesce_time && *r.coalesce_time <= t);
  double raw =
      2.0 * m * static_cast<double>(not_coalesced) / runs.size();
  TvBound out;
  out.clipped = raw > 1.0;
  out.value = std::min(raw, 1.0);
  return out;
}

namespace {
double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
double quantile_of(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double idx = p * (v.size() - 1);
  size_t lo = static_cast<size_t>(idx);
  size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (idx - lo) * (v[hi] - v[lo]);
}
}  // namespace

std::vector<ScalingRow> coupling_time_scaling(
    const std::vector<int>& sizes, BcFamily family, double q,
    std::uint64_t seed, int replicas, double t_max_sweeps, int threads) {
  std::vector<ScalingRow> rows;
  Params prm = Params::critical(q);
  for (int n : sizes) {
    Lattice lat = family == BcFamily::Periodic ? Lattice::torus(n, n)
                                               : Lattice::box(n, n);
    FKBoundary bc = family == BcFamily::Periodic ? FKBoundary::periodic(lat)
                    : family == BcFamily::Wired  ? FKBoundary::wired(lat)
                                                 : FKBoundary::free_bc(lat);
    ScalingRow row;
    row.n = n;
    row.censored = 0;
    row.per_replica.assign(replicas, 0.0);
    row.seeds.assign(replicas, 0);
    std::vector<char> coalesced(replicas, 0);

    auto work = [&](int first, int step) {
      for (int r = first; r < replicas; r += step) {
        std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(n) *
                                                1000003ULL +
                                            r);
        auto run = grand_coupling_run(lat, bc, prm, s, t_max_sweeps);
        row.seeds[r] = s;
        row.per_replica[r] =
            run.coalesce_time ? *run.coalesce_time : t_max_sweeps;
        coalesced[r] = run.coalesce_time.has_value();
      }
    };
    if (threads <= 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
      for (auto& th : pool) th.join();
    }
    for (char c : coalesced) row.censored += !c;
    row.median_sweeps = median_of(row.per_replica);
    row.iqr_low = quantile_of(row.per_replica, 0.25);
    row.iqr_high = quantile_of(row.per_replica, 0.75);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace critmix
