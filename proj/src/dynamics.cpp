#include "critmix/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace critmix {

UpdateStream::UpdateStream(std::uint64_t seed, StreamMode mode,
                           int num_locations)
    : seed_(seed), mode_(mode), nloc_(num_locations), rng_(seed) {
  if (num_locations <= 0)
    throw std::invalid_argument("stream needs at least one location");
}

Update UpdateStream::next() {
  Update u;
  u.location = static_cast<int>(rng_.below(nloc_));
  u.u = rng_.u01();
  if (mode_ == StreamMode::DiscreteRandomScan) {
    ++count_;
    time_ = static_cast<double>(count_) / nloc_;
  } else {
    time_ += rng_.exponential(static_cast<double>(nloc_));
    ++count_;
  }
  u.time = time_;
  return u;
}

UpdateStream UpdateStream::resume(std::uint64_t seed, StreamMode mode,
                                  int num_locations, std::uint64_t position) {
  UpdateStream s(seed, mode, num_locations);
  for (std::uint64_t i = 0; i < position; ++i) s.next();
  return s;
}

// ------------------------------------------------------------------ Glauber

void potts_glauber_update(const Lattice& lat, SpinConfig& sigma, int site,
                          double u, const PottsBoundary& bc,
                          const Params& prm) {
  int q = prm.q_int();
  if (bc.is_fixed(site))
    throw std::invalid_argument(
        "potts_glauber_update: site is fixed by the boundary condition");
  // neighbor color histogram (colored boundary vertices included)
  int hist[16] = {0};
  if (q > 15) throw std::invalid_argument("q too large for the color table");
  for (int w : lat.neighbors(site)) {
    int c = bc.is_fixed(w) ? bc.fixed_color(w) : sigma.color[w];
    ++hist[c];
  }
  double w[16];
  double total = 0.0;
  for (int k = 1; k <= q; ++k) {
    w[k] = std::exp(prm.beta * hist[k]);
    total += w[k];
  }
  double acc = 0.0;
  int chosen = q;
  for (int k = 1; k <= q; ++k) {
    acc += w[k] / total;
    if (u <= acc) {
      chosen = k;
      break;
    }
  }
  sigma.color[site] = static_cast<std::uint8_t>(chosen);
}

double fk_open_threshold(const Params& prm, bool connected_without) {
  return connected_without ? prm.p
                           : prm.p / (prm.p + prm.q * (1.0 - prm.p));
}

void fk_glauber_update(const Lattice& lat, BondConfig& omega, int e, double u,
                       const FKBoundary& bc, const Params& prm,
                       ConnectivityQuery& query) {
  if (edge_frozen(lat, bc, e))
    throw std::invalid_argument(
        "fk_glauber_update: edge is frozen by the boundary condition");
  bool conn = query.connected_without_edge(omega, e);
  omega.open[e] = u <= fk_open_threshold(prm, conn) ? 1 : 0;
}

// -------------------------------------------------------- cluster dynamics

SpinConfig swendsen_wang_step(const Lattice& lat, const SpinConfig& sigma,
                              const PottsBoundary& bc, const Params& prm,
                              Rng& rng) {
  int q = prm.q_int();
  FKBoundary fbc = FKBoundary::from_potts(lat, bc);
  auto color_of = [&](int v) {
    return bc.is_fixed(v) ? bc.fixed_color(v) : sigma.color[v];
  };
  // step 1: percolate agreeing edges
  BondConfig omega = all_bonds(lat, fbc, false);
  for (int e : active_edges(lat, fbc)) {
    auto ed = lat.edge(e);
    if (color_of(ed.u) != color_of(ed.v)) continue;
    omega.open[e] = rng.u01() <= prm.p ? 1 : 0;
  }
  // step 2: recolor clusters; boundary-dictated clusters keep their color
  auto lab = label_clusters(lat, omega, FKBoundary::free_bc(lat));
  std::vector<int> dictated(lab.cluster_labels.size(), 0);
  for (int v = 0; v < lat.vertex_count(); ++v) {
    if (!bc.is_fixed(v)) continue;
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    dictated[it - lab.cluster_labels.begin()] = bc.fixed_color(v);
  }
  std::vector<int> cluster_color(lab.cluster_labels.size());
  for (size_t ci = 0; ci < cluster_color.size(); ++ci)
    cluster_color[ci] = dictated[ci] != 0
                            ? dictated[ci]
                            : static_cast<int>(rng.below(q)) + 1;
  SpinConfig out = sigma;
  for (int v = 0; v < lat.vertex_count(); ++v) {
    if (bc.is_fixed(v)) continue;
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    out.color[v] =
        static_cast<std::uint8_t>(cluster_color[it - lab.cluster_labels.begin()]);
  }
  return out;
}

BondConfig chayes_machta_step(const Lattice& lat, const BondConfig& omega,
                              const FKBoundary& bc, const Params& prm,
                              Rng& rng) {
  auto lab = label_clusters(lat, omega, bc);
  // boundary-wired clusters are never activated
  std::vector<char> wired(lab.cluster_labels.size(), 0);
  for (int v = 0; v < lat.vertex_count(); ++v) {
    if (bc.class_of(v) < 0) continue;
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    wired[it - lab.cluster_labels.begin()] = 1;
  }
  std::vector<char> active(lab.cluster_labels.size(), 0);
  for (size_t ci = 0; ci < active.size(); ++ci)
    active[ci] = !wired[ci] && rng.u01() <= 1.0 / prm.q;
  auto cluster_index = [&](int v) {
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    return static_cast<size_t>(it - lab.cluster_labels.begin());
  };
  BondConfig out = omega;
  for (int e : active_edges(lat, bc)) {
    auto ed = lat.edge(e);
    if (active[cluster_index(ed.u)] && active[cluster_index(ed.v)])
      out.open[e] = rng.u01() <= prm.p ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------- block dynamics

bool BlockDynamics::step(const Lattice& lat, SpinConfig& sigma, int which,
                         const PottsBoundary& bc, const Params& prm,
                         Rng& rng) const {
  int q = prm.q_int();
  const Region& region = blocks.at(which);
  std::vector<int> sites;
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (!bc.is_fixed(v) && region.contains_vertex(lat, v)) sites.push_back(v);
  if (sites.empty()) return true;

  double count =
      std::pow(static_cast<double>(q), static_cast<double>(sites.size()));
  if (count > static_cast<double>(exact_cap)) {
    if (fallback_sweeps <= 0)
      throw std::length_error(
          "block too large for exact resampling and no fallback configured");
    // nested-chain fallback, flagged approximate via the return value
    for (int sweep = 0; sweep < fallback_sweeps; ++sweep)
      for (size_t i = 0; i < sites.size(); ++i) {
        int s = sites[rng.below(sites.size())];
        potts_glauber_update(lat, sigma, s, rng.u01(), bc, prm);
      }
    return false;
  }

  std::int64_t n = static_cast<std::int64_t>(count + 0.5);
  // conditional weights given the configuration outside the block
  std::vector<double> w(n);
  double total = 0.0;
  SpinConfig work = sigma;
  auto color_of = [&](int v) {
    return bc.is_fixed(v) ? bc.fixed_color(v) : work.color[v];
  };
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t t = idx;
    for (int s : sites) {
      work.color[s] = static_cast<std::uint8_t>(t % q + 1);
      t /= q;
    }
    long long agree = 0;
    // only edges touching the block matter; the rest cancels
    for (int s : sites)
      for (size_t i = 0; i < lat.neighbors(s).size(); ++i) {
        int v = lat.neighbors(s)[i];
        if (color_of(s) == color_of(v)) {
          // count block-internal edges once
          bool internal =
              std::binary_search(sites.begin(), sites.end(), v);
          if (!internal || v > s) ++agree;
        }
      }
    w[idx] = std::exp(prm.beta * static_cast<double>(agree));
    total += w[idx];
  }
  double u = rng.u01() * total;
  double acc = 0.0;
  std::int64_t chosen = n - 1;
  for (std::int64_t idx = 0; idx < n; ++idx) {
    acc += w[idx];
    if (u <= acc) {
      chosen = idx;
      break;
    }
  }
  for (int s : sites) {
    sigma.color[s] = static_cast<std::uint8_t>(chosen % q + 1);
    chosen /= q;
  }
  return true;
}

// -------------------------------------------------------------- censoring

void CensorSchedule::validate(double t_from, double t_until) const {
  if (intervals.empty())
    throw std::invalid_argument("empty censoring schedule");
  if (intervals.front().t_begin > t_from ||
      intervals.back().t_end < t_until)
    throw std::invalid_argument(
        "censoring schedule does not cover the requested time window");
  for (size_t i = 0; i + 1 < intervals.size(); ++i)
    if (std::abs(intervals[i].t_end - intervals[i + 1].t_begin) > 1e-12)
      throw std::invalid_argument("censoring intervals must be contiguous");
}

const CensorInterval* CensorSchedule::interval_at(double t) const {
  for (const auto& iv : intervals)
    if (t >= iv.t_begin && t < iv.t_end) return &iv;
  if (!intervals.empty() && t >= intervals.back().t_end)
    return &intervals.back();
  return nullptr;
}

namespace {

template <typename ApplyReset, typename ApplyUpdate>
void run_loop(UpdateStream& stream, double until,
              const CensorSchedule* schedule, ApplyReset&& apply_reset,
              ApplyUpdate&& apply_update, double* clock,
              std::uint64_t* position) {
  if (schedule) schedule->validate(*clock, until);
  size_t reset_cursor = 0;
  while (stream.time() < until) {
    // fire reset actions whose interval starts before the next update
    Update u = stream.next();
    if (u.time > until + 1e-12) {
      // the update falls past the horizon and is dropped; runs are
      // bit-reproducible for a fixed horizon
      *clock = until;
      *position = stream.position();
      break;
    }
    if (schedule) {
      while (reset_cursor < schedule->intervals.size() &&
             schedule->intervals[reset_cursor].t_begin <= u.time) {
        apply_reset(schedule->intervals[reset_cursor]);
        ++reset_cursor;
      }
      const CensorInterval* iv = schedule->interval_at(u.time);
      if (iv && iv->allowed.has_value() &&
          !apply_update(u, &*iv->allowed)) {
        // skipped: outside the allowed region; clock still advances
      }
    } else {
      apply_update(u, nullptr);
    }
    *clock = std::min(u.time, until);
    *position = stream.position();
  }
}

}  // namespace

void run_potts(const Lattice& lat, PottsChainState& state,
               UpdateStream& stream, double until, const PottsBoundary& bc,
               const Params& prm, const CensorSchedule* schedule) {
  auto sites = active_sites(lat, bc);
  if (stream.num_locations() != static_cast<int>(sites.size()))
    throw std::invalid_argument("stream location count != active sites");
  run_loop(
      stream, until, schedule, [&](const CensorInterval&) {},
      [&](const Update& u, const Region* allowed) {
        int site = sites[u.location];
        if (allowed && !allowed->contains_vertex(lat, site)) return false;
        potts_glauber_update(lat, state.config, site, u.u, bc, prm);
        return true;
      },
      &state.clock, &state.stream_position);
}

void run_fk(const Lattice& lat, FKChainState& state, UpdateStream& stream,
            double until, const FKBoundary& bc, const Params& prm,
            const CensorSchedule* schedule) {
  auto edges = active_edges(lat, bc);
  if (stream.num_locations() != static_cast<int>(edges.size()))
    throw std::invalid_argument("stream location count != active edges");
  ConnectivityQuery query(lat, bc);
  run_loop(
      stream, until, schedule,
      [&](const CensorInterval& iv) {
        if (iv.reset == CensorInterval::Reset::None) return;
        bool open = iv.reset == CensorInterval::Reset::AllOpen;
        for (int e : edges) {
          if (iv.reset_region && !iv.reset_region->contains_edge(lat, e))
            continue;
          state.config.open[e] = open ? 1 : 0;
        }
      },
      [&](const Update& u, const Region* allowed) {
        int e = edges[u.location];
        if (allowed && !allowed->contains_edge(lat, e)) return false;
        fk_glauber_update(lat, state.config, e, u.u, bc, prm, query);
        return true;
      },
      &state.clock, &state.stream_position);
}

// ------------------------------------------------------------- checkpoints

void write_checkpoint(std::ostream& os, const Lattice& lat,
                      const FKChainState& state, const FKBoundary& bc,
                      const Params& prm, const UpdateStream& stream) {
  os << "critmix-checkpoint\n";
  os << "clock " << state.clock << " stream_seed " << stream.seed()
     << " mode "
     << (stream.mode() == StreamMode::DiscreteRandomScan ? "scan" : "poisson")
     << " position " << stream.position() << "\n";
  write_bond_config(os, lat, state.config, bc, prm);
}

FKCheckpoint read_checkpoint(std::istream& is, const Lattice& lat) {
  std::string magic;
  std::getline(is, magic);
  if (magic != "critmix-checkpoint")
    throw std::runtime_error("bad checkpoint header");
  std::string line;
  std::getline(is, line);
  std::istringstream ls(line);
  std::string k, mode;
  FKCheckpoint cp;
  ls >> k >> cp.state.clock >> k >> cp.stream_seed >> k >> mode >> k >>
      cp.stream_position;
  cp.stream_mode = mode == "scan" ? StreamMode::DiscreteRandomScan
                                  : StreamMode::ContinuousPoisson;
  cp.state.stream_position = cp.stream_position;
  cp.state.config = read_bond_config(is, lat);
  return cp;
}

}  // namespace critmix
