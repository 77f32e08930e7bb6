#include "critmix/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "critmix/connectivity.hpp"
#include "critmix/coupling.hpp"
#include "critmix/dynamics.hpp"

namespace critmix {

namespace {

struct MiniUF {
  std::vector<int> parent;
  explicit MiniUF(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

bool detect_crossing(const Lattice& lat, const BondConfig& omega,
                     const CrossingSpec& spec) {
  if (spec.dual) {
    DualEdgeMap map = dual_map(lat);
    BondConfig dual_omega = dual_config(lat, map, omega);
    CrossingSpec inner = spec;
    inner.dual = false;
    return detect_crossing(map.dual, dual_omega, inner);
  }
  const Rect& r = spec.region;
  if (r.width() <= 0 || r.height() <= 0)
    throw std::invalid_argument("crossing region is degenerate");
  if (!lat.rect_in_lattice(r))
    throw std::invalid_argument("crossing region not inside the lattice");

  const int w = r.width() + 1, h = r.height() + 1;
  auto rid = [&](int dx, int dy) { return dy * w + dx; };
  auto ring = [&](int dx, int dy) {
    return dx == 0 || dx == r.width() || dy == 0 || dy == r.height();
  };
  MiniUF uf(w * h);
  for (int dy = 0; dy < h; ++dy)
    for (int dx = 0; dx < w; ++dx) {
      int u = lat.vertex_index(r.x0 + dx, r.y0 + dy);
      if (dx + 1 < w) {
        bool usable = spec.include_region_boundary_edges ||
                      !(ring(dx, dy) && ring(dx + 1, dy));
        int e = lat.edge_between(u, lat.vertex_index(r.x0 + dx + 1, r.y0 + dy));
        if (usable && e >= 0 && omega.open[e]) uf.unite(rid(dx, dy), rid(dx + 1, dy));
      }
      if (dy + 1 < h) {
        bool usable = spec.include_region_boundary_edges ||
                      !(ring(dx, dy) && ring(dx, dy + 1));
        int e = lat.edge_between(u, lat.vertex_index(r.x0 + dx, r.y0 + dy + 1));
        if (usable && e >= 0 && omega.open[e]) uf.unite(rid(dx, dy), rid(dx, dy + 1));
      }
    }
  if (spec.direction == CrossDirection::Vertical) {
    for (int ax = 0; ax < w; ++ax)
      for (int bx = 0; bx < w; ++bx)
        if (uf.find(rid(ax, 0)) == uf.find(rid(bx, r.height()))) return true;
    return false;
  }
  for (int ay = 0; ay < h; ++ay)
    for (int by = 0; by < h; ++by)
      if (uf.find(rid(0, ay)) == uf.find(rid(r.width(), by))) return true;
  return false;
}

BondConfig dual_config(const Lattice& lat, const DualEdgeMap& map,
                       const BondConfig& omega) {
  BondConfig out;
  out.open.assign(map.dual.edge_count(), 1);  // unmapped dual edges open
  for (int de = 0; de < map.dual.edge_count(); ++de) {
    int e = map.from_dual[de];
    if (e >= 0) out.open[de] = omega.open[e] ? 0 : 1;
  }
  return out;
}

Rect full_dual_rect(const DualEdgeMap& map) {
  return Rect{0, 0, map.dual.n(), map.dual.np()};
}

bool detect_circuit(const Lattice& lat, const BondConfig& omega,
                    const Annulus& a) {
  if (lat.is_torus())
    throw std::invalid_argument("detect_circuit expects a box host");
  const Rect& outer = a.outer;
  const Rect& hole = a.inner;
  if (!outer.strictly_contains(hole))
    throw std::invalid_argument("invalid annulus");

  auto in_A = [&](int x, int y) {
    return outer.contains(x, y) && !hole.contains(x, y);
  };
  // interior of the annulus w.r.t. Z^2
  auto in_A0 = [&](int x, int y) {
    if (!in_A(x, y)) return false;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d)
      if (!in_A(x + dx[d], y + dy[d])) return false;
    return true;
  };

  // Face graph: face (fx,fy) is the unit square with SW corner (fx,fy),
  // fx in [-1,n], fy in [-1,n'].  Neighboring faces are separated by a
  // primal edge; the dual step is blocked iff that edge is open and usable
  // by a circuit (both endpoints interior to the annulus).
  const int fw = lat.n() + 2, fh = lat.np() + 2;
  auto fid = [&](int fx, int fy) { return (fy + 1) * fw + (fx + 1); };
  auto blocked = [&](int x1, int y1, int x2, int y2) {
    if (!in_A0(x1, y1) || !in_A0(x2, y2)) return false;
    int e = lat.edge_between(lat.vertex_index(x1, y1),
                             lat.vertex_index(x2, y2));
    return e >= 0 && omega.open[e] != 0;
  };

  MiniUF uf(fw * fh);
  for (int fy = -1; fy <= lat.np(); ++fy)
    for (int fx = -1; fx <= lat.n(); ++fx) {
      // east neighbor: separated by the primal vertical edge
      // (fx+1,fy)-(fx+1,fy+1)
      if (fx + 1 <= lat.n() && !blocked(fx + 1, fy, fx + 1, fy + 1))
        uf.unite(fid(fx, fy), fid(fx + 1, fy));
      // north neighbor: separated by the primal horizontal edge
      // (fx,fy+1)-(fx+1,fy+1)
      if (fy + 1 <= lat.np() && !blocked(fx, fy + 1, fx + 1, fy + 1))
        uf.unite(fid(fx, fy), fid(fx, fy + 1));
    }

  // source: faces holding a hole corner; sink: faces not fully inside outer
  int src = fid(hole.x0 - 1, hole.y0 - 1);
  for (int fy = hole.y0 - 1; fy <= hole.y1; ++fy)
    for (int fx = hole.x0 - 1; fx <= hole.x1; ++fx)
      uf.unite(src, fid(fx, fy));
  int snk = fid(-1, -1);
  for (int fy = -1; fy <= lat.np(); ++fy)
    for (int fx = -1; fx <= lat.n(); ++fx) {
      bool inside_outer = fx >= outer.x0 && fx + 1 <= outer.x1 &&
                          fy >= outer.y0 && fy + 1 <= outer.y1;
      if (!inside_outer) uf.unite(snk, fid(fx, fy));
    }
  // circuit exists iff the dual flow from hole to outside is blocked
  return uf.find(src) != uf.find(snk);
}

// ------------------------------------------------------------- torus loops

namespace {

// Connectivity of one strip read on the universal cover.  cols/rows give
// the cover extent; wrap happens through the mod in the edge lookup.
struct StripCover {
  const Lattice& lat;
  bool vertical;  // vertical strip: columns [a,b] x rows [0,np]
  int a, b;

  int cover_w() const { return b - a + 1; }
  int cover_h() const { return vertical ? lat.np() + 1 : lat.n() + 1; }

  // cover coordinate -> torus vertex
  int torus_vertex(int i, int j) const {
    return vertical ? lat.vertex_index(a + i, j) : lat.vertex_index(j, a + i);
  }
  // edge between neighboring cover vertices
  int torus_edge(int i1, int j1, int i2, int j2) const {
    return lat.edge_between(torus_vertex(i1, j1), torus_vertex(i2, j2));
  }
};

bool strip_loop_event(const StripCover& sc, const BondConfig& omega) {
  const int w = sc.cover_w(), h = sc.cover_h();
  MiniUF uf(w * h);
  auto id = [&](int i, int j) { return j * w + i; };
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      if (i + 1 < w) {
        int e = sc.torus_edge(i, j, i + 1, j);
        if (e >= 0 && omega.open[e]) uf.unite(id(i, j), id(i + 1, j));
      }
      if (j + 1 < h) {
        int e = sc.torus_edge(i, j, i, j + 1);
        if (e >= 0 && omega.open[e]) uf.unite(id(i, j), id(i, j + 1));
      }
    }
  for (int i = 0; i < w; ++i)
    if (uf.find(id(i, 0)) == uf.find(id(i, h - 1))) return true;
  return false;
}

bool strip_loop_event_potts(const StripCover& sc, const Lattice& lat,
                            const SpinConfig& sigma, const PottsBoundary& bc,
                            int color) {
  const int w = sc.cover_w(), h = sc.cover_h();
  auto col = [&](int v) {
    return bc.is_fixed(v) ? bc.fixed_color(v) : sigma.color[v];
  };
  MiniUF uf(w * h);
  auto id = [&](int i, int j) { return j * w + i; };
  auto ok = [&](int i, int j) { return col(sc.torus_vertex(i, j)) == color; };
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      if (!ok(i, j)) continue;
      if (i + 1 < w && ok(i + 1, j)) uf.unite(id(i, j), id(i + 1, j));
      if (j + 1 < h && ok(i, j + 1)) uf.unite(id(i, j), id(i, j + 1));
    }
  for (int i = 0; i < w; ++i)
    if (ok(i, 0) && uf.find(id(i, 0)) == uf.find(id(i, h - 1))) return true;
  return false;
}

void check_strip_divisibility(const Lattice& lat) {
  if (!lat.is_torus())
    throw std::invalid_argument("loop events require a torus");
  if (lat.n() % 3 != 0 || lat.np() % 3 != 0)
    throw std::invalid_argument(
        "loop events require n and n' divisible by 3 (strips are defined as "
        "exact thirds)");
}

StripCover strip(const Lattice& lat, bool vertical, int i) {
  int extent = vertical ? lat.n() : lat.np();
  return StripCover{lat, vertical, i * extent / 3, (i + 1) * extent / 3};
}

}  // namespace

TorusLoopEvents torus_loop_events(const Lattice& lat,
                                  const BondConfig& omega) {
  check_strip_divisibility(lat);
  TorusLoopEvents ev{};
  ev.all = true;
  for (int i = 0; i < 3; ++i) {
    ev.vertical[i] = strip_loop_event(strip(lat, true, i), omega);
    ev.horizontal[i] = strip_loop_event(strip(lat, false, i), omega);
    ev.all = ev.all && ev.vertical[i] && ev.horizontal[i];
  }
  return ev;
}

TorusLoopEvents potts_loop_events(const Lattice& lat, const SpinConfig& sigma,
                                  const PottsBoundary& bc, int color) {
  check_strip_divisibility(lat);
  TorusLoopEvents ev{};
  ev.all = true;
  for (int i = 0; i < 3; ++i) {
    ev.vertical[i] =
        strip_loop_event_potts(strip(lat, true, i), lat, sigma, bc, color);
    ev.horizontal[i] =
        strip_loop_event_potts(strip(lat, false, i), lat, sigma, bc, color);
    ev.all = ev.all && ev.vertical[i] && ev.horizontal[i];
  }
  return ev;
}

std::vector<int> pivotal_edges_for_S(const Lattice& lat,
                                     const BondConfig& omega) {
  TorusLoopEvents ev = torus_loop_events(lat, omega);
  if (!ev.all)
    throw std::invalid_argument("pivotal_edges_for_S: configuration not in S");

  auto strip_contains_edge = [&](const StripCover& sc, int e) {
    auto ed = lat.edge(e);
    auto [x1, y1] = lat.vertex_xy(ed.u);
    int extent = sc.vertical ? lat.n() : lat.np();
    int c1 = sc.vertical ? x1 : y1;
    int span = ed.horizontal == sc.vertical ? 1 : 0;
    // covered iff some lift of [c1, c1+span] fits inside [a, b]
    int width = sc.b - sc.a;
    int rel = ((c1 - sc.a) % extent + extent) % extent;
    return rel + span <= width;
  };

  std::vector<int> pivotal;
  BondConfig work = omega;
  for (int e = 0; e < lat.edge_count(); ++e) {
    if (!omega.open[e]) continue;
    work.open[e] = 0;
    bool breaks = false;
    for (int i = 0; i < 3 && !breaks; ++i) {
      StripCover sv = strip(lat, true, i);
      if (strip_contains_edge(sv, e) && !strip_loop_event(sv, work))
        breaks = true;
      StripCover sh = strip(lat, false, i);
      if (!breaks && strip_contains_edge(sh, e) && !strip_loop_event(sh, work))
        breaks = true;
    }
    if (breaks) pivotal.push_back(e);
    work.open[e] = 1;
  }
  return pivotal;
}

// -------------------------------------------------------------- estimators

WilsonInterval wilson_interval(long long hits, long long trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(hits) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2 * n)) / denom;
  double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

// Equilibrium-approximate FK sample: grand coupling driven for
// `sweeps`; if the chains coalesce the bias is the usual forward-coupling
// bias, otherwise the upper chain is returned and flagged.
BondConfig fk_sample(const Lattice& lat, const FKBoundary& bc,
                     const Params& prm, std::uint64_t seed, double sweeps,
                     bool* approximate) {
  auto run = grand_coupling_run(lat, bc, prm, seed, sweeps);
  if (approximate) *approximate = !run.coalesced();
  return run.upper;
}

template <typename Work>
void parallel_replicas(int replicas, int threads, Work&& work) {
  if (threads <= 1) {
    for (int r = 0; r < replicas; ++r) work(r);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int r = t; r < replicas; r += threads) work(r);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

BottleneckReport estimate_conductance_bottleneck(
    int n, const Params& prm, const BottleneckOptions& opts) {
  Lattice lat = Lattice::torus(n, n);
  FKBoundary bc = FKBoundary::periodic(lat);
  BottleneckReport rep;
  rep.samples = opts.replicas;
  bool iid = opts.iid_percolation || prm.q == 1.0;
  rep.approximate_sampler = !iid;

  std::vector<char> in_S(opts.replicas, 0), in_dS(opts.replicas, 0);
  parallel_replicas(opts.replicas, opts.threads, [&](int r) {
    std::uint64_t seed = derive_seed(opts.seed, r);
    BondConfig cfg;
    if (iid) {
      Rng rng(seed);
      cfg = all_bonds(lat, bc, false);
      for (int e = 0; e < lat.edge_count(); ++e)
        cfg.open[e] = rng.u01() <= prm.p ? 1 : 0;
    } else {
      cfg = fk_sample(lat, bc, prm, seed, opts.burnin_sweeps, nullptr);
    }
    auto ev = torus_loop_events(lat, cfg);
    if (!ev.all) return;
    in_S[r] = 1;
    in_dS[r] = !pivotal_edges_for_S(lat, cfg).empty();
  });

  for (int r = 0; r < opts.replicas; ++r) {
    rep.in_S += in_S[r];
    rep.in_boundary_S += in_dS[r];
  }
  rep.p_S = static_cast<double>(rep.in_S) / rep.samples;
  rep.p_S_ci = wilson_interval(rep.in_S, rep.samples);
  if (rep.in_S == 0) {
    rep.no_data = true;
    return rep;
  }
  rep.p_dS_given_S = static_cast<double>(rep.in_boundary_S) / rep.in_S;
  rep.p_dS_given_S_ci = wilson_interval(rep.in_boundary_S, rep.in_S);
  return rep;
}

FrequencyEstimate one_arm_probability(int n, const Params& prm, int replicas,
                                      double burnin_sweeps, std::uint64_t seed,
                                      int threads) {
  if (n % 4 != 0) throw std::invalid_argument("one-arm box side must be 4k");
  Lattice lat = Lattice::box(n, n);
  FKBoundary bc = FKBoundary::free_bc(lat);
  const int origin = lat.vertex_index(n / 2, n / 2);
  Rect half{n / 4, n / 4, 3 * n / 4, 3 * n / 4};

  std::vector<char> hit(replicas, 0);
  parallel_replicas(replicas, threads, [&](int r) {
    BondConfig cfg =
        fk_sample(lat, bc, prm, derive_seed(seed, r), burnin_sweeps, nullptr);
    auto lab = label_clusters(lat, cfg, bc);
    for (int x = half.x0; x <= half.x1 && !hit[r]; ++x)
      for (int y : {half.y0, half.y1})
        if (lab.label[lat.vertex_index(x, y)] == lab.label[origin]) {
          hit[r] = 1;
          break;
        }
    for (int y = half.y0; y <= half.y1 && !hit[r]; ++y)
      for (int x : {half.x0, half.x1})
        if (lab.label[lat.vertex_index(x, y)] == lab.label[origin]) {
          hit[r] = 1;
          break;
        }
  });

  FrequencyEstimate est;
  est.trials = replicas;
  for (char h : hit) est.hits += h;
  est.frequency = static_cast<double>(est.hits) / est.trials;
  est.ci = wilson_interval(est.hits, est.trials);
  return est;
}

std::vector<PairCorrelation> two_point_correlation(
    int n, const Params& prm, const std::vector<std::array<int, 4>>& pairs,
    int replicas, double burnin_sweeps, std::uint64_t seed, int threads) {
  Lattice lat = Lattice::box(n, n);
  FKBoundary bc = FKBoundary::free_bc(lat);
  std::vector<std::vector<char>> hits(pairs.size(),
                                      std::vector<char>(replicas, 0));
  parallel_replicas(replicas, threads, [&](int r) {
    BondConfig cfg =
        fk_sample(lat, bc, prm, derive_seed(seed, r), burnin_sweeps, nullptr);
    auto lab = label_clusters(lat, cfg, bc);
    for (size_t i = 0; i < pairs.size(); ++i) {
      auto [x1, y1, x2, y2] = pairs[i];
      hits[i][r] = lab.label[lat.vertex_index(x1, y1)] ==
                   lab.label[lat.vertex_index(x2, y2)];
    }
  });
  std::vector<PairCorrelation> out;
  for (size_t i = 0; i < pairs.size(); ++i) {
    PairCorrelation pc{pairs[i][0], pairs[i][1], pairs[i][2], pairs[i][3], {}};
    pc.estimate.trials = replicas;
    for (char h : hits[i]) pc.estimate.hits += h;
    pc.estimate.frequency =
        static_cast<double>(pc.estimate.hits) / pc.estimate.trials;
    pc.estimate.ci = wilson_interval(pc.estimate.hits, pc.estimate.trials);
    out.push_back(pc);
  }
  return out;
}

long long variance_test_function(const Lattice& lat, const SpinConfig& sigma,
                                 const PottsBoundary& bc, const Rect& inner,
                                 int color) {
  if (!lat.rect_in_lattice(inner))
    throw std::invalid_argument("inner rectangle not inside the lattice");
  long long count = 0;
  for (int y = inner.y0; y <= inner.y1; ++y)
    for (int x = inner.x0; x <= inner.x1; ++x) {
      int v = lat.vertex_index(x, y);
      int c = bc.is_fixed(v) ? bc.fixed_color(v) : sigma.color[v];
      count += c == color;
    }
  return count;
}

}  // namespace critmix
