#include "critmix/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "critmix/connectivity.hpp"

namespace critmix {

Params Params::from_p(double q, double p) {
  if (q < 1.0) throw std::invalid_argument("q must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  Params out;
  out.q = q;
  out.p = p;
  out.beta = -std::log1p(-p);
  return out;
}

Params Params::from_beta(double q, double beta) {
  if (q < 1.0) throw std::invalid_argument("q must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  Params out;
  out.q = q;
  out.beta = beta;
  out.p = -std::expm1(-beta);
  return out;
}

Params Params::critical(double q) {
  auto [pc, bc] = critical_point(q);
  Params out;
  out.q = q;
  out.p = pc;
  out.beta = bc;
  return out;
}

bool Params::integer_q() const {
  return std::abs(q - std::round(q)) < 1e-9 && q >= 2.0;
}

int Params::q_int() const {
  if (!integer_q())
    throw std::invalid_argument("operation requires integer q >= 2");
  return static_cast<int>(std::round(q));
}

std::pair<double, double> critical_point(double q) {
  if (q < 1.0) throw std::invalid_argument("q must be >= 1");
  double s = std::sqrt(q);
  return {s / (1.0 + s), std::log1p(s)};
}

double dual_parameter(double p, double q) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  if (q < 1.0) throw std::invalid_argument("q must be >= 1");
  return q * (1.0 - p) / (p + q * (1.0 - p));
}

// ---------------------------------------------------------------- boundaries

PottsBoundary PottsBoundary::free_bc(const Lattice& lat) {
  PottsBoundary b;
  b.color_.assign(lat.vertex_count(), 0);
  b.lat_ = &lat;
  return b;
}

PottsBoundary PottsBoundary::periodic(const Lattice& lat) {
  if (!lat.is_torus())
    throw std::invalid_argument("periodic boundary requires a torus");
  PottsBoundary b = free_bc(lat);
  b.periodic_ = true;
  return b;
}

PottsBoundary PottsBoundary::monochromatic(const Lattice& lat, int color) {
  return sides_colored(lat, kSideAll, color);
}

PottsBoundary PottsBoundary::sides_colored(const Lattice& lat,
                                           unsigned side_mask, int color) {
  if (lat.is_torus())
    throw std::invalid_argument("colored boundary requires a box");
  PottsBoundary b = free_bc(lat);
  for (int v : lat.boundary_vertices(side_mask)) b.color_[v] = color;
  return b;
}

void PottsBoundary::set_color(int v, int color) {
  if (!lat_->on_boundary(v))
    throw std::invalid_argument("only boundary vertices can be colored");
  color_[v] = color;
}

int PottsBoundary::fixed_count() const {
  int c = 0;
  for (int x : color_) c += x != 0;
  return c;
}

void FKBoundary::canonicalize(const Lattice& lat) {
  // Recompute representatives as the minimum vertex index per class and
  // drop singleton classes (a vertex wired to nobody is unconstrained).
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (class_[v] >= 0) groups[class_[v]].push_back(v);
  std::fill(class_.begin(), class_.end(), -1);
  for (auto& [rep, members] : groups) {
    if (members.size() < 2) continue;
    int m = *std::min_element(members.begin(), members.end());
    for (int v : members) class_[v] = m;
  }
}

FKBoundary FKBoundary::free_bc(const Lattice& lat) {
  FKBoundary b;
  b.class_.assign(lat.vertex_count(), -1);
  return b;
}

FKBoundary FKBoundary::periodic(const Lattice& lat) {
  if (!lat.is_torus())
    throw std::invalid_argument("periodic boundary requires a torus");
  FKBoundary b = free_bc(lat);
  b.periodic_ = true;
  return b;
}

FKBoundary FKBoundary::wired(const Lattice& lat) {
  return sides_wired(lat, kSideAll);
}

FKBoundary FKBoundary::sides_wired(const Lattice& lat, unsigned side_mask) {
  if (lat.is_torus())
    throw std::invalid_argument("wired boundary requires a box");
  FKBoundary b = free_bc(lat);
  auto verts = lat.boundary_vertices(side_mask);
  for (int v : verts) b.class_[v] = 0;
  b.canonicalize(lat);
  return b;
}

FKBoundary FKBoundary::from_classes(
    const Lattice& lat, const std::vector<std::vector<int>>& classes) {
  FKBoundary b = free_bc(lat);
  int next = 0;
  for (const auto& cls : classes) {
    for (int v : cls) {
      if (!lat.on_boundary(v))
        throw std::invalid_argument("wired classes must consist of boundary "
                                    "vertices");
      if (b.class_[v] != -1)
        throw std::invalid_argument("wired classes must be disjoint");
      b.class_[v] = next;
    }
    ++next;
  }
  b.canonicalize(lat);
  return b;
}

FKBoundary FKBoundary::from_potts(const Lattice& lat,
                                  const PottsBoundary& zeta) {
  if (zeta.periodic_flag()) return periodic(lat);
  FKBoundary b = free_bc(lat);
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (zeta.is_fixed(v)) b.class_[v] = zeta.fixed_color(v);
  b.canonicalize(lat);
  return b;
}

std::vector<int> FKBoundary::representative_map(const Lattice& lat) const {
  std::vector<int> rep(lat.vertex_count());
  std::iota(rep.begin(), rep.end(), 0);
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (class_of(v) >= 0) rep[v] = class_of(v);
  return rep;
}

std::vector<std::vector<int>> FKBoundary::classes() const {
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < static_cast<int>(class_.size()); ++v)
    if (class_[v] >= 0) groups[class_[v]].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [rep, members] : groups) out.push_back(members);
  return out;
}

int FKBoundary::domain_size() const {
  int c = 0;
  for (int x : class_) c += x >= 0;
  return c;
}

// ------------------------------------------------------------ active sets

std::vector<int> active_sites(const Lattice& lat, const PottsBoundary& bc) {
  std::vector<int> out;
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (!bc.is_fixed(v)) out.push_back(v);
  return out;
}

bool edge_frozen(const Lattice& lat, const FKBoundary& bc, int e) {
  auto ed = lat.edge(e);
  return bc.in_domain(ed.u) && bc.in_domain(ed.v);
}

std::vector<int> active_edges(const Lattice& lat, const FKBoundary& bc) {
  std::vector<int> out;
  for (int e = 0; e < lat.edge_count(); ++e)
    if (!edge_frozen(lat, bc, e)) out.push_back(e);
  return out;
}

SpinConfig constant_spins(const Lattice& lat, const PottsBoundary& bc,
                          int color) {
  SpinConfig cfg;
  cfg.color.assign(lat.vertex_count(), static_cast<std::uint8_t>(color));
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (bc.is_fixed(v))
      cfg.color[v] = static_cast<std::uint8_t>(bc.fixed_color(v));
  return cfg;
}

BondConfig all_bonds(const Lattice& lat, const FKBoundary& bc, bool open) {
  BondConfig cfg;
  cfg.open.assign(lat.edge_count(), 0);
  if (open)
    for (int e : active_edges(lat, bc)) cfg.open[e] = 1;
  return cfg;
}

// ----------------------------------------------------------------- weights

namespace {
inline int color_at(const SpinConfig& cfg, const PottsBoundary& bc, int v) {
  return bc.is_fixed(v) ? bc.fixed_color(v) : cfg.color[v];
}
}  // namespace

long long potts_agree_count(const Lattice& lat, const SpinConfig& cfg,
                            const PottsBoundary& bc) {
  long long agree = 0;
  for (int e = 0; e < lat.edge_count(); ++e) {
    auto ed = lat.edge(e);
    if (bc.is_fixed(ed.u) && bc.is_fixed(ed.v)) continue;  // constant factor
    agree += color_at(cfg, bc, ed.u) == color_at(cfg, bc, ed.v);
  }
  return agree;
}

double potts_weight(const Lattice& lat, const SpinConfig& cfg,
                    const PottsBoundary& bc, const Params& prm) {
  prm.q_int();
  return std::exp(prm.beta *
                  static_cast<double>(potts_agree_count(lat, cfg, bc)));
}

FKWeightParts fk_weight_parts(const Lattice& lat, const BondConfig& cfg,
                              const FKBoundary& bc) {
  FKWeightParts parts{0, 0, 0};
  for (int e = 0; e < lat.edge_count(); ++e) {
    if (edge_frozen(lat, bc, e)) continue;
    if (cfg.open[e]) ++parts.open_bonds;
    else ++parts.closed_bonds;
  }
  parts.clusters = label_clusters(lat, cfg, bc).cluster_count;
  return parts;
}

double fk_weight(const Lattice& lat, const BondConfig& cfg,
                 const FKBoundary& bc, const Params& prm) {
  auto parts = fk_weight_parts(lat, cfg, bc);
  return std::pow(prm.p, static_cast<double>(parts.open_bonds)) *
         std::pow(1.0 - prm.p, static_cast<double>(parts.closed_bonds)) *
         std::pow(prm.q, static_cast<double>(parts.clusters));
}

double es_joint_weight(const Lattice& lat, const SpinConfig& sigma,
                       const BondConfig& omega, const PottsBoundary& pbc,
                       const FKBoundary& fbc, const Params& prm) {
  double w = 1.0;
  for (int e = 0; e < lat.edge_count(); ++e) {
    if (edge_frozen(lat, fbc, e)) continue;
    auto ed = lat.edge(e);
    if (omega.open[e]) {
      if (color_at(sigma, pbc, ed.u) != color_at(sigma, pbc, ed.v)) return 0.0;
      w *= prm.p;
    } else {
      w *= 1.0 - prm.p;
    }
  }
  return w;
}

// ------------------------------------------------------------- ES sampling

BondConfig es_potts_to_fk(const Lattice& lat, const SpinConfig& sigma,
                          const PottsBoundary& pbc, const Params& prm,
                          Rng& rng) {
  prm.q_int();
  FKBoundary fbc = FKBoundary::from_potts(lat, pbc);
  BondConfig out = all_bonds(lat, fbc, false);
  for (int e : active_edges(lat, fbc)) {
    auto ed = lat.edge(e);
    if (color_at(sigma, pbc, ed.u) != color_at(sigma, pbc, ed.v)) continue;
    out.open[e] = rng.u01() <= prm.p ? 1 : 0;
  }
  return out;
}

SpinConfig es_fk_to_potts(const Lattice& lat, const BondConfig& omega,
                          const FKBoundary& fbc, const PottsBoundary& zeta,
                          const Params& prm, Rng& rng) {
  int q = prm.q_int();
  auto lab = label_clusters(lat, omega, fbc);
  // color dictated by the boundary coloring, or 0
  std::vector<int> dictated(lab.cluster_labels.size(), 0);
  for (int v = 0; v < lat.vertex_count(); ++v) {
    if (!zeta.is_fixed(v)) continue;
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    size_t ci = it - lab.cluster_labels.begin();
    int c = zeta.fixed_color(v);
    if (dictated[ci] != 0 && dictated[ci] != c)
      throw std::invalid_argument(
          "es_fk_to_potts: configuration violates E_zeta (a cluster touches "
          "two boundary colors); condition on E_zeta first");
    dictated[ci] = c;
  }
  std::vector<int> cluster_color(lab.cluster_labels.size());
  for (size_t ci = 0; ci < lab.cluster_labels.size(); ++ci)
    cluster_color[ci] = dictated[ci] != 0
                            ? dictated[ci]
                            : static_cast<int>(rng.below(q)) + 1;
  SpinConfig out;
  out.color.resize(lat.vertex_count());
  for (int v = 0; v < lat.vertex_count(); ++v) {
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    out.color[v] =
        static_cast<std::uint8_t>(cluster_color[it - lab.cluster_labels.begin()]);
  }
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (zeta.is_fixed(v))
      out.color[v] = static_cast<std::uint8_t>(zeta.fixed_color(v));
  return out;
}

bool event_E_zeta(const Lattice& lat, const BondConfig& omega,
                  const PottsBoundary& zeta, const FKBoundary& fbc) {
  auto lab = label_clusters(lat, omega, fbc);
  std::vector<int> seen(lab.cluster_labels.size(), 0);
  for (int v = 0; v < lat.vertex_count(); ++v) {
    if (!zeta.is_fixed(v)) continue;
    auto it = std::lower_bound(lab.cluster_labels.begin(),
                               lab.cluster_labels.end(), lab.label[v]);
    size_t ci = it - lab.cluster_labels.begin();
    int c = zeta.fixed_color(v);
    if (seen[ci] != 0 && seen[ci] != c) return false;
    seen[ci] = c;
  }
  return true;
}

// -------------------------------------------------------- boundary surgery

FKBoundary modify_boundary(const Lattice& lat, const FKBoundary& bc,
                           const std::vector<int>& delta) {
  for (int v : delta)
    if (!lat.on_boundary(v))
      throw std::invalid_argument(
          "modify_boundary: delta contains a non-boundary vertex");
  FKBoundary out = bc;
  for (int v : delta) out.class_[v] = -1;
  out.canonicalize(lat);
  return out;
}

FKBoundary induce_boundary(const Lattice& outer_lat,
                           const BondConfig& outer_cfg,
                           const FKBoundary& outer_bc, const Rect& target,
                           const Lattice& target_lat) {
  if (outer_lat.is_torus())
    throw std::invalid_argument("induce_boundary: outer lattice must be a box");
  Rect full{0, 0, outer_lat.n(), outer_lat.np()};
  if (!full.strictly_contains(target))
    throw std::invalid_argument(
        "induce_boundary: target must be strictly inside the outer lattice "
        "(annulus too thin)");
  if (target_lat.n() != target.width() || target_lat.np() != target.height() ||
      target_lat.is_torus())
    throw std::invalid_argument("induce_boundary: target lattice mismatch");

  Rect interior{target.x0 + 1, target.y0 + 1, target.x1 - 1, target.y1 - 1};
  auto in_interior = [&](int v) {
    auto [x, y] = outer_lat.vertex_xy(v);
    return target.x1 > target.x0 + 1 && target.y1 > target.y0 + 1 &&
           interior.contains(x, y);
  };

  // Connectivity in the complement of the target interior.
  std::vector<int> parent(outer_lat.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  };
  for (int e = 0; e < outer_lat.edge_count(); ++e) {
    if (!outer_cfg.open[e]) continue;
    auto ed = outer_lat.edge(e);
    if (in_interior(ed.u) || in_interior(ed.v)) continue;
    unite(ed.u, ed.v);
  }
  for (int v = 0; v < outer_lat.vertex_count(); ++v) {
    int c = outer_bc.class_of(v);
    if (c >= 0) unite(c, v);
  }

  std::map<int, std::vector<int>> groups;
  for (int y = target.y0; y <= target.y1; ++y)
    for (int x = target.x0; x <= target.x1; ++x) {
      bool on_target_boundary = x == target.x0 || x == target.x1 ||
                                y == target.y0 || y == target.y1;
      if (!on_target_boundary) continue;
      int v_outer = outer_lat.vertex_index(x, y);
      int v_target = target_lat.vertex_index(x - target.x0, y - target.y0);
      groups[find(v_outer)].push_back(v_target);
    }
  std::vector<std::vector<int>> classes;
  for (auto& [root, members] : groups)
    if (members.size() >= 2) classes.push_back(members);
  return FKBoundary::from_classes(target_lat, classes);
}

// ------------------------------------------------------------- enumeration

std::vector<double> WeightTable::probabilities() const {
  std::vector<double> out(weight.size());
  for (size_t i = 0; i < weight.size(); ++i) out[i] = weight[i] / Z;
  return out;
}

PottsEnsemble::PottsEnsemble(const Lattice& lat, const PottsBoundary& bc,
                             const Params& prm, std::int64_t cap)
    : lat_(lat), bc_(bc), prm_(prm), sites_(active_sites(lat, bc)) {
  int q = prm.q_int();
  double count = std::pow(static_cast<double>(q),
                          static_cast<double>(sites_.size()));
  if (count > static_cast<double>(cap)) {
    std::ostringstream msg;
    msg << "Potts state space too large: q^" << sites_.size() << " = " << count
        << " exceeds cap " << cap;
    throw std::length_error(msg.str());
  }
  nstates_ = static_cast<std::int64_t>(count + 0.5);
}

SpinConfig PottsEnsemble::decode(std::int64_t idx) const {
  int q = prm_.q_int();
  SpinConfig cfg = constant_spins(lat_, bc_, 1);
  for (int s : sites_) {
    cfg.color[s] = static_cast<std::uint8_t>(idx % q + 1);
    idx /= q;
  }
  return cfg;
}

std::int64_t PottsEnsemble::encode(const SpinConfig& cfg) const {
  int q = prm_.q_int();
  std::int64_t idx = 0;
  for (auto it = sites_.rbegin(); it != sites_.rend(); ++it)
    idx = idx * q + (cfg.color[*it] - 1);
  return idx;
}

WeightTable PottsEnsemble::weights() const {
  WeightTable t;
  t.weight.resize(nstates_);
  for (std::int64_t i = 0; i < nstates_; ++i) {
    SpinConfig cfg = decode(i);
    t.weight[i] = potts_weight(lat_, cfg, bc_, prm_);
    t.Z += t.weight[i];
  }
  return t;
}

FKEnsemble::FKEnsemble(const Lattice& lat, const FKBoundary& bc,
                       const Params& prm, std::int64_t cap)
    : lat_(lat), bc_(bc), prm_(prm), edges_(active_edges(lat, bc)) {
  if (edges_.size() >= 63 ||
      (std::int64_t(1) << edges_.size()) > cap) {
    std::ostringstream msg;
    msg << "FK state space too large: 2^" << edges_.size() << " exceeds cap "
        << cap;
    throw std::length_error(msg.str());
  }
}

BondConfig FKEnsemble::decode(std::int64_t idx) const {
  BondConfig cfg = all_bonds(lat_, bc_, false);
  for (size_t i = 0; i < edges_.size(); ++i)
    cfg.open[edges_[i]] = (idx >> i) & 1;
  return cfg;
}

std::int64_t FKEnsemble::encode(const BondConfig& cfg) const {
  std::int64_t idx = 0;
  for (size_t i = 0; i < edges_.size(); ++i)
    if (cfg.open[edges_[i]]) idx |= std::int64_t(1) << i;
  return idx;
}

WeightTable FKEnsemble::weights() const {
  WeightTable t;
  t.weight.resize(size());
  for (std::int64_t i = 0; i < size(); ++i) {
    BondConfig cfg = decode(i);
    t.weight[i] = fk_weight(lat_, cfg, bc_, prm_);
    t.Z += t.weight[i];
  }
  return t;
}

WeightTable FKEnsemble::weights_conditional_E_zeta(
    const PottsBoundary& zeta) const {
  WeightTable t = weights();
  t.Z = 0;
  for (std::int64_t i = 0; i < size(); ++i) {
    BondConfig cfg = decode(i);
    if (!event_E_zeta(lat_, cfg, zeta, bc_)) t.weight[i] = 0.0;
    t.Z += t.weight[i];
  }
  if (t.Z <= 0.0)
    throw std::runtime_error("E_zeta has zero probability on this instance");
  return t;
}

// ----------------------------------------------------------- serialization

namespace {
void write_header(std::ostream& os, const Lattice& lat, const Params& prm) {
  os << "critmix-config\n";
  os << "n " << lat.n() << " np " << lat.np() << " topology "
     << (lat.is_torus() ? "torus" : "box") << " q " << prm.q << " p " << prm.p
     << "\n";
}
}  // namespace

void write_spin_config(std::ostream& os, const Lattice& lat,
                       const SpinConfig& cfg, const PottsBoundary& bc,
                       const Params& prm) {
  write_header(os, lat, prm);
  if (bc.periodic_flag()) {
    os << "bc periodic\n";
  } else {
    os << "bc potts " << bc.fixed_count() << "\n";
    for (int v = 0; v < lat.vertex_count(); ++v)
      if (bc.is_fixed(v)) os << v << " " << bc.fixed_color(v) << "\n";
  }
  os << "spins " << lat.vertex_count() << "\n";
  for (int v = 0; v < lat.vertex_count(); ++v)
    os << v << " " << static_cast<int>(cfg.color[v]) << "\n";
}

void write_bond_config(std::ostream& os, const Lattice& lat,
                       const BondConfig& cfg, const FKBoundary& bc,
                       const Params& prm) {
  write_header(os, lat, prm);
  if (bc.periodic_flag()) {
    os << "bc periodic\n";
  } else {
    os << "bc fk " << bc.domain_size() << "\n";
    for (int v = 0; v < lat.vertex_count(); ++v)
      if (bc.in_domain(v)) os << v << " " << bc.class_of(v) << "\n";
  }
  os << "bonds " << lat.edge_count() << "\n";
  for (int e = 0; e < lat.edge_count(); ++e)
    os << e << " " << static_cast<int>(cfg.open[e]) << "\n";
}

namespace {
void check_header(std::istream& is, const Lattice& lat) {
  std::string magic;
  std::getline(is, magic);
  if (magic != "critmix-config")
    throw std::runtime_error("bad config file header");
  std::string line;
  std::getline(is, line);
  std::istringstream ls(line);
  std::string k, topo;
  int n, np;
  double q, p;
  ls >> k >> n >> k >> np >> k >> topo >> k >> q >> k >> p;
  if (n != lat.n() || np != lat.np() ||
      (topo == "torus") != lat.is_torus())
    throw std::runtime_error("config file does not match lattice");
  std::getline(is, line);  // bc line
  std::istringstream bs(line);
  std::string tag, kind;
  bs >> tag >> kind;
  if (kind == "potts" || kind == "fk") {
    int cnt;
    bs >> cnt;
    for (int i = 0; i < cnt; ++i) std::getline(is, line);
  }
}
}  // namespace

SpinConfig read_spin_config(std::istream& is, const Lattice& lat) {
  check_header(is, lat);
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  std::string tag;
  int count;
  hs >> tag >> count;
  if (tag != "spins" || count != lat.vertex_count())
    throw std::runtime_error("bad spin section");
  SpinConfig cfg;
  cfg.color.assign(lat.vertex_count(), 1);
  for (int i = 0; i < count; ++i) {
    int v, c;
    is >> v >> c;
    cfg.color[v] = static_cast<std::uint8_t>(c);
  }
  return cfg;
}

BondConfig read_bond_config(std::istream& is, const Lattice& lat) {
  check_header(is, lat);
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  std::string tag;
  int count;
  hs >> tag >> count;
  if (tag != "bonds" || count != lat.edge_count())
    throw std::runtime_error("bad bond section");
  BondConfig cfg;
  cfg.open.assign(lat.edge_count(), 0);
  for (int i = 0; i < count; ++i) {
    int e, b;
    is >> e >> b;
    cfg.open[e] = static_cast<std::uint8_t>(b);
  }
  return cfg;
}

}  // namespace critmix
