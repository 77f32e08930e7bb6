#include "critmix/lattice.hpp"

#include <algorithm>

namespace critmix {

Lattice::Lattice(int n, int np, Topology topo) : n_(n), np_(np), topo_(topo) {
  if (topo == Topology::Box) {
    if (n < 0 || np < 0)
      throw std::invalid_argument("box dimensions must be nonnegative");
    vcount_ = (n + 1) * (np + 1);
    hcount_ = n * (np + 1);
    ecount_ = hcount_ + np * (n + 1);
  } else {
    if (n < 3 || np < 3)
      throw std::invalid_argument(
          "torus requires n and n' >= 3 (smaller sizes degenerate into "
          "multigraphs with parallel or self-loop edges)");
    vcount_ = n * np;
    hcount_ = n * np;
    ecount_ = 2 * n * np;
  }
  nbr_.assign(vcount_, {});
  inc_.assign(vcount_, {});
  for (int e = 0; e < ecount_; ++e) {
    Edge ed = edge(e);
    nbr_[ed.u].push_back(ed.v);
    nbr_[ed.v].push_back(ed.u);
    inc_[ed.u].push_back(e);
    inc_[ed.v].push_back(e);
  }
}

Lattice Lattice::box(int n, int np) { return Lattice(n, np, Topology::Box); }
Lattice Lattice::torus(int n, int np) {
  return Lattice(n, np, Topology::Torus);
}
Lattice Lattice::build(int n, int np, Topology topo) {
  return Lattice(n, np, topo);
}

int Lattice::vertex_index(int x, int y) const {
  if (topo_ == Topology::Box) return y * (n_ + 1) + x;
  x %= n_;
  if (x < 0) x += n_;
  y %= np_;
  if (y < 0) y += np_;
  return y * n_ + x;
}

std::pair<int, int> Lattice::vertex_xy(int v) const {
  int w = topo_ == Topology::Box ? n_ + 1 : n_;
  return {v % w, v / w};
}

Lattice::Edge Lattice::edge(int e) const {
  if (topo_ == Topology::Box) {
    if (e < hcount_) {
      int y = e / n_, x = e % n_;
      return {vertex_index(x, y), vertex_index(x + 1, y), true};
    }
    int r = e - hcount_;
    int y = r / (n_ + 1), x = r % (n_ + 1);
    return {vertex_index(x, y), vertex_index(x, y + 1), false};
  }
  if (e < hcount_) {
    int y = e / n_, x = e % n_;
    return {vertex_index(x, y), vertex_index(x + 1, y), true};
  }
  int r = e - hcount_;
  int y = r / n_, x = r % n_;
  return {vertex_index(x, y), vertex_index(x, y + 1), false};
}

int Lattice::edge_between(int u, int v) const {
  for (size_t i = 0; i < nbr_[u].size(); ++i)
    if (nbr_[u][i] == v) return inc_[u][i];
  return -1;
}

int Lattice::max_degree() const {
  int d = 0;
  for (int v = 0; v < vcount_; ++v) d = std::max(d, degree(v));
  return d;
}

bool Lattice::on_boundary(int v) const {
  if (topo_ == Topology::Torus) return false;
  auto [x, y] = vertex_xy(v);
  return x == 0 || x == n_ || y == 0 || y == np_;
}

std::vector<int> Lattice::boundary_vertices(unsigned mask) const {
  std::vector<int> out;
  if (topo_ == Topology::Torus) return out;
  for (int v = 0; v < vcount_; ++v) {
    auto [x, y] = vertex_xy(v);
    bool in = ((mask & kSideS) && y == 0) || ((mask & kSideN) && y == np_) ||
              ((mask & kSideE) && x == n_) || ((mask & kSideW) && x == 0);
    if (in) out.push_back(v);
  }
  return out;
}

bool Lattice::is_boundary_edge(int e) const {
  Edge ed = edge(e);
  return on_boundary(ed.u) && on_boundary(ed.v);
}

bool Lattice::rect_in_lattice(const Rect& r) const {
  if (r.x0 > r.x1 || r.y0 > r.y1) return false;
  if (topo_ == Topology::Box)
    return r.x0 >= 0 && r.y0 >= 0 && r.x1 <= n_ && r.y1 <= np_;
  return r.width() < n_ && r.height() < np_;
}

std::vector<int> Lattice::rect_vertices(const Rect& r) const {
  std::vector<int> out;
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) out.push_back(vertex_index(x, y));
  return out;
}

std::vector<int> Lattice::rect_edges(const Rect& r) const {
  std::vector<int> out;
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) {
      if (x < r.x1)
        out.push_back(edge_between(vertex_index(x, y), vertex_index(x + 1, y)));
      if (y < r.y1)
        out.push_back(edge_between(vertex_index(x, y), vertex_index(x, y + 1)));
    }
  return out;
}

Annulus make_annulus(const Lattice& lat, const Rect& outer,
                     const Rect& inner) {
  if (!lat.rect_in_lattice(outer))
    throw std::invalid_argument("annulus outer rectangle not inside lattice");
  if (!outer.strictly_contains(inner))
    throw std::invalid_argument(
        "annulus inner rectangle must be strictly inside the outer one");
  return Annulus{outer, inner};
}

std::vector<int> annulus_vertices(const Lattice& lat, const Annulus& a) {
  std::vector<int> out;
  for (int y = a.outer.y0; y <= a.outer.y1; ++y)
    for (int x = a.outer.x0; x <= a.outer.x1; ++x)
      if (!a.inner.contains(x, y)) out.push_back(lat.vertex_index(x, y));
  return out;
}

Region Region::rect_region(const Rect& r) {
  Region g;
  g.kind = Kind::Rect;
  g.rect = r;
  return g;
}
Region Region::annulus_region(const Annulus& a) {
  Region g;
  g.kind = Kind::Annulus;
  g.annulus = a;
  return g;
}
Region Region::boundary_region(unsigned mask) {
  Region g;
  g.kind = Kind::BoundarySegment;
  g.side_mask = mask;
  return g;
}
Region Region::edge_region(std::vector<int> edges) {
  Region g;
  g.kind = Kind::EdgeSet;
  g.edges = std::move(edges);
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

bool Region::contains_vertex(const Lattice& lat, int v) const {
  auto [x, y] = lat.vertex_xy(v);
  switch (kind) {
    case Kind::Rect:
      return rect.contains(x, y);
    case Kind::Annulus:
      return annulus.outer.contains(x, y) && !annulus.inner.contains(x, y);
    case Kind::BoundarySegment: {
      if (lat.is_torus()) return false;
      bool in = ((side_mask & kSideS) && y == 0) ||
                ((side_mask & kSideN) && y == lat.np()) ||
                ((side_mask & kSideE) && x == lat.n()) ||
                ((side_mask & kSideW) && x == 0);
      return in;
    }
    case Kind::EdgeSet: {
      for (int e : edges) {
        auto ed = lat.edge(e);
        if (ed.u == v || ed.v == v) return true;
      }
      return false;
    }
  }
  return false;
}

bool Region::contains_edge(const Lattice& lat, int e) const {
  if (kind == Kind::EdgeSet)
    return std::binary_search(edges.begin(), edges.end(), e);
  auto ed = lat.edge(e);
  return contains_vertex(lat, ed.u) && contains_vertex(lat, ed.v);
}

DualEdgeMap dual_map(const Lattice& lat) {
  if (lat.is_torus()) {
    // Self-dual: faces of the n x n' torus form another n x n' torus. A
    // horizontal edge at (x,y) is crossed by the dual vertical edge at
    // (x, y-1); a vertical edge at (x,y) by the dual horizontal at (x-1, y).
    DualEdgeMap m{Lattice::torus(lat.n(), lat.np()), {}, {}};
    int n = lat.n(), np = lat.np();
    m.to_dual.assign(lat.edge_count(), -1);
    m.from_dual.assign(m.dual.edge_count(), -1);
    for (int y = 0; y < np; ++y)
      for (int x = 0; x < n; ++x) {
        int h = y * n + x;
        int dv = n * np + (((y - 1 + np) % np) * n + x);
        m.to_dual[h] = dv;
        m.from_dual[dv] = h;
        int v = n * np + y * n + x;
        int dh = y * n + ((x - 1 + n) % n);
        m.to_dual[v] = dh;
        m.from_dual[dh] = v;
      }
    return m;
  }
  // Box: dual vertices are the faces (x+1/2, y-1/2) for x in [0,n-1],
  // y in [0,n'+1], i.e. the box Lambda_{n-1,n'+1} in dual coordinates.
  // Every horizontal primal edge maps to a dual vertical edge; a vertical
  // primal edge maps to a dual horizontal iff it is not on the W/E boundary
  // column.  Dual horizontal edges in the added bottom/top rows cross primal
  // edges outside the box and have no partner.
  int n = lat.n(), np = lat.np();
  DualEdgeMap m{Lattice::box(std::max(n - 1, 0), np + 1), {}, {}};
  m.to_dual.assign(lat.edge_count(), -1);
  m.from_dual.assign(m.dual.edge_count(), -1);
  int dn = m.dual.n();
  int dual_hcount = m.dual.horizontal_edge_count();
  for (int e = 0; e < lat.edge_count(); ++e) {
    auto ed = lat.edge(e);
    auto [x, y] = lat.vertex_xy(ed.u);
    if (ed.horizontal) {
      int de = dual_hcount + y * (dn + 1) + x;  // dual vertical at (x, y)
      m.to_dual[e] = de;
      m.from_dual[de] = e;
    } else if (x >= 1 && x <= n - 1) {
      int de = (y + 1) * dn + (x - 1);  // dual horizontal at (x-1, y+1)
      m.to_dual[e] = de;
      m.from_dual[de] = e;
    }
  }
  return m;
}

}  // namespace critmix
