#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace critmix {

enum class Topology { Box, Torus };

// Boundary side bitmask. Sides combine with |, e.g. kSideE | kSideW.
enum Side : unsigned {
  kSideS = 1u,
  kSideN = 2u,
  kSideE = 4u,
  kSideW = 8u,
  kSideAll = 15u,
};

// Rectangle of lattice vertices, all ranges closed: [x0,x1] x [y0,y1].
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool contains(int x, int y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  bool contains(const Rect& r) const {
    return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
  }
  bool strictly_contains(const Rect& r) const {
    return r.x0 > x0 && r.x1 < x1 && r.y0 > y0 && r.y1 < y1;
  }
};

// Geometry of the rectangle Lambda_{n,n'} = [0,n] x [0,n'] or the n x n'
// torus.  Vertex and edge enumerations are fixed for a given (n, n',
// topology):
//
//   Box:   vertex (x,y) -> y*(n+1)+x, x in [0,n], y in [0,n'].
//          Horizontal edge (x,y)-(x+1,y) -> y*n+x.
//          Vertical edge (x,y)-(x,y+1)   -> n*(n'+1) + y*(n+1)+x.
//   Torus: vertex (x,y) -> y*n+x, coordinates mod n, n'.
//          Horizontal edge (x,y)-(x+1,y) -> y*n+x.
//          Vertical edge (x,y)-(x,y+1)   -> n*n' + y*n+x.
//
// Edge counts: Box n(n'+1) + n'(n+1), Torus 2nn'.
class Lattice {
 public:
  struct Edge {
    int u, v;       // endpoint vertex indices
    bool horizontal;
  };

  static Lattice box(int n, int np);
  static Lattice torus(int n, int np);
  // build_lattice entry point with validation (Torus needs n, n' >= 3).
  static Lattice build(int n, int np, Topology topo);

  int n() const { return n_; }
  int np() const { return np_; }
  Topology topology() const { return topo_; }
  bool is_torus() const { return topo_ == Topology::Torus; }

  int vertex_count() const { return vcount_; }
  int edge_count() const { return ecount_; }

  int vertex_index(int x, int y) const;
  std::pair<int, int> vertex_xy(int v) const;

  Edge edge(int e) const;
  int horizontal_edge_count() const { return hcount_; }
  // Index of the edge between two adjacent vertices; -1 if not adjacent.
  int edge_between(int u, int v) const;

  // Up to 4 neighbors / incident edges (exactly 4 on a torus).
  const std::vector<int>& neighbors(int v) const { return nbr_[v]; }
  const std::vector<int>& incident_edges(int v) const { return inc_[v]; }
  int degree(int v) const { return static_cast<int>(nbr_[v].size()); }
  int max_degree() const;

  // Geometric boundary: the ring of the Box; empty on a torus.
  bool on_boundary(int v) const;
  // Vertices of a union of sides, deduplicated (corners once), ascending.
  std::vector<int> boundary_vertices(unsigned side_mask) const;
  std::vector<int> all_boundary_vertices() const {
    return boundary_vertices(kSideAll);
  }
  // True iff both endpoints lie on the geometric boundary.
  bool is_boundary_edge(int e) const;

  bool rect_in_lattice(const Rect& r) const;
  std::vector<int> rect_vertices(const Rect& r) const;
  // Edges with both endpoints inside r (Box-coordinate semantics; on a
  // torus the rect is read on the universal cover and must fit).
  std::vector<int> rect_edges(const Rect& r) const;

 private:
  Lattice(int n, int np, Topology topo);

  int n_, np_;
  Topology topo_;
  int vcount_, ecount_, hcount_;
  std::vector<std::vector<int>> nbr_;
  std::vector<std::vector<int>> inc_;
};

// Annulus A = outer - inner, with inner strictly inside outer.
struct Annulus {
  Rect outer, inner;
};
Annulus make_annulus(const Lattice& lat, const Rect& outer, const Rect& inner);
// Vertices of outer not in inner.
std::vector<int> annulus_vertices(const Lattice& lat, const Annulus& a);

// Region over lattice vertices: a rectangle, an annulus, a boundary-segment
// union, or an explicit edge set.  Used by censoring schedules and block
// dynamics.
struct Region {
  enum class Kind { Rect, Annulus, BoundarySegment, EdgeSet };
  Kind kind = Kind::Rect;
  Rect rect{};
  Annulus annulus{};
  unsigned side_mask = 0;
  std::vector<int> edges;

  static Region rect_region(const Rect& r);
  static Region annulus_region(const Annulus& a);
  static Region boundary_region(unsigned mask);
  static Region edge_region(std::vector<int> edges);

  bool contains_vertex(const Lattice& lat, int v) const;
  // An edge belongs to a region iff both endpoints do (EdgeSet: membership).
  bool contains_edge(const Lattice& lat, int e) const;
};

// Primal<->dual edge identification, omega*(e*) = 1 - omega(e).
//
// Torus: the dual of the n x n' torus is again an n x n' torus (self-dual
// graph); every edge is mapped.  Box: the dual lattice is the box of faces
// extended by one row below and above, Lambda_{n-1, n'+1} in dual
// coordinates; primal vertical edges on the W/E boundary columns and dual
// horizontal edges in the added rows have no partner (-1).
struct DualEdgeMap {
  Lattice dual;
  std::vector<int> to_dual;    // primal edge -> dual edge or -1
  std::vector<int> from_dual;  // dual edge -> primal edge or -1
};
DualEdgeMap dual_map(const Lattice& lat);

}  // namespace critmix
