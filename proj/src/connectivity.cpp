#include "critmix/connectivity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace critmix {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
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
    if (a == b) return;
    if (a < b) parent[b] = a;  // min-index roots keep labels deterministic
    else parent[a] = b;
  }
};

}  // namespace

int ClusterLabeling::size_of(int lbl) const {
  auto it = std::lower_bound(cluster_labels.begin(), cluster_labels.end(), lbl);
  if (it == cluster_labels.end() || *it != lbl)
    throw std::invalid_argument("no cluster with this label");
  return cluster_sizes[it - cluster_labels.begin()];
}

ClusterLabeling label_clusters(const Lattice& lat, const BondConfig& omega,
                               const FKBoundary& bc) {
  UnionFind uf(lat.vertex_count());
  for (int e = 0; e < lat.edge_count(); ++e) {
    if (!omega.open[e]) continue;
    auto ed = lat.edge(e);
    uf.unite(ed.u, ed.v);
  }
  for (int v = 0; v < lat.vertex_count(); ++v) {
    int c = bc.class_of(v);
    if (c >= 0) uf.unite(c, v);
  }
  ClusterLabeling out;
  out.label.resize(lat.vertex_count());
  for (int v = 0; v < lat.vertex_count(); ++v) out.label[v] = uf.find(v);
  for (int v = 0; v < lat.vertex_count(); ++v) {
    if (out.label[v] == v) out.cluster_labels.push_back(v);
  }
  out.cluster_count = static_cast<int>(out.cluster_labels.size());
  out.cluster_sizes.assign(out.cluster_count, 0);
  for (int v = 0; v < lat.vertex_count(); ++v) {
    auto it = std::lower_bound(out.cluster_labels.begin(),
                               out.cluster_labels.end(), out.label[v]);
    out.cluster_sizes[it - out.cluster_labels.begin()]++;
  }
  out.max_cluster_size =
      *std::max_element(out.cluster_sizes.begin(), out.cluster_sizes.end());
  return out;
}

double largest_cluster_fraction(const ClusterLabeling& labeling,
                                const Lattice& lat) {
  return static_cast<double>(labeling.max_cluster_size) / lat.vertex_count();
}

ConnectivityQuery::ConnectivityQuery(const Lattice& lat, const FKBoundary& bc)
    : lat_(lat),
      rep_(bc.representative_map(lat)),
      classmates_(lat.vertex_count()),
      mark_a_(lat.vertex_count(), 0),
      mark_b_(lat.vertex_count(), 0) {
  for (int v = 0; v < lat.vertex_count(); ++v)
    if (rep_[v] != v || bc.class_of(v) >= 0) classmates_[rep_[v]].push_back(v);
}

// Bidirectional BFS over open bonds with wiring teleports.  At criticality
// clusters are fractal, so growing both endpoints' components and stopping
// on the first meeting explores far less than a one-sided search.
bool ConnectivityQuery::connected_without_edge(const BondConfig& omega,
                                               int e) {
  auto ed = lat_.edge(e);
  int a = ed.u, b = ed.v;
  ++epoch_;
  const int ea = 2 * epoch_, eb = 2 * epoch_ + 1;

  auto visit = [&](int v, std::vector<int>& mark, std::vector<int>& queue,
                   int tag, int other_tag) -> bool {
    int r = rep_[v];
    for (int w : {v, r}) {
      if (mark[w] == other_tag) return true;
      if (mark[w] != tag) {
        mark[w] = tag;
        queue.push_back(w);
      }
      // teleport through the wired class
      if (w == r && !classmates_[r].empty()) {
        for (int m : classmates_[r]) {
          if (mark[m] == other_tag) return true;
          if (mark[m] != tag) {
            mark[m] = tag;
            queue.push_back(m);
          }
        }
      }
    }
    return false;
  };

  queue_a_.clear();
  queue_b_.clear();
  if (visit(a, mark_a_, queue_a_, ea, 0)) return true;
  if (visit(b, mark_b_, queue_b_, eb, 0)) return true;
  // meeting is detected by scanning the opposite mark array
  size_t ha = 0, hb = 0;
  while (ha < queue_a_.size() || hb < queue_b_.size()) {
    bool expand_a;
    if (ha >= queue_a_.size()) expand_a = false;
    else if (hb >= queue_b_.size()) expand_a = true;
    else expand_a = (queue_a_.size() - ha) <= (queue_b_.size() - hb);

    auto& queue = expand_a ? queue_a_ : queue_b_;
    auto& mark = expand_a ? mark_a_ : mark_b_;
    auto& other_mark = expand_a ? mark_b_ : mark_a_;
    int tag = expand_a ? ea : eb;
    int other_tag = expand_a ? eb : ea;
    size_t& head = expand_a ? ha : hb;

    int v = queue[head++];
    for (size_t i = 0; i < lat_.neighbors(v).size(); ++i) {
      int inc = lat_.incident_edges(v)[i];
      if (inc == e || !omega.open[inc]) continue;
      int w = lat_.neighbors(v)[i];
      if (other_mark[w] == other_tag) return true;
      if (mark[w] == tag) continue;
      mark[w] = tag;
      queue.push_back(w);
      int r = rep_[w];
      if (r != w || !classmates_[r].empty()) {
        for (int m : classmates_[r]) {
          if (other_mark[m] == other_tag) return true;
          if (mark[m] != tag) {
            mark[m] = tag;
            queue.push_back(m);
          }
        }
      }
    }
  }
  return false;
}

bool connected_without_edge(const Lattice& lat, const BondConfig& omega,
                            const FKBoundary& bc, int e,
                            ConnectivityBackend backend) {
  if (edge_frozen(lat, bc, e))
    throw std::invalid_argument(
        "connected_without_edge: edge is frozen by the boundary condition");
  if (backend == ConnectivityBackend::FullRelabel) {
    BondConfig off = omega;
    off.open[e] = 0;
    auto lab = label_clusters(lat, off, bc);
    auto ed = lat.edge(e);
    return lab.label[ed.u] == lab.label[ed.v];
  }
  ConnectivityQuery q(lat, bc);
  return q.connected_without_edge(omega, e);
}

}  // namespace critmix
