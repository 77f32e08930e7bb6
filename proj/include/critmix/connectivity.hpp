#pragma once

#include <vector>

#include "critmix/lattice.hpp"
#include "critmix/model.hpp"

namespace critmix {

// Cluster structure of a bond configuration together with the boundary
// wirings.  Labels are deterministic: every vertex carries the smallest
// vertex index of its cluster.
struct ClusterLabeling {
  std::vector<int> label;  // per vertex, min vertex index of the cluster
  int cluster_count = 0;
  // Parallel arrays over distinct clusters, sorted by label.
  std::vector<int> cluster_labels;
  std::vector<int> cluster_sizes;
  int max_cluster_size = 0;

  int size_of(int lbl) const;
};

ClusterLabeling label_clusters(const Lattice& lat, const BondConfig& omega,
                               const FKBoundary& bc);

double largest_cluster_fraction(const ClusterLabeling& labeling,
                                const Lattice& lat);

enum class ConnectivityBackend { BidirectionalBfs, FullRelabel };

// Are the endpoints of e connected in (omega - {e}) plus boundary wirings?
// The result does not depend on omega(e).  Boundary-frozen edges rejected.
bool connected_without_edge(
    const Lattice& lat, const BondConfig& omega, const FKBoundary& bc, int e,
    ConnectivityBackend backend = ConnectivityBackend::BidirectionalBfs);

// Reusable scratch buffers for connected_without_edge on a hot loop.
class ConnectivityQuery {
 public:
  explicit ConnectivityQuery(const Lattice& lat, const FKBoundary& bc);
  bool connected_without_edge(const BondConfig& omega, int e);

 private:
  const Lattice& lat_;
  std::vector<int> rep_;        // wiring representative per vertex
  std::vector<std::vector<int>> classmates_;
  std::vector<int> mark_a_, mark_b_;
  std::vector<int> queue_a_, queue_b_;
  int epoch_ = 0;
};

}  // namespace critmix
