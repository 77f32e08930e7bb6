#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "critmix/lattice.hpp"
#include "critmix/rng.hpp"

namespace critmix {

// Model parameters with p and beta kept consistent via p = 1 - e^{-beta}.
struct Params {
  double q = 2.0;
  double p = 0.5;
  double beta = 0.0;

  static Params from_p(double q, double p);
  static Params from_beta(double q, double beta);
  static Params critical(double q);

  bool integer_q() const;
  int q_int() const;  // throws unless integer_q()
};

// p_c = sqrt(q)/(1+sqrt(q)), beta_c = log(1+sqrt(q)).
std::pair<double, double> critical_point(double q);
// Planar duality involution p p* = q (1-p)(1-p*).
double dual_parameter(double p, double q);

// -------------------------------------------------------------------------
// Boundary conditions.
//
// A vertex of the geometric boundary is either constrained by the boundary
// condition or unconstrained ("free").  Unconstrained vertices are ordinary
// degrees of freedom: they carry spins, their incident edges carry bonds,
// and the dynamics updates them.  Constrained Potts vertices hold a fixed
// color; constrained FK vertices belong to a wired class.  Edges whose two
// endpoints are both constrained are frozen (they contribute only constant
// weight factors and are excluded from configurations and dynamics).
// -------------------------------------------------------------------------

class PottsBoundary {
 public:
  // All boundary vertices free (no constrained vertices).
  static PottsBoundary free_bc(const Lattice& lat);
  // Torus sentinel.
  static PottsBoundary periodic(const Lattice& lat);
  // Every boundary vertex gets the same color.
  static PottsBoundary monochromatic(const Lattice& lat, int color);
  // The vertices of the given sides get `color`; the rest stay free.
  static PottsBoundary sides_colored(const Lattice& lat, unsigned side_mask,
                                     int color);

  bool periodic_flag() const { return periodic_; }
  bool is_fixed(int v) const { return !color_.empty() && color_[v] != 0; }
  int fixed_color(int v) const { return color_[v]; }  // 0 = free
  void set_color(int v, int color);                   // boundary vertices only

  int fixed_count() const;
  const std::vector<int>& colors() const { return color_; }

 private:
  bool periodic_ = false;
  std::vector<int> color_;  // per vertex; 0 = free, else color in 1..q
  const Lattice* lat_ = nullptr;
  friend class FKBoundary;
};

class FKBoundary {
 public:
  // No wirings, no frozen edges.
  static FKBoundary free_bc(const Lattice& lat);
  static FKBoundary periodic(const Lattice& lat);
  // All boundary vertices in one wired class.
  static FKBoundary wired(const Lattice& lat);
  // The vertices of the given sides wired together, the rest free.
  static FKBoundary sides_wired(const Lattice& lat, unsigned side_mask);
  // Explicit partition; classes must consist of boundary vertices.
  static FKBoundary from_classes(const Lattice& lat,
                                 const std::vector<std::vector<int>>& classes);
  // FK boundary associated to a Potts coloring: x, y wired iff same color.
  static FKBoundary from_potts(const Lattice& lat, const PottsBoundary& zeta);

  bool periodic_flag() const { return periodic_; }
  // Wired-class representative (smallest vertex index in the class), or -1
  // for an unconstrained vertex.  Canonical form: a vertex wired to nobody
  // else is unconstrained, so classes always have >= 2 members.
  int class_of(int v) const { return class_.empty() ? -1 : class_[v]; }
  bool in_domain(int v) const { return class_of(v) >= 0; }

  // Union-find style representative map (identity off the domain).
  std::vector<int> representative_map(const Lattice& lat) const;
  std::vector<std::vector<int>> classes() const;
  int domain_size() const;

  bool operator==(const FKBoundary& o) const {
    return periodic_ == o.periodic_ && class_ == o.class_;
  }

 private:
  void canonicalize(const Lattice& lat);
  bool periodic_ = false;
  std::vector<int> class_;  // per vertex; -1 free, else min index of class
  friend FKBoundary modify_boundary(const Lattice&, const FKBoundary&,
                                    const std::vector<int>&);
};

// -------------------------------------------------------------------------
// Configurations (stored for every vertex/edge; constrained entries pinned).
// -------------------------------------------------------------------------

struct SpinConfig {
  std::vector<std::uint8_t> color;  // per vertex, values 1..q
};

struct BondConfig {
  std::vector<std::uint8_t> open;  // per edge, 0/1; frozen edges stay 0
};

// Active degrees of freedom for a (lattice, boundary) pair.
std::vector<int> active_sites(const Lattice& lat, const PottsBoundary& bc);
bool edge_frozen(const Lattice& lat, const FKBoundary& bc, int e);
std::vector<int> active_edges(const Lattice& lat, const FKBoundary& bc);

// Constant configs respecting the boundary condition.
SpinConfig constant_spins(const Lattice& lat, const PottsBoundary& bc,
                          int color);
BondConfig all_bonds(const Lattice& lat, const FKBoundary& bc, bool open);

// -------------------------------------------------------------------------
// Weights.
// -------------------------------------------------------------------------

// Number of monochromatic unordered adjacent pairs; edges between two
// constrained vertices are skipped (constant factor, dropped so that Z is
// comparable across enumeration oracles).
long long potts_agree_count(const Lattice& lat, const SpinConfig& cfg,
                            const PottsBoundary& bc);
double potts_weight(const Lattice& lat, const SpinConfig& cfg,
                    const PottsBoundary& bc, const Params& prm);

struct FKWeightParts {
  long long open_bonds, closed_bonds, clusters;
};
FKWeightParts fk_weight_parts(const Lattice& lat, const BondConfig& cfg,
                              const FKBoundary& bc);
// p^o (1-p)^c q^k, clusters counted with boundary wirings; isolated
// vertices count.
double fk_weight(const Lattice& lat, const BondConfig& cfg,
                 const FKBoundary& bc, const Params& prm);

// Edwards-Sokal joint weight for (sigma, omega) over the active edges:
// prod_e [(1-p) 1{w(e)=0} + p 1{w(e)=1, sigma(x)=sigma(y)}].
double es_joint_weight(const Lattice& lat, const SpinConfig& sigma,
                       const BondConfig& omega, const PottsBoundary& pbc,
                       const FKBoundary& fbc, const Params& prm);

// -------------------------------------------------------------------------
// Edwards-Sokal coupling moves.
// -------------------------------------------------------------------------

// sigma -> omega: disagreeing edges closed, agreeing open w.p. p.
BondConfig es_potts_to_fk(const Lattice& lat, const SpinConfig& sigma,
                          const PottsBoundary& pbc, const Params& prm,
                          Rng& rng);

// omega -> sigma: clusters touching a colored boundary vertex receive that
// color, the rest i.i.d. uniform over [q].  Throws if omega has a cluster
// touching two distinct colors (caller must condition on E_zeta first).
SpinConfig es_fk_to_potts(const Lattice& lat, const BondConfig& omega,
                          const FKBoundary& fbc, const PottsBoundary& zeta,
                          const Params& prm, Rng& rng);

// E_zeta: no cluster of (omega + wirings) contains boundary vertices of two
// distinct colors.
bool event_E_zeta(const Lattice& lat, const BondConfig& omega,
                  const PottsBoundary& zeta, const FKBoundary& fbc);

// -------------------------------------------------------------------------
// Boundary surgery.
// -------------------------------------------------------------------------

// Detach the vertices of delta from their wired classes (they become
// unconstrained); delta = whole boundary yields the free boundary condition.
FKBoundary modify_boundary(const Lattice& lat, const FKBoundary& bc,
                           const std::vector<int>& delta);

// Boundary condition induced on the target rectangle by an outer
// configuration: partition of the target boundary by connectivity in the
// complement of the target interior.  Target must be strictly inside.
FKBoundary induce_boundary(const Lattice& outer_lat,
                           const BondConfig& outer_cfg,
                           const FKBoundary& outer_bc, const Rect& target,
                           const Lattice& target_lat);

// -------------------------------------------------------------------------
// Exact enumeration (tiny instances).
// -------------------------------------------------------------------------

inline constexpr std::int64_t kDefaultStateCap = std::int64_t(1) << 20;

struct WeightTable {
  std::vector<double> weight;
  double Z = 0.0;
  std::vector<double> probabilities() const;
};

// Dense index <-> configuration codecs over the active degrees of freedom.
class PottsEnsemble {
 public:
  PottsEnsemble(const Lattice& lat, const PottsBoundary& bc,
                const Params& prm, std::int64_t cap = kDefaultStateCap);
  std::int64_t size() const { return nstates_; }
  const std::vector<int>& sites() const { return sites_; }
  SpinConfig decode(std::int64_t idx) const;
  std::int64_t encode(const SpinConfig& cfg) const;
  WeightTable weights() const;

 private:
  const Lattice& lat_;
  PottsBoundary bc_;
  Params prm_;
  std::vector<int> sites_;
  std::int64_t nstates_;
};

class FKEnsemble {
 public:
  FKEnsemble(const Lattice& lat, const FKBoundary& bc, const Params& prm,
             std::int64_t cap = kDefaultStateCap);
  std::int64_t size() const { return std::int64_t(1) << edges_.size(); }
  const std::vector<int>& edges() const { return edges_; }
  BondConfig decode(std::int64_t idx) const;
  std::int64_t encode(const BondConfig& cfg) const;
  WeightTable weights() const;
  // Weights conditioned on E_zeta (zero outside the event).
  WeightTable weights_conditional_E_zeta(const PottsBoundary& zeta) const;

 private:
  const Lattice& lat_;
  FKBoundary bc_;
  Params prm_;
  std::vector<int> edges_;
};

// -------------------------------------------------------------------------
// Flat-text serialization.
// -------------------------------------------------------------------------

void write_spin_config(std::ostream& os, const Lattice& lat,
                       const SpinConfig& cfg, const PottsBoundary& bc,
                       const Params& prm);
void write_bond_config(std::ostream& os, const Lattice& lat,
                       const BondConfig& cfg, const FKBoundary& bc,
                       const Params& prm);
SpinConfig read_spin_config(std::istream& is, const Lattice& lat);
BondConfig read_bond_config(std::istream& is, const Lattice& lat);

}  // namespace critmix
