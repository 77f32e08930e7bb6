#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "critmix/lattice.hpp"
#include "critmix/model.hpp"

namespace critmix {

enum class ChainTag { PottsGlauber, FKGlauber, SwendsenWang, ChayesMachta,
                      Block };

const char* chain_tag_name(ChainTag tag);

// Enumerated state space with stationary vector.
struct StateSpace {
  enum class Kind { Spin, Bond };
  Kind kind;
  std::int64_t size = 0;
  std::vector<double> pi;
  std::shared_ptr<PottsEnsemble> spins;
  std::shared_ptr<FKEnsemble> bonds;
};

// Dense row-stochastic kernel.
struct KernelMatrix {
  ChainTag tag;
  std::int64_t n = 0;
  std::vector<double> p;  // row-major

  double at(std::int64_t i, std::int64_t j) const { return p[i * n + j]; }
  double& at(std::int64_t i, std::int64_t j) { return p[i * n + j]; }
};

struct KernelResiduals {
  double row_sum = 0.0;        // max_i |sum_j P_ij - 1|
  double reversibility = 0.0;  // max_ij |pi_i P_ij - pi_j P_ji|
  double stationarity = 0.0;   // max_j |sum_i pi_i P_ij - pi_j|
};
KernelResiduals validate_kernel(const KernelMatrix& P,
                                const std::vector<double>& pi);

// Dense single-step kernels.  Glauber chains pick a uniform active location
// and apply the heat-bath conditional; SW and CM are full two-phase sweeps
// marginalized by exact summation over the internal randomness.  Throws
// std::length_error (with the state count) past kernel_cap.
std::pair<StateSpace, KernelMatrix> enumerate_kernel(
    ChainTag tag, const Lattice& lat, const PottsBoundary& pbc,
    const FKBoundary& fbc, const Params& prm,
    std::int64_t kernel_cap = 1 << 12);

// Block dynamics kernel: pick a uniform block, resample it exactly.
std::pair<StateSpace, KernelMatrix> enumerate_block_kernel(
    const Lattice& lat, const PottsBoundary& pbc, const Params& prm,
    const std::vector<Region>& blocks, std::int64_t kernel_cap = 1 << 12);

// Streaming validation for Glauber kernels too large to hold densely.
KernelResiduals validate_glauber_sparse(ChainTag tag, const Lattice& lat,
                                        const PottsBoundary& pbc,
                                        const FKBoundary& fbc,
                                        const Params& prm,
                                        std::int64_t state_cap = kDefaultStateCap);

// ---------------------------------------------------------------------------
// Spectral quantities.  Reversible kernels only (checked; rejected with the
// residual in the message).  Backend: dense symmetric eigensolve up to
// dense_eigen_cap states, Lanczos with full reorthogonalization above it.
// ---------------------------------------------------------------------------

struct GapResult {
  double gap = 0.0;       // 1 - lambda_2
  double gap_star = 0.0;  // min_i (1 - |lambda_i|) over nontrivial i
};

GapResult spectral_gap(const KernelMatrix& P, const std::vector<double>& pi,
                       std::int64_t dense_eigen_cap = 2048);

// Same quantity through the Laplacian route: smallest nonzero eigenvalue of
// I - S in the pi-inner product.
double dirichlet_gap(const KernelMatrix& P, const std::vector<double>& pi,
                     std::int64_t dense_eigen_cap = 2048);

// Variational quotient E(f,f)/Var_pi(f); upper-bounds the gap for any f.
double dirichlet_quotient(const KernelMatrix& P, const std::vector<double>& pi,
                          const std::vector<double>& f);

// ---------------------------------------------------------------------------
// Conductance.
// ---------------------------------------------------------------------------

// phi_S = Q(S,S^c) / (pi(S) pi(S^c)) for the indicator set S.
double cheeger_phi(const KernelMatrix& P, const std::vector<double>& pi,
                   const std::vector<char>& in_S);

struct CheegerResult {
  double phi_S = 0.0;
  std::optional<double> Phi;  // exhaustive minimum, tiny spaces only
};

// Exhaustive global minimum over proper subsets via Gray-code enumeration
// with incremental flow updates; requires 2^n subsets <= 2^max_bits.
double exhaustive_cheeger(const KernelMatrix& P, const std::vector<double>& pi,
                          int max_bits = 22);

CheegerResult cheeger(const KernelMatrix& P, const std::vector<double>& pi,
                      const std::vector<char>& in_S,
                      bool want_global = false);

// ---------------------------------------------------------------------------
// Mixing time.
// ---------------------------------------------------------------------------

struct MixingResult {
  int t_mix = 0;
  double delta = 0.0;
  double gap = 0.0, gap_star = 0.0;
  double lower_bound = 0.0;  // gap^{-1} - 1
  double upper_bound = 0.0;  // log(2e/pi_min) / gap_star
  bool lower_ok = false, upper_ok = false;
};

// Smallest t with max_x ||P^t(x,.) - pi||_TV < delta (default 1/(2e)).
// Throws if the chain has not mixed after step_cap steps.
MixingResult mixing_time_exact(const KernelMatrix& P,
                               const std::vector<double>& pi,
                               double delta = 1.0 / (2.0 * 2.718281828459045),
                               int step_cap = 1 << 20);

// ---------------------------------------------------------------------------
// Comparison inequalities between the four chains (free or periodic
// boundary only).  The |E| log |E| factor is evaluated as |E| max(1, ln|E|)
// so single-edge instances are not vacuous.  The Chayes-Machta comparison
// constants are not pinned by the sources and are checked with
// (1-p+p/q)/q below and 8 |E| max(1, ln|E|) above.
// ---------------------------------------------------------------------------

struct UllrichReport {
  double gap_potts = 0.0, gap_sw = 0.0, gap_rc = 0.0, gap_cm = 0.0;
  double u1_lhs = 0.0, u1_rhs = 0.0;    // gap_P <= 2q^2 (q e^{2b})^{4D} gap_SW
  double u2_low = 0.0, u2_high = 0.0;   // bracket for gap_SW
  double cm_low = 0.0, cm_high = 0.0;   // bracket for gap_CM
  bool u1_ok = false, u2_ok = false, cm_ok = false;
  bool all_ok() const { return u1_ok && u2_ok && cm_ok; }
};

UllrichReport check_ullrich(const Lattice& lat, const Params& prm,
                            std::int64_t kernel_cap = 1 << 12,
                            std::int64_t dense_eigen_cap = 2048);

// ---------------------------------------------------------------------------
// Block-dynamics gap inequality (continuous-time normalization:
// discrete gaps are multiplied by the number of locations).
// ---------------------------------------------------------------------------

struct BlockGapReport {
  double gap_single_ct = 0.0;
  double gap_block_ct = 0.0;
  double inf_block_gap_ct = 0.0;
  int chi = 0;
  double lhs = 0.0, rhs = 0.0;  // lhs >= rhs expected
  bool holds = false;
};

BlockGapReport block_gap_inequality(const Lattice& lat,
                                    const PottsBoundary& pbc,
                                    const Params& prm,
                                    const std::vector<Region>& blocks);

}  // namespace critmix
