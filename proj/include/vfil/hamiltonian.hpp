#ifndef VFIL_HAMILTONIAN_HPP
#define VFIL_HAMILTONIAN_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "vfil/problem.hpp"

namespace vfil {

// Real symmetric matrix indexed by lattice sites, expressed in the
// frequency-eigenbasis frames.
struct LatticeOperator {
  std::vector<LatticeSite> rows, cols;
  Eigen::MatrixXd m;
  double Omega = 0.0;
  double omega = 0.0;
  std::uint64_t state_hash = 0;

  int row_index(const LatticeSite& x) const;
  int col_index(const LatticeSite& x) const;
};

struct AssemblyOptions {
  // Remove the kernel site (1,1,-1) and express the (1,1) pair in the fixed
  // Omega0 frame, so the gauge constraint is frequency-independent along the
  // branch.
  bool exclude_kernel = true;
  double tail_tol = 1e-16;
};

// H = D + T at the state u = r * kernel + w: D carries the closed-form mode
// multipliers, T the multiplication-and-conjugation action of w dg(u).
// Assembly is exact Fourier algebra; finite differences of the residual are a
// test oracle only.
LatticeOperator assemble_hamiltonian(const SymmetricField& w, double r, double Omega,
                                     double omega, int L, const AssemblyOptions& opt = {});

// Same assembly on an explicit site subset, reusing a precomputed multiplier
// grid (used when scanning a local block across frequencies).
LatticeOperator assemble_block(const ExpansionGrid& multiplier,
                               const std::vector<LatticeSite>& sites, double Omega, double omega,
                               const AssemblyOptions& opt = {});

// Weighted operator norm: max of row/column sups of
// sum |G(x,y)| e^{sigma |x-y|} <x-y>^s.
double operator_norm_sigma(const LatticeOperator& G, const NormParams& p);

LatticeOperator restrict_block(const LatticeOperator& G, const std::vector<LatticeSite>& A,
                               const std::vector<LatticeSite>& B);

// Dense inverse of a square block. Throws "spectrum within d_floor" when the
// smallest eigenvalue modulus (inverse iteration estimate) is below d_floor.
LatticeOperator invert_block(const LatticeOperator& H_E, double d_floor);

struct Decomposition {
  std::vector<LatticeSite> previous_ball;    // B_{n-1}
  std::vector<LatticeSite> regular_annulus;  // A_n
  std::vector<SiteCluster> clusters;         // singular sites in the annulus
  int ell = 0;                               // tubular radius
  int L_prev = 0;
};

Decomposition build_decomposition(const std::vector<LatticeSite>& sites, int L_prev,
                                  double Omega, double omega, double d0, int ell);

struct PreconditionerResult {
  LatticeOperator Ln;  // block assembly of local inverses
  LatticeOperator Kn;  // defect Ln * H - I
  double Ln_norm = 0.0;
  double Kn_norm = 0.0;
  // sigma-norms of the three row groups of Kn: regular part, previous ball,
  // singular clusters
  double Kn_regular = 0.0, Kn_ball = 0.0, Kn_clusters = 0.0;
  std::optional<LatticeOperator> inverse;  // (I+Kn)^{-1} Ln when Kn_norm <= 3/4
};

// L_n = G_{A_n} + P_{B_{n-1}} G_{C(B_{n-1})} + sum_j P_{S_j} G_{C(S_j)} and
// the defect K_n = L_n H - I. d_prev / d_n are the inversion floors for the
// ball collar and the cluster tubes; regular blocks use d0.
// Throws: invert_block floors propagate; "defect too large" when
// ||K_n|| > 3/4.
PreconditionerResult assemble_preconditioner(const LatticeOperator& H, const Decomposition& dec,
                                             double d0, double d_prev, double d_n,
                                             const NormParams& p);

struct SmoothingReport {
  double lhs_row = 0.0, rhs_row = 0.0;   // ||G||_{sigma-gamma} vs c_gamma sup_x ||P_x G||_sigma
  double lhs_far = 0.0, rhs_far = 0.0;   // ||P_A G P_B||_{sigma-gamma} vs e^{-gamma l}||G||_sigma
  double c_gamma = 0.0;                  // sum_{m in Z} e^{-gamma|m|}
  bool pass_row = false, pass_far = false;
};

SmoothingReport smoothing_inequalities_check(const LatticeOperator& G,
                                             const std::vector<LatticeSite>& A,
                                             const std::vector<LatticeSite>& B, double sigma,
                                             double gamma, double ell, double s_weight);

// Site-coordinate transforms consistent with assemble_hamiltonian's frames.
Eigen::VectorXd site_coordinates(const SymmetricField& f, const std::vector<LatticeSite>& sites,
                                 double Omega, double omega, const AssemblyOptions& opt = {});
SymmetricField field_from_site_coordinates(const Eigen::VectorXd& x,
                                           const std::vector<LatticeSite>& sites, int radius,
                                           double Omega, double omega,
                                           const AssemblyOptions& opt = {});

// Component of f along the kernel mode e_{1,1,-1}(Omega0).
double kernel_component(const SymmetricField& f, double omega);

std::uint64_t field_fingerprint(const SymmetricField& u);

}  // namespace vfil

#endif
