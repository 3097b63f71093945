#ifndef VFIL_SPECTRUM_HPP
#define VFIL_SPECTRUM_HPP

#include <Eigen/Dense>

#include <vector>

#include "vfil/lattice.hpp"

namespace vfil {

// 2x2 block of the reduced linearization in the conjugate-pair orientation,
//   [[k^2 + 2w, -Omega j], [-Omega j, k^2]].
// Its eigenvalues are the mode multipliers lambda_{j,k,+-1}; the sign of the
// off-diagonal only fixes the eigenvector orientation, not the spectrum.
Eigen::Matrix2d block_matrix(int j, int k, double Omega, double omega);

struct EigenPair {
  LatticeSite site;
  double lambda = 0.0;
  Eigen::Vector2d vector = Eigen::Vector2d::Zero();
  double Omega = 0.0;
  double omega = 0.0;
};

// Closed form lambda_{j,k,l} = k^2 + w + l sqrt(j^2 Omega^2 + w^2); for the
// single-branch row j=0 the value is k^2 + 2w.
double lambda_site(const LatticeSite& x, double Omega, double omega);

// Closed-form eigenpair of block_matrix(j,k). For j=0 returns (k^2+2w, e1).
EigenPair eigenpair(const LatticeSite& x, double Omega, double omega);

// Frequency at which lambda_{j,k,-1} vanishes: Omega_{j,k} = sqrt(k^4+2k^2 w)/j.
double resonance_frequency(int j, int k, double omega);

// Block determinant at Omega0 = sqrt(1+2w): d_{j,k} = 2(k^2-j^2)w + (k^4-j^2).
double block_determinant(int j, int k, double omega);

// All sites in the ball j+k < L with |lambda| <= tol.
std::vector<LatticeSite> kernel_sites(double Omega, double omega, int L, double tol);

struct SiteCluster {
  LatticeSite center;
  std::vector<LatticeSite> sites;  // single site under (h2)
  int annulus = 0;                 // smallest n with j+k < 2^n L0 (0 for the core ball)
};

struct SiteClassification {
  double d0 = 0.0;
  int ell = 0;  // separation radius used, ceil(sqrt(L))
  std::vector<LatticeSite> regular;
  std::vector<SiteCluster> clusters;
  // min |j1-j2| / |k1+k2| over singular pairs with k1+k2 > 0; +inf when vacuous
  double separation_constant = 0.0;
};

// Partition of the ball j+k < L into regular sites (|lambda| > d0) and
// single-site singular clusters. Throws "threshold too large" when a
// (+1)-branch site is singular or two singular sites in the same or adjacent
// annulus (relative to L0) sit closer than 4*ell.
SiteClassification classify_and_cluster(double Omega, double omega, int L, double d0,
                                        const std::vector<LatticeSite>& exclude = {},
                                        int L0 = 8);

struct DiophantineParams {
  double gamma = 0.1;
  double tau = 1.0;
  long q_max = 1000;
};

// min over 1 <= q <= q_max of q^tau * dist(q w, Z).
double diophantine_margin(double omega, const DiophantineParams& p);

}  // namespace vfil

#endif
