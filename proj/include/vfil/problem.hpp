#ifndef VFIL_PROBLEM_HPP
#define VFIL_PROBLEM_HPP

#include <Eigen/Dense>

#include <cmath>

#include "vfil/lattice.hpp"
#include "vfil/spectrum.hpp"

namespace vfil {

// Reduced standing-wave problem for v = 1 + u:
//   f(u; Omega) = -i Omega u_t - u_ss + w (u + conj u) - w g(u),
//   g(u) = sum_{n>=2} (-1)^n conj(u)^n = conj(u)^2 / (1 + conj(u)).
// On the stored (a,b) pairs the linear part acts by the block
//   [[k^2 + 2w, +Omega j], [+Omega j, k^2]]
// (the off-diagonal sign follows from -iOmega d_t (a cos jt + i b sin jt)
//  = Omega j (b cos jt + i a sin jt)); its eigenvectors are those of
// block_matrix with the second component flipped. Eigenvalues agree.
Eigen::Matrix2d evolution_block(int j, int k, double Omega, double omega);

// Unit eigenvector of evolution_block for branch l; same normalizer as the
// conjugate-pair orientation in spectrum.hpp.
Eigen::Vector2d evolution_eigenvector(const LatticeSite& x, double Omega, double omega);

inline double kernel_frequency(double omega) { return std::sqrt(1.0 + 2.0 * omega); }

// The (1,1) pair frame at Omega0 in closed form: the kernel direction is
// proportional to (1, -Omega0) and its complement to (Omega0, 1), exactly
// orthogonal in floating point.
Eigen::Vector2d kernel_pair_frame(double omega, int l);

// Unit kernel mode of the linearization at Omega0, gauged so the represented
// function is (2a) cos s (cos t - i Omega0 sin t) with a > 0.
SymmetricField kernel_field(double omega, int radius = 4);

// L(Omega) u, blockwise.
SymmetricField apply_linear(const SymmetricField& u, double Omega, double omega);

// Blockwise inverse of L(Omega). When exclude_kernel is set the (1,1) pair is
// solved on the complement of the Omega0-kernel direction (the rhs must have
// no kernel component up to drop_tol).
SymmetricField solve_linear(const SymmetricField& rhs, double Omega, double omega,
                            bool exclude_kernel = false, double drop_tol = 1e-12);

// g(u) as a field, truncated to out_radius; the power series is cut when the
// largest coefficient of a term falls below tail_tol.
SymmetricField nonlinearity(const SymmetricField& u, int out_radius, double tail_tol = 1e-16);

// h(u) = sum_{n>=2} n (-1)^n conj(u)^{n-1} = conj(u)(conj(u)+2)/(1+conj(u))^2,
// the multiplier of the real-linear derivative dg(u)[phi] = h(u) conj(phi).
// Returned on an expansion grid of radius out_radius. Throws "state too
// large" when the series fails to contract.
ExpansionGrid nonlinearity_multiplier(const SymmetricField& u, int out_radius,
                                      double tail_tol = 1e-16);

// Residual f(v(r)+w; Omega) with v(r) = r * kernel_field, truncated to
// out_radius.
SymmetricField residual_field(const SymmetricField& u, double Omega, double omega,
                              int out_radius);

// Second-order corrector of the branch: u2 = w L(Omega0)^{-1} conj(u1)^2.
SymmetricField second_order_field(double omega, int radius = 8);

}  // namespace vfil

#endif
