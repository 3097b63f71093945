#include "vfil/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vfil {

Eigen::Matrix2d evolution_block(int j, int k, double Omega, double omega) {
  Eigen::Matrix2d m;
  m << double(k) * k + 2.0 * omega, Omega * j, Omega * j, double(k) * k;
  return m;
}

Eigen::Vector2d evolution_eigenvector(const LatticeSite& x, double Omega, double omega) {
  Eigen::Vector2d v = eigenpair(x, Omega, omega).vector;
  v(1) = -v(1);
  return v;
}

Eigen::Vector2d kernel_pair_frame(double omega, int l) {
  const double Om0 = kernel_frequency(omega);
  const double nrm = std::sqrt(1.0 + Om0 * Om0);
  if (l == -1) return Eigen::Vector2d(1.0, -Om0) / nrm;
  return Eigen::Vector2d(Om0, 1.0) / nrm;
}

SymmetricField kernel_field(double omega, int radius) {
  const double Omega0 = kernel_frequency(omega);
  const double a = 1.0 / (std::sqrt(2.0) * std::sqrt(1.0 + omega));
  SymmetricField u(radius);
  u.set(1, 1, 2.0 * a, -2.0 * a * Omega0);
  return u;
}

SymmetricField apply_linear(const SymmetricField& u, double Omega, double omega) {
  SymmetricField r(u.radius());
  for (int j = 0; j < u.radius(); ++j)
    for (int k = 0; j + k < u.radius(); ++k) {
      if (j == 0) {
        r.set(0, k, (double(k) * k + 2.0 * omega) * u.a(0, k));
      } else {
        const Eigen::Vector2d p = evolution_block(j, k, Omega, omega) *
                                  Eigen::Vector2d(u.a(j, k), u.b(j, k));
        r.set(j, k, p(0), p(1));
      }
    }
  return r;
}

SymmetricField solve_linear(const SymmetricField& rhs, double Omega, double omega,
                            bool exclude_kernel, double drop_tol) {
  SymmetricField r(rhs.radius());
  const double Omega0 = kernel_frequency(omega);
  for (int j = 0; j < rhs.radius(); ++j)
    for (int k = 0; j + k < rhs.radius(); ++k) {
      if (j == 0) {
        r.set(0, k, rhs.a(0, k) / (double(k) * k + 2.0 * omega));
        continue;
      }
      const Eigen::Vector2d p(rhs.a(j, k), rhs.b(j, k));
      if (exclude_kernel && j == 1 && k == 1) {
        const Eigen::Vector2d vm = kernel_pair_frame(omega, -1);
        const Eigen::Vector2d vp = kernel_pair_frame(omega, +1);
        if (std::abs(vm.dot(p)) > drop_tol * std::max(1.0, p.norm()))
          throw std::runtime_error("solve_linear: rhs has a kernel component");
        const double lp = vp.dot(evolution_block(1, 1, Omega, omega) * vp);
        const Eigen::Vector2d q = vp * (vp.dot(p) / lp);
        r.set(1, 1, q(0), q(1));
        continue;
      }
      const Eigen::Matrix2d m = evolution_block(j, k, Omega, omega);
      const double det = m.determinant();
      if (std::abs(det) < 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw std::runtime_error("solve_linear: singular block");
      const Eigen::Vector2d q = m.inverse() * p;
      r.set(j, k, q(0), q(1));
    }
  return r;
}

namespace {

// acc += c * term restricted to acc's grid
void axpy_grid(ExpansionGrid& acc, double c, const ExpansionGrid& term) {
  const int r = std::min(term.R, acc.R);
  for (int j = -r; j <= r; ++j)
    for (int k = -r; k <= r; ++k) acc.ref(j, k) += c * term.at(j, k);
}

int support_radius(const ExpansionGrid& g) {
  int s = 0;
  for (int j = -g.R; j <= g.R; ++j)
    for (int k = -g.R; k <= g.R; ++k)
      if (g.at(j, k) != 0.0) s = std::max(s, std::abs(j) + std::abs(k));
  return s;
}

// Sums sum_{n>=2} coef(n) * conj(u)^{pow0 + (n-2)} into a grid of radius R,
// cutting the tail at tail_tol and watching the contraction of the terms.
// Intermediate powers keep one support-width of headroom beyond R so that
// convolution paths leaving the target ball and returning are not lost.
ExpansionGrid conjugate_series(const SymmetricField& u, int R, double tail_tol, int pow0,
                               double (*coef)(int)) {
  const ExpansionGrid ubar = to_expansion(conj(u));
  const int R_work = R + support_radius(ubar);
  ExpansionGrid term = ubar;
  for (int p = 1; p < pow0; ++p) term = convolve(term, ubar, std::min(term.R + ubar.R, R_work));
  ExpansionGrid acc(R);
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 64; ++n) {
    const double c = coef(n);
    const double mag = term.c.cwiseAbs().maxCoeff();
    if (mag == 0.0 || std::abs(c) * mag < tail_tol) break;
    if (n > 8 && mag > 0.9 * prev_mag)
      throw std::runtime_error("state too large: nonlinearity series does not contract");
    prev_mag = mag;
    axpy_grid(acc, c, term);
    term = convolve(term, ubar, std::min(term.R + ubar.R, R_work));
  }
  return acc;
}

double g_coef(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }
double h_coef(int n) { return n * g_coef(n); }

}  // namespace

SymmetricField nonlinearity(const SymmetricField& u, int out_radius, double tail_tol) {
  const int R = std::max(out_radius - 1, 0);
  return from_expansion(conjugate_series(u, R, tail_tol, /*pow0=*/2, g_coef), out_radius);
}

ExpansionGrid nonlinearity_multiplier(const SymmetricField& u, int out_radius, double tail_tol) {
  return conjugate_series(u, out_radius, tail_tol, /*pow0=*/1, h_coef);
}

SymmetricField residual_field(const SymmetricField& u, double Omega, double omega,
                              int out_radius) {
  SymmetricField lin = truncate(apply_linear(u, Omega, omega), out_radius);
  SymmetricField g = nonlinearity(u, out_radius);
  return lin - omega * g;
}

SymmetricField second_order_field(double omega, int radius) {
  if (radius < 5) throw std::invalid_argument("second_order_field: radius must cover (2,2)");
  const SymmetricField u1 = kernel_field(omega, 3);
  const SymmetricField q = multiply(conj(u1), conj(u1), /*exact=*/true);
  return solve_linear(omega * truncate(q, radius), kernel_frequency(omega), omega,
                      /*exclude_kernel=*/true);
}

}  // namespace vfil
