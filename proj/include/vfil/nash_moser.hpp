#ifndef VFIL_NASH_MOSER_HPP
#define VFIL_NASH_MOSER_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vfil/hamiltonian.hpp"

namespace vfil {

// Doubling-ball schedule: L_n = 2^n L0, d_n = L_n^{-beta},
// gamma_n = sigma0 / 2^{n+2} (so sum 2 gamma_n -> sigma0/2),
// sigma_n = sigma_{n-1} - 2 gamma_n, ell_n = ceil(sqrt(L_n)).
struct SolverSchedule {
  int L0 = 8;
  int n_max = 2;
  double beta = 2.0;
  double sigma0 = 0.1;
  double s_weight = 2.0;
  double d0 = 0.05;
  double kappa_target = 1.5;
  double excision_width_C = 2.0;  // N_{j,k} half-width = C d_n / L_n
  int post_newton_max = 12;       // final-ball polish iterations
  int halvings_max = 5;
  double target_residual = 1e-10;
  double initial_residual = 1e-12;
  bool use_dense_inverse = false;  // test oracle: bypass the preconditioner

  int L(int n) const { return L0 << n; }
  double d(int n) const { return std::pow(double(L(n)), -beta); }
  double gamma(int n) const { return sigma0 / std::pow(2.0, n + 2); }
  double sigma(int n) const {
    // sigma0 (1/2 + 2^{-(n+1)}) > sigma0/2 for every n
    return sigma0 * (0.5 + std::pow(2.0, -(n + 1)));
  }
  int ell(int n) const { return int(std::ceil(std::sqrt(double(L(n))))); }
  NormParams norm(int n) const { return {sigma(n), s_weight}; }
  void validate() const;
};

struct ExcisionRecord {
  int j = 0, k = 0;
  int stage = 0;
  std::vector<std::pair<double, double>> curve;  // samples (r, Omega_z(r))
  double half_width = 0.0;
  double slope_at_zero = 0.0;  // measured dE/dOmega of the local eigenvalue at r=0

  double omega_z_at(double r) const;
  bool contains(double r, double Omega, bool doubled) const;
};

struct SolveDiagnostics {
  std::vector<double> residual_norms;
  std::vector<double> delta_norms;
  std::vector<double> K_norms;
  double kappa_fit = 0.0;
  int stages = 0;
  bool converged = false;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InitialWindowError : SolverError {
  using SolverError::SolverError;
};
struct NoContractionError : SolverError {
  using SolverError::SolverError;
};
struct ExcisionHit : SolverError {
  ExcisionRecord record;
  ExcisionHit(const std::string& what, ExcisionRecord rec)
      : SolverError(what), record(std::move(rec)) {}
};

// Solves the range equation projected on the core ball B_0; the result is
// orthogonal to the kernel direction by construction.
SymmetricField initial_step(double r, double Omega, double omega, const SolverSchedule& sched);

// Doubling-ball corrections with preconditioned inverses, then final-ball
// Newton polish. Hypotheses (h2), (h3) are checked at every stage; an (h3)
// violation aborts with ExcisionHit carrying the offending band.
std::pair<SymmetricField, SolveDiagnostics> iterate(double r, double Omega, double omega,
                                                    const SolverSchedule& sched,
                                                    const SymmetricField& w0);

// Final-ball Newton refinements at fixed Omega (the polish stage of iterate,
// callable separately while alternating with the kernel equation). Returns
// the refined state and the range residual reached; stops early at the
// schedule target.
std::pair<SymmetricField, double> refine(const SymmetricField& w, double r, double Omega,
                                         double omega, const SolverSchedule& sched,
                                         int max_steps);

// The kernel-equation residual <f(v(r)+w; Omega), e_{1,1,-1}(Omega0)> and its
// analytic Omega-derivative at frozen w.
std::pair<double, double> kernel_equation(const SymmetricField& w, double r, double Omega,
                                          double omega, int radius);

// Traces the zero curve Omega_z(r) of the local cluster eigenvalue for every
// singular site in the stage-n annulus (state v(r) + r^2 u2), and records
// bands of half-width C d_n / L_n.
std::vector<ExcisionRecord> excision_neighborhoods(double omega, double r_max, int n,
                                                   const SolverSchedule& sched,
                                                   int samples = 9);

struct MeasureReport {
  double C_beta = 0.0;
  double lower_bound = 0.0;      // r0 (1 - r0 C_beta)
  double empirical_good = 0.0;   // measure of {r <= r0 : outside all doubled bands}
  double excluded_fraction = 0.0;
};

// Interval sweep of the branch Omega(r) = Omega0 + Omega2 r^2 against the
// doubled excision bands, plus the analytic bound with C_beta =
// (C/sqrt|Omega2|) sum_n L_n^{3/2-beta}.
MeasureReport cantor_measure(double r0, const SolverSchedule& sched, double Omega0, double Omega2,
                             const std::vector<ExcisionRecord>& excisions,
                             int sweep_points = 20001);

}  // namespace vfil

#endif
