#ifndef VFIL_ORBITS_HPP
#define VFIL_ORBITS_HPP

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace vfil {

struct RadialOrbitParams {
  double c = 0.0;      // angular momentum
  double omega = 0.0;  // rotation frequency
  double E = 0.0;      // energy level of c^2 (d rho)^2 + V(rho) = E
};

// V(rho) = c^2 rho^2 - ln rho^2 - w rho^{-2} and its derivative.
std::pair<double, double> effective_potential(double rho, const RadialOrbitParams& p);

struct Equilibria {
  std::optional<double> rho_plus, rho_minus;  // c != 0, w in (0, 1/(4c^2))
  std::optional<double> r_unique;             // c == 0: r = w^{-1/2}
};

// Closed-form critical points of V; throws "no equilibria" when
// w >= 1/(4c^2) with c != 0.
Equilibria equilibria(double c, double omega);

struct RadialOrbit {
  std::vector<double> theta, rho;
  double energy_drift = 0.0;   // max |E(theta) - E(0)|
  double rho_min = 0.0, rho_max = 0.0;
  bool escaped = false;        // left the bounded well
};

// Energy-conserving RK4 integration of c^2 rho'' + c^2 rho - 1/rho + w/rho^3 = 0
// from (rho0, drho0) over theta_span.
RadialOrbit integrate_radial(const RadialOrbitParams& p, double rho0, double drho0,
                             double theta_span, double dtheta, int sample_stride = 16);

struct HelixDescriptor {
  double a = 0.0, sigma = 0.0;
  double omega = 0.0;            // -sigma^2 + a^{-2}
  double alpha = 0.0;            // applied Galilean boost
  double sigma_boosted = 0.0;    // sigma + alpha
  double omega_boosted = 0.0;    // omega - 2 alpha sigma - alpha^2
};

// Helix frequency and its Galilean transform; alpha = -sigma lands on the
// straight branch with omega' = a^{-2}.
HelixDescriptor helix_and_galilei(double a, double sigma, double alpha);

// Rescaling tau^{-1} w(tau^2 t, tau s): maps spatial period P to 2 pi with
// tau = P / (2 pi); amplitude and frequency transform as a/tau, tau^2 omega.
struct ScalingDescriptor {
  double tau = 1.0, amplitude = 0.0, omega = 0.0;
};
ScalingDescriptor rescale_to_standard_period(double P, double amplitude, double omega);

// Traveling-wave field on the line lattice {(l, lk)}: v = sum v_l e^{il(t+ks)}
// with real coefficients.
struct LineLatticeField {
  int k = 1;
  int L = 0;
  Eigen::VectorXd v;  // index l+L, l in [-L, L]

  double coef(int l) const { return (std::abs(l) <= L) ? v(l + L) : 0.0; }
};

struct TravelingPoint {
  double amplitude = 0.0;
  double Omega = 0.0;
  LineLatticeField field;
  double residual = 0.0;
};

struct TravelingBranch {
  std::vector<TravelingPoint> points;
  bool truncated = false;  // Newton failed past the last point (fold)
};

// Newton continuation in the amplitude v_1 from the bifurcation point
// (v = 1, Omega0 = |k| sqrt(k^2 + 2w)); no small divisors on this lattice.
TravelingBranch traveling_branch(double omega, int k, const std::vector<double>& amplitude_grid,
                                 int L);

double traveling_bifurcation_frequency(double omega, int k);

// Largest imaginary part among the Fourier projections of the traveling-wave
// residual; zero up to roundoff exactly when the real-coefficient
// representation is consistent.
double traveling_reality_defect(const LineLatticeField& f, double Omega, double omega);

}  // namespace vfil

#endif
