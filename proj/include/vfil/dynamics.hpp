#ifndef VFIL_DYNAMICS_HPP
#define VFIL_DYNAMICS_HPP

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "vfil/lattice.hpp"

namespace vfil {

using cplx = std::complex<double>;

// n periodic curves as per-filament Fourier series in s, modes |m| <= M.
struct FilamentEnsemble {
  int n = 0;
  int M = 0;
  Eigen::MatrixXcd coef;  // n x (2M+1), column m+M holds mode m
  double time = 0.0;
  std::optional<Eigen::VectorXcd> anchors;  // central-configuration points, when known

  static FilamentEnsemble from_profiles(
      const std::vector<std::function<cplx(double)>>& profiles, int M);
  cplx value(int filament, double s) const;
  Eigen::VectorXcd grid_values(int filament, int grid_points) const;
};

struct CentralConfiguration {
  Eigen::VectorXcd points;
  double omega = 0.0;
  double residual = 0.0;
};

enum class ConfigShape { Polygon, Custom };

// Solves w a_j = sum_{i != j} (a_j - a_i)/|a_j - a_i|^2. For a regular
// polygon of radius R the frequency is (n-1)/(2R^2) in closed form; Custom
// runs a gauge-fixed least-squares Newton from the supplied seed.
CentralConfiguration central_configuration(int n, ConfigShape shape, double R,
                                           const std::vector<cplx>& seed = {});

struct HomographicWave {
  Eigen::VectorXcd anchors;
  double omega = 0.0;
  double Omega = 0.0;
  SymmetricField profile;  // u of the standing wave; filaments a_j e^{iwt}(1+u(Omega t, s))

  cplx value(int filament, double t, double s) const;
};

// Ensemble at t=0 for the standing wave, plus the exact evaluator.
std::pair<FilamentEnsemble, HomographicWave> reconstruct(const CentralConfiguration& cfg,
                                                         const SymmetricField& u, double Omega,
                                                         int M);

struct ConservedSet {
  double energy = 0.0;        // sum_j int |u_j'|^2 - sum_{i<j} int ln|u_j-u_i|^2
  cplx center{0.0, 0.0};      // sum_j int u_j ds
  bool homographic = false;
  double H = 0.0, I = 0.0, W = 0.0;  // scalar invariants of the homographic profile
};

ConservedSet invariants(const FilamentEnsemble& e);

struct SeparationReport {
  double value = 0.0;
  int filament_a = 0, filament_b = 0;
  double s_location = 0.0;
};

SeparationReport min_separation(const FilamentEnsemble& e);

struct IntegrationOptions {
  double dt = 1e-3;
  double separation_floor = -1.0;  // default: 1e-3 * initial minimum
  int monitor_stride = 8;
  std::function<void(const FilamentEnsemble&)> frame_callback;  // optional
  int frame_stride = 0;  // 0: no frames
};

struct IntegrationResult {
  FilamentEnsemble state;
  bool separation_breached = false;
  double t_reached = 0.0;
  double energy_drift = 0.0;  // relative when the energy is nonzero
  double center_drift = 0.0;
  double min_separation_seen = 0.0;
};

// Integrating-factor RK4: the self-induction part e^{-i m^2 dt} is applied
// exactly, the pairwise interaction explicitly on a 4M-point collocation
// grid.
IntegrationResult integrate(const FilamentEnsemble& e0, double T, const IntegrationOptions& opt);

}  // namespace vfil

#endif
