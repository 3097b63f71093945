#include "vfil/orbits.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace vfil {

namespace {
const double TWO_PI = 6.283185307179586476925;
}

std::pair<double, double> effective_potential(double rho, const RadialOrbitParams& p) {
  if (rho <= 0.0) throw std::invalid_argument("effective_potential: rho must be positive");
  const double V = p.c * p.c * rho * rho - std::log(rho * rho) - p.omega / (rho * rho);
  const double Vp = 2.0 * p.c * p.c * rho - 2.0 / rho + 2.0 * p.omega / (rho * rho * rho);
  return {V, Vp};
}

Equilibria equilibria(double c, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("equilibria: omega must be positive");
  Equilibria eq;
  if (c == 0.0) {
    eq.r_unique = 1.0 / std::sqrt(omega);
    return eq;
  }
  const double disc = 1.0 - 4.0 * c * c * omega;
  if (disc < 0.0) throw std::runtime_error("no equilibria: omega >= 1/(4c^2)");
  eq.rho_plus = std::sqrt((1.0 + std::sqrt(disc)) / (2.0 * c * c));
  eq.rho_minus = std::sqrt((1.0 - std::sqrt(disc)) / (2.0 * c * c));
  return eq;
}

RadialOrbit integrate_radial(const RadialOrbitParams& p, double rho0, double drho0,
                             double theta_span, double dtheta, int sample_stride) {
  if (p.c == 0.0) throw std::invalid_argument("integrate_radial: c must be nonzero");
  RadialOrbit orbit;
  const double c2 = p.c * p.c;
  auto accel = [&](double rho) {
    // c^2 rho'' = 1/rho - w/rho^3 - c^2 rho
    return (1.0 / rho - p.omega / (rho * rho * rho)) / c2 - rho;
  };
  auto energy = [&](double rho, double v) {
    return c2 * v * v + effective_potential(rho, p).first;
  };

  const int steps = std::max(1, int(std::ceil(theta_span / dtheta)));
  const double h = theta_span / steps;
  double rho = rho0, v = drho0;
  const double E0 = energy(rho, v);
  orbit.rho_min = orbit.rho_max = rho;
  orbit.theta.push_back(0.0);
  orbit.rho.push_back(rho);
  for (int i = 0; i < steps; ++i) {
    const double k1r = v, k1v = accel(rho);
    const double k2r = v + h / 2 * k1v, k2v = accel(rho + h / 2 * k1r);
    const double k3r = v + h / 2 * k2v, k3v = accel(rho + h / 2 * k2r);
    const double k4r = v + h * k3v, k4v = accel(rho + h * k3r);
    rho += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (rho <= 0.0 || !std::isfinite(rho)) {
      orbit.escaped = true;
      break;
    }
    orbit.rho_min = std::min(orbit.rho_min, rho);
    orbit.rho_max = std::max(orbit.rho_max, rho);
    orbit.energy_drift = std::max(orbit.energy_drift, std::abs(energy(rho, v) - E0));
    if ((i + 1) % sample_stride == 0 || i + 1 == steps) {
      orbit.theta.push_back((i + 1) * h);
      orbit.rho.push_back(rho);
    }
  }
  return orbit;
}

HelixDescriptor helix_and_galilei(double a, double sigma, double alpha) {
  if (a <= 0.0) throw std::invalid_argument("helix_and_galilei: a must be positive");
  HelixDescriptor h;
  h.a = a;
  h.sigma = sigma;
  h.alpha = alpha;
  h.omega = -sigma * sigma + 1.0 / (a * a);
  h.sigma_boosted = sigma + alpha;
  h.omega_boosted = h.omega - 2.0 * alpha * sigma - alpha * alpha;
  return h;
}

ScalingDescriptor rescale_to_standard_period(double P, double amplitude, double omega) {
  ScalingDescriptor d;
  d.tau = P / TWO_PI;
  d.amplitude = amplitude / d.tau;
  d.omega = d.tau * d.tau * omega;
  return d;
}

double traveling_bifurcation_frequency(double omega, int k) {
  return std::abs(k) * std::sqrt(double(k) * k + 2.0 * omega);
}

namespace {

// residual of -i Omega v_t - v_ss + w(1 - |v|^-2) v on the line lattice,
// evaluated by collocation in theta = t + ks
Eigen::VectorXd traveling_residual(const Eigen::VectorXd& v, double Omega, double omega, int k,
                                   int L) {
  const int P = 4 * (2 * L + 1);
  Eigen::VectorXd F(2 * L + 1);
  std::vector<std::complex<double>> grid(P);
  for (int i = 0; i < P; ++i) {
    const double th = TWO_PI * i / P;
    std::complex<double> val = 0.0;
    for (int l = -L; l <= L; ++l) val += v(l + L) * std::polar(1.0, l * th);
    grid[i] = val;
  }
  for (int i = 0; i < P; ++i) {
    const double m2 = std::norm(grid[i]);
    grid[i] = omega * (1.0 - 1.0 / m2) * grid[i];
  }
  for (int l = -L; l <= L; ++l) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < P; ++i) acc += grid[i] * std::polar(1.0, -l * TWO_PI * i / P);
    acc /= double(P);
    // the linear part is diagonal: (Omega l + k^2 l^2) v_l
    F(l + L) = (Omega * l + double(k) * k * l * l) * v(l + L) + acc.real();
  }
  return F;
}

}  // namespace

double traveling_reality_defect(const LineLatticeField& f, double Omega, double omega) {
  const int L = f.L, P = 4 * (2 * L + 1);
  std::vector<std::complex<double>> grid(P);
  for (int i = 0; i < P; ++i) {
    const double th = TWO_PI * i / P;
    std::complex<double> val = 0.0;
    for (int l = -L; l <= L; ++l) val += f.coef(l) * std::polar(1.0, l * th);
    grid[i] = val;
  }
  double worst = 0.0;
  for (int l = -L; l <= L; ++l) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < P; ++i) {
      const double m2 = std::norm(grid[i]);
      acc += omega * (1.0 - 1.0 / m2) * grid[i] * std::polar(1.0, -l * TWO_PI * i / P);
    }
    worst = std::max(worst, std::abs(acc.imag()) / double(P));
  }
  (void)Omega;
  return worst;
}

TravelingBranch traveling_branch(double omega, int k, const std::vector<double>& amplitude_grid,
                                 int L) {
  if (L < 2) throw std::invalid_argument("traveling_branch: L must be >= 2");
  TravelingBranch branch;
  const double Omega0 = traveling_bifurcation_frequency(omega, k);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * L + 1);
  v(L) = 1.0;  // v = 1
  double Omega = Omega0;

  for (double eps : amplitude_grid) {
    if (eps == 0.0) {
      TravelingPoint pt;
      pt.amplitude = 0.0;
      pt.Omega = Omega0;
      pt.field = {k, L, v};
      branch.points.push_back(std::move(pt));
      continue;
    }
    Eigen::VectorXd vw = v;
    vw(1 + L) = eps;  // pinned amplitude coordinate
    double Om = Omega;
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      Eigen::VectorXd vt = vw;
      double Ot = Om;
      ok = true;
      for (int it = 0; it < 40; ++it) {
        const Eigen::VectorXd F = traveling_residual(vt, Ot, omega, k, L);
        if (F.cwiseAbs().maxCoeff() < 1e-13) break;
        // unknowns: v_l (l != 1) and Omega
        Eigen::MatrixXd J(2 * L + 1, 2 * L + 1);
        const double h = 1e-7;
        int col = 0;
        for (int l = -L; l <= L; ++l) {
          if (l == 1) continue;
          Eigen::VectorXd vp = vt;
          vp(l + L) += h;
          J.col(col++) = (traveling_residual(vp, Ot, omega, k, L) - F) / h;
        }
        J.col(col) = (traveling_residual(vt, Ot + h, omega, k, L) - F) / h;
        const Eigen::VectorXd dx = J.partialPivLu().solve(F);
        if (!dx.allFinite() || dx.cwiseAbs().maxCoeff() > 10.0) {
          ok = false;
          break;
        }
        col = 0;
        for (int l = -L; l <= L; ++l) {
          if (l == 1) continue;
          vt(l + L) -= dx(col++);
        }
        Ot -= dx(col);
        if (it == 39) ok = false;
      }
      if (ok && traveling_residual(vt, Ot, omega, k, L).cwiseAbs().maxCoeff() < 1e-12) {
        vw = vt;
        Om = Ot;
      } else {
        ok = false;
        break;
      }
    }
    if (!ok) {
      branch.truncated = true;
      break;
    }
    v = vw;
    Omega = Om;
    TravelingPoint pt;
    pt.amplitude = eps;
    pt.Omega = Omega;
    pt.field = {k, L, v};
    pt.residual = traveling_residual(v, Omega, omega, k, L).cwiseAbs().maxCoeff();
    branch.points.push_back(std::move(pt));
  }
  return branch;
}

}  // namespace vfil
