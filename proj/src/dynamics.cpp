#include "vfil/dynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace vfil {

namespace {

const double TWO_PI = 6.283185307179586476925;

struct SpectralGrid {
  int M, P;
  mutable Eigen::FFT<double> fft;

  explicit SpectralGrid(int M_) : M(M_), P(4 * M_) {}

  // coefficients (2M+1) -> grid values (P)
  Eigen::VectorXcd to_grid(const Eigen::VectorXcd& coef) const {
    std::vector<cplx> full(P, cplx(0, 0));
    for (int m = -M; m <= M; ++m) full[(m + P) % P] = coef(m + M);
    std::vector<cplx> out(P);
    fft.inv(out, full);
    Eigen::VectorXcd g(P);
    for (int i = 0; i < P; ++i) g(i) = out[i] * double(P);
    return g;
  }

  Eigen::VectorXcd to_coef(const Eigen::VectorXcd& grid) const {
    std::vector<cplx> in(P);
    for (int i = 0; i < P; ++i) in[i] = grid(i);
    std::vector<cplx> full(P);
    fft.fwd(full, in);
    Eigen::VectorXcd coef(2 * M + 1);
    for (int m = -M; m <= M; ++m) coef(m + M) = full[(m + P) % P] / double(P);
    return coef;
  }
};

// i * sum_{i != j} (u_j - u_i)/|u_j - u_i|^2, in coefficient space
Eigen::MatrixXcd interaction(const Eigen::MatrixXcd& coef, const SpectralGrid& sg,
                             double* min_sep = nullptr) {
  const int n = int(coef.rows());
  std::vector<Eigen::VectorXcd> g(n);
  for (int f = 0; f < n; ++f) g[f] = sg.to_grid(coef.row(f));
  double msep = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd out(n, coef.cols());
  for (int f = 0; f < n; ++f) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(sg.P);
    for (int o = 0; o < n; ++o) {
      if (o == f) continue;
      for (int pIdx = 0; pIdx < sg.P; ++pIdx) {
        const cplx d = g[f](pIdx) - g[o](pIdx);
        const double nd = std::norm(d);
        msep = std::min(msep, std::sqrt(nd));
        acc(pIdx) += d / nd;
      }
    }
    acc *= cplx(0.0, 1.0);
    out.row(f) = sg.to_coef(acc);
  }
  if (min_sep) *min_sep = msep;
  return out;
}

}  // namespace

FilamentEnsemble FilamentEnsemble::from_profiles(
    const std::vector<std::function<cplx(double)>>& profiles, int M) {
  FilamentEnsemble e;
  e.n = int(profiles.size());
  e.M = M;
  e.coef = Eigen::MatrixXcd::Zero(e.n, 2 * M + 1);
  SpectralGrid sg(M);
  for (int f = 0; f < e.n; ++f) {
    Eigen::VectorXcd grid(sg.P);
    for (int i = 0; i < sg.P; ++i) grid(i) = profiles[f](TWO_PI * i / sg.P);
    e.coef.row(f) = sg.to_coef(grid);
  }
  return e;
}

cplx FilamentEnsemble::value(int filament, double s) const {
  cplx acc = 0.0;
  for (int m = -M; m <= M; ++m)
    acc += coef(filament, m + M) * std::polar(1.0, m * s);
  return acc;
}

Eigen::VectorXcd FilamentEnsemble::grid_values(int filament, int grid_points) const {
  Eigen::VectorXcd g(grid_points);
  for (int i = 0; i < grid_points; ++i) g(i) = value(filament, TWO_PI * i / grid_points);
  return g;
}

CentralConfiguration central_configuration(int n, ConfigShape shape, double R,
                                           const std::vector<cplx>& seed) {
  if (n < 2) throw std::invalid_argument("central_configuration: n must be >= 2");
  CentralConfiguration cfg;
  cfg.points.resize(n);

  auto residual_of = [n](const Eigen::VectorXcd& a, double omega) {
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        const cplx d = a(j) - a(i);
        acc += d / std::norm(d);
      }
      worst = std::max(worst, std::abs(omega * a(j) - acc));
    }
    return worst;
  };

  if (shape == ConfigShape::Polygon) {
    for (int j = 0; j < n; ++j) cfg.points(j) = std::polar(R, TWO_PI * j / n);
    cfg.omega = (n - 1) / (2.0 * R * R);
    cfg.residual = residual_of(cfg.points, cfg.omega);
    return cfg;
  }

  if (int(seed.size()) != n)
    throw std::invalid_argument("central_configuration: custom shape needs an n-point seed");
  // unknowns: Re/Im of the points and omega; gauge rows pin Im a_0 = 0 and
  // |a_0| = R
  Eigen::VectorXd x(2 * n + 1);
  for (int j = 0; j < n; ++j) {
    x(2 * j) = seed[j].real();
    x(2 * j + 1) = seed[j].imag();
  }
  x(2 * n) = 1.0;
  auto eval = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd F(2 * n + 2);
    Eigen::VectorXcd a(n);
    for (int j = 0; j < n; ++j) a(j) = cplx(v(2 * j), v(2 * j + 1));
    const double omega = v(2 * n);
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        const cplx d = a(j) - a(i);
        acc += d / std::norm(d);
      }
      const cplx res = omega * a(j) - acc;
      F(2 * j) = res.real();
      F(2 * j + 1) = res.imag();
    }
    F(2 * n) = a(0).imag();
    F(2 * n + 1) = std::abs(a(0)) - R;
    return F;
  };
  for (int it = 0; it < 60; ++it) {
    const Eigen::VectorXd F = eval(x);
    if (F.cwiseAbs().maxCoeff() < 1e-13) break;
    Eigen::MatrixXd J(2 * n + 2, 2 * n + 1);
    const double h = 1e-7;
    for (int c = 0; c < 2 * n + 1; ++c) {
      Eigen::VectorXd xp = x;
      xp(c) += h;
      J.col(c) = (eval(xp) - F) / h;
    }
    x -= J.colPivHouseholderQr().solve(F);
  }
  for (int j = 0; j < n; ++j) cfg.points(j) = cplx(x(2 * j), x(2 * j + 1));
  cfg.omega = x(2 * n);
  cfg.residual = residual_of(cfg.points, cfg.omega);
  if (!(cfg.residual < 1e-10))
    throw std::runtime_error("central_configuration: Newton did not converge");
  return cfg;
}

cplx HomographicWave::value(int filament, double t, double s) const {
  return anchors(filament) * std::polar(1.0, omega * t) *
         (1.0 + evaluate(profile, Omega * t, s));
}

std::pair<FilamentEnsemble, HomographicWave> reconstruct(const CentralConfiguration& cfg,
                                                         const SymmetricField& u, double Omega,
                                                         int M) {
  HomographicWave wave;
  wave.anchors = cfg.points;
  wave.omega = cfg.omega;
  wave.Omega = Omega;
  wave.profile = u;

  FilamentEnsemble e;
  e.n = int(cfg.points.size());
  e.M = M;
  e.coef = Eigen::MatrixXcd::Zero(e.n, 2 * M + 1);
  e.anchors = cfg.points;
  // u(0,s) = sum_k [a(0,k) + sum_j a(j,k)] cos ks, real
  Eigen::VectorXd Ak = Eigen::VectorXd::Zero(M + 1);
  for (int k = 0; k <= std::min(M, u.radius() - 1); ++k)
    for (int j = 0; j + k < u.radius(); ++j) Ak(k) += u.a(j, k);
  for (int f = 0; f < e.n; ++f) {
    e.coef(f, M) = cfg.points(f) * (1.0 + Ak(0));
    for (int k = 1; k <= M; ++k) {
      e.coef(f, M + k) = cfg.points(f) * Ak(k) / 2.0;
      e.coef(f, M - k) = cfg.points(f) * Ak(k) / 2.0;
    }
  }
  return {e, wave};
}

ConservedSet invariants(const FilamentEnsemble& e) {
  ConservedSet cs;
  SpectralGrid sg(e.M);
  // spectral pieces
  for (int f = 0; f < e.n; ++f) {
    for (int m = -e.M; m <= e.M; ++m)
      cs.energy += TWO_PI * double(m) * m * std::norm(e.coef(f, m + e.M));
    cs.center += TWO_PI * e.coef(f, e.M);
  }
  // pair potential by quadrature
  std::vector<Eigen::VectorXcd> g(e.n);
  for (int f = 0; f < e.n; ++f) g[f] = sg.to_grid(e.coef.row(f));
  for (int f = 0; f < e.n; ++f)
    for (int o = f + 1; o < e.n; ++o)
      for (int i = 0; i < sg.P; ++i)
        cs.energy -= TWO_PI / sg.P * std::log(std::norm(g[f](i) - g[o](i)));

  if (e.anchors && e.anchors->size() == e.n) {
    // least-squares homographic profile w with u_j = a_j w
    const Eigen::VectorXcd& a = *e.anchors;
    double norm_a = 0.0;
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(2 * e.M + 1);
    for (int f = 0; f < e.n; ++f) {
      w += std::conj(a(f)) * e.coef.row(f).transpose();
      norm_a += std::norm(a(f));
    }
    w /= norm_a;
    double defect = 0.0;
    for (int f = 0; f < e.n; ++f)
      defect = std::max(defect, (e.coef.row(f).transpose() - a(f) * w).cwiseAbs().maxCoeff());
    if (defect < 1e-9) {
      cs.homographic = true;
      Eigen::VectorXcd wg = sg.to_grid(w);
      for (int m = -e.M; m <= e.M; ++m) {
        const double p = std::norm(w(m + e.M));
        cs.I += TWO_PI * p;
        cs.W += -TWO_PI * m * p;
        cs.H += TWO_PI * double(m) * m * p;
      }
      for (int i = 0; i < sg.P; ++i) cs.H -= TWO_PI / sg.P * std::log(std::norm(wg(i)));
    }
  }
  return cs;
}

SeparationReport min_separation(const FilamentEnsemble& e) {
  SpectralGrid sg(e.M);
  std::vector<Eigen::VectorXcd> g(e.n);
  for (int f = 0; f < e.n; ++f) g[f] = sg.to_grid(e.coef.row(f));
  SeparationReport rep;
  rep.value = std::numeric_limits<double>::infinity();
  for (int f = 0; f < e.n; ++f)
    for (int o = f + 1; o < e.n; ++o)
      for (int i = 0; i < sg.P; ++i) {
        const double d = std::abs(g[f](i) - g[o](i));
        if (d < rep.value) {
          rep.value = d;
          rep.filament_a = f;
          rep.filament_b = o;
          rep.s_location = TWO_PI * i / sg.P;
        }
      }
  return rep;
}

IntegrationResult integrate(const FilamentEnsemble& e0, double T, const IntegrationOptions& opt) {
  IntegrationResult out;
  out.state = e0;
  const SpectralGrid sg(e0.M);
  const int n = e0.n, W = 2 * e0.M + 1;

  const double sep0 = min_separation(e0).value;
  const double floor = (opt.separation_floor > 0) ? opt.separation_floor : 1e-3 * sep0;
  out.min_separation_seen = sep0;

  const ConservedSet c0 = invariants(e0);

  const int steps = std::max(1, int(std::ceil(T / opt.dt)));
  const double dt = T / steps;

  Eigen::VectorXcd E(W), Eh(W);
  for (int m = -e0.M; m <= e0.M; ++m) {
    E(m + e0.M) = std::polar(1.0, -double(m) * m * dt);
    Eh(m + e0.M) = std::polar(1.0, -double(m) * m * dt / 2.0);
  }
  auto scale = [&](const Eigen::MatrixXcd& X, const Eigen::VectorXcd& e) {
    return (X * e.asDiagonal()).eval();
  };

  Eigen::MatrixXcd U = e0.coef;
  for (int st = 0; st < steps; ++st) {
    double msep = 0.0;
    const Eigen::MatrixXcd k1 = interaction(U, sg, &msep);
    out.min_separation_seen = std::min(out.min_separation_seen, msep);
    if (msep < floor) {
      out.separation_breached = true;
      out.t_reached = e0.time + st * dt;
      out.state.coef = U;
      out.state.time = out.t_reached;
      return out;
    }
    const Eigen::MatrixXcd k2 = interaction(scale(U + dt / 2.0 * k1, Eh), sg);
    const Eigen::MatrixXcd k3 = interaction(scale(U, Eh) + dt / 2.0 * k2, sg);
    const Eigen::MatrixXcd k4 = interaction(scale(U, E) + dt * scale(k3, Eh), sg);
    U = scale(U, E) + dt / 6.0 * (scale(k1, E) + 2.0 * scale(k2 + k3, Eh) + k4);
    if (opt.frame_stride > 0 && opt.frame_callback && (st + 1) % opt.frame_stride == 0) {
      FilamentEnsemble frame = e0;
      frame.coef = U;
      frame.time = e0.time + (st + 1) * dt;
      opt.frame_callback(frame);
    }
  }
  out.state.coef = U;
  out.state.time = e0.time + T;
  out.t_reached = out.state.time;

  const ConservedSet c1 = invariants(out.state);
  const double scale_e = std::max(std::abs(c0.energy), 1.0);
  out.energy_drift = std::abs(c1.energy - c0.energy) / scale_e;
  out.center_drift = std::abs(c1.center - c0.center);
  return out;
}

}  // namespace vfil
