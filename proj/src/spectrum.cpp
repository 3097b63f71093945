#include "vfil/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vfil {

Eigen::Matrix2d block_matrix(int j, int k, double Omega, double omega) {
  Eigen::Matrix2d m;
  m << double(k) * k + 2.0 * omega, -Omega * j, -Omega * j, double(k) * k;
  return m;
}

double lambda_site(const LatticeSite& x, double Omega, double omega) {
  if (x.j == 0) return double(x.k) * x.k + 2.0 * omega;
  const double rho = std::hypot(x.j * Omega, omega);
  return double(x.k) * x.k + omega + x.l * rho;
}

EigenPair eigenpair(const LatticeSite& x, double Omega, double omega) {
  EigenPair ep;
  ep.site = x;
  ep.Omega = Omega;
  ep.omega = omega;
  ep.lambda = lambda_site(x, Omega, omega);
  if (x.j == 0) {
    ep.vector = Eigen::Vector2d(1.0, 0.0);
    return ep;
  }
  const double jO = x.j * Omega;
  const double rho = std::hypot(jO, omega);
  if (x.l == +1) {
    const double c = std::sqrt(2.0 * rho * (rho + omega));
    ep.vector = Eigen::Vector2d(omega + rho, -jO) / c;
  } else {
    // omega - rho = -(jO)^2/(rho+omega), written so the norm stays stable
    const double c = std::sqrt(2.0 * rho * jO * jO / (rho + omega));
    ep.vector = Eigen::Vector2d(-jO * jO / (rho + omega), -jO) / c;
  }
  return ep;
}

double resonance_frequency(int j, int k, double omega) {
  if (j < 1) throw std::invalid_argument("resonance_frequency: j must be >= 1");
  const double k2 = double(k) * k;
  return std::sqrt(k2 * k2 + 2.0 * k2 * omega) / j;
}

double block_determinant(int j, int k, double omega) {
  const double j2 = double(j) * j, k2 = double(k) * k;
  return 2.0 * (k2 - j2) * omega + (k2 * k2 - j2);
}

std::vector<LatticeSite> kernel_sites(double Omega, double omega, int L, double tol) {
  std::vector<LatticeSite> out;
  for (const LatticeSite& x : build_lattice(L))
    if (std::abs(lambda_site(x, Omega, omega)) <= tol) out.push_back(x);
  return out;
}

namespace {
int annulus_index(const LatticeSite& x, int L0) {
  int n = 0, Ln = L0;
  while (x.j + x.k >= Ln) {
    Ln *= 2;
    ++n;
  }
  return n;
}
}  // namespace

SiteClassification classify_and_cluster(double Omega, double omega, int L, double d0,
                                        const std::vector<LatticeSite>& exclude, int L0) {
  SiteClassification cls;
  cls.d0 = d0;
  cls.ell = int(std::ceil(std::sqrt(double(L))));
  cls.separation_constant = std::numeric_limits<double>::infinity();

  std::vector<LatticeSite> singular;
  for (const LatticeSite& x : build_lattice(L)) {
    if (std::find(exclude.begin(), exclude.end(), x) != exclude.end()) continue;
    const double lam = lambda_site(x, Omega, omega);
    if (std::abs(lam) <= d0) {
      if (x.l == +1)
        throw std::runtime_error("threshold too large: (+1)-branch site is singular");
      singular.push_back(x);
    } else {
      cls.regular.push_back(x);
    }
  }

  for (size_t i = 0; i < singular.size(); ++i)
    for (size_t jx = i + 1; jx < singular.size(); ++jx) {
      const LatticeSite &x = singular[i], &y = singular[jx];
      const int na = annulus_index(x, L0), nb = annulus_index(y, L0);
      if (std::abs(na - nb) <= 1) {
        const int Ln = L0 << std::max(na, nb);
        const int ell_n = int(std::ceil(std::sqrt(double(std::min(Ln, L)))));
        if (site_distance(x, y) <= 4.0 * ell_n)
          throw std::runtime_error("threshold too large: singular sites collide within cluster radius");
      }
      if (x.k + y.k > 0)
        cls.separation_constant =
            std::min(cls.separation_constant, std::abs(double(x.j - y.j)) / double(x.k + y.k));
    }

  for (const LatticeSite& x : singular)
    cls.clusters.push_back({x, {x}, annulus_index(x, L0)});
  return cls;
}

double diophantine_margin(double omega, const DiophantineParams& p) {
  if (p.q_max < 2) throw std::invalid_argument("diophantine_margin: q_max must be >= 2");
  double best = std::numeric_limits<double>::infinity();
  for (long q = 1; q <= p.q_max; ++q) {
    const double x = q * omega;
    const double dist = std::abs(x - std::round(x));
    best = std::min(best, dist * std::pow(double(q), p.tau));
  }
  return best;
}

}  // namespace vfil
