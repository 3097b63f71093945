#include "vfil/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vfil {

bool site_in_lattice(const LatticeSite& x) {
  if (x.j < 0 || x.k < 0) return false;
  if (x.l != 1 && x.l != -1) return false;
  if (x.j == 0) return x.l == 1;
  return true;
}

bool site_less(const LatticeSite& x, const LatticeSite& y) {
  const int lx = (x.l == 1) ? 0 : 1, ly = (y.l == 1) ? 0 : 1;
  const auto kx = std::array<int, 4>{x.j + x.k, x.j, x.k, lx};
  const auto ky = std::array<int, 4>{y.j + y.k, y.j, y.k, ly};
  return kx < ky;
}

double site_distance(const LatticeSite& x, const LatticeSite& y) {
  return std::hypot(double(x.j - y.j), double(x.k - y.k));
}

std::vector<LatticeSite> build_lattice(int L) {
  if (L < 1) throw std::invalid_argument("build_lattice: L must be >= 1");
  std::vector<LatticeSite> sites;
  for (int j = 0; j + 0 < L; ++j)
    for (int k = 0; j + k < L; ++k) {
      if (j == 0) {
        sites.push_back({0, k, +1});
      } else {
        sites.push_back({j, k, +1});
        sites.push_back({j, k, -1});
      }
    }
  std::sort(sites.begin(), sites.end(), site_less);
  return sites;
}

SymmetricField::SymmetricField(int radius)
    : radius_(radius),
      a_(Eigen::MatrixXd::Zero(radius, radius)),
      b_(Eigen::MatrixXd::Zero(radius, radius)) {
  if (radius < 0) throw std::invalid_argument("SymmetricField: negative radius");
}

SymmetricField SymmetricField::constant(double value, int radius) {
  SymmetricField u(radius);
  u.set(0, 0, value);
  return u;
}

double SymmetricField::a(int j, int k) const {
  if (j < 0 || k < 0 || j + k >= radius_) return 0.0;
  return a_(j, k);
}

double SymmetricField::b(int j, int k) const {
  if (j <= 0 || k < 0 || j + k >= radius_) return 0.0;
  return b_(j, k);
}

void SymmetricField::set(int j, int k, double a_val, double b_val) {
  if (j < 0 || k < 0 || j + k >= radius_)
    throw std::out_of_range("SymmetricField::set: pair outside truncation");
  a_(j, k) = a_val;
  if (j > 0) b_(j, k) = b_val;
}

void SymmetricField::add(int j, int k, double a_val, double b_val) {
  set(j, k, a(j, k) + a_val, b(j, k) + b_val);
}

double SymmetricField::max_abs() const {
  double m = 0.0;
  for (int j = 0; j < radius_; ++j)
    for (int k = 0; j + k < radius_; ++k)
      m = std::max({m, std::abs(a_(j, k)), std::abs(b_(j, k))});
  return m;
}

SymmetricField& SymmetricField::operator+=(const SymmetricField& o) {
  if (o.radius_ > radius_) {
    SymmetricField grown(o.radius_);
    grown.a_.topLeftCorner(radius_, radius_) = a_;
    grown.b_.topLeftCorner(radius_, radius_) = b_;
    *this = grown;
  }
  for (int j = 0; j < o.radius_; ++j)
    for (int k = 0; j + k < o.radius_; ++k) {
      a_(j, k) += o.a_(j, k);
      b_(j, k) += o.b_(j, k);
    }
  return *this;
}

SymmetricField& SymmetricField::operator-=(const SymmetricField& o) {
  SymmetricField neg = o;
  neg *= -1.0;
  return *this += neg;
}

SymmetricField& SymmetricField::operator*=(double c) {
  a_ *= c;
  b_ *= c;
  return *this;
}

SymmetricField operator+(SymmetricField u, const SymmetricField& v) { return u += v; }
SymmetricField operator-(SymmetricField u, const SymmetricField& v) { return u -= v; }
SymmetricField operator*(double c, SymmetricField u) { return u *= c; }

SymmetricField conj(const SymmetricField& u) {
  SymmetricField r(u.radius());
  for (int j = 0; j < u.radius(); ++j)
    for (int k = 0; j + k < u.radius(); ++k) r.set(j, k, u.a(j, k), -u.b(j, k));
  return r;
}

SymmetricField truncate(const SymmetricField& u, int radius) {
  SymmetricField r(radius);
  for (int j = 0; j < radius; ++j)
    for (int k = 0; j + k < radius; ++k) r.set(j, k, u.a(j, k), u.b(j, k));
  return r;
}

ExpansionGrid to_expansion(const SymmetricField& u) {
  const int R = std::max(u.radius() - 1, 0);
  ExpansionGrid g(R);
  for (int j = 0; j <= R; ++j)
    for (int k = 0; j + k < u.radius(); ++k) {
      const double A = u.a(j, k), B = u.b(j, k);
      if (A == 0.0 && B == 0.0) continue;
      // (A cos jt + iB sin jt) = ((A+B)/2) e^{ijt} + ((A-B)/2) e^{-ijt};
      // cos ks spreads half of each onto +-k.
      const double cp = (j == 0) ? A : (A + B) / 2.0;
      const double cm = (A - B) / 2.0;
      const double sk = (k == 0) ? 1.0 : 0.5;
      g.ref(j, k) += cp * sk;
      if (k > 0) g.ref(j, -k) += cp * sk;
      if (j > 0) {
        g.ref(-j, k) += cm * sk;
        if (k > 0) g.ref(-j, -k) += cm * sk;
      }
    }
  return g;
}

SymmetricField from_expansion(const ExpansionGrid& g, int radius) {
  SymmetricField u(radius);
  for (int j = 0; j < radius; ++j)
    for (int k = 0; j + k < radius; ++k) {
      const double sk = (k == 0) ? 1.0 : 2.0;
      if (j == 0) {
        u.set(0, k, sk * g.at(0, k));
      } else {
        const double cp = g.at(j, k), cm = g.at(-j, k);
        u.set(j, k, sk * (cp + cm), sk * (cp - cm));
      }
    }
  return u;
}

ExpansionGrid convolve(const ExpansionGrid& u, const ExpansionGrid& v, int out_radius) {
  ExpansionGrid out(out_radius);
  for (int ju = -u.R; ju <= u.R; ++ju)
    for (int ku = -u.R; ku <= u.R; ++ku) {
      const double cu = u.at(ju, ku);
      if (cu == 0.0) continue;
      const int jlo = std::max(-v.R, -out_radius - ju), jhi = std::min(v.R, out_radius - ju);
      for (int jv = jlo; jv <= jhi; ++jv) {
        const int klo = std::max(-v.R, -out_radius - ku), khi = std::min(v.R, out_radius - ku);
        for (int kv = klo; kv <= khi; ++kv) {
          const double cv = v.at(jv, kv);
          if (cv == 0.0) continue;
          out.ref(ju + jv, ku + kv) += cu * cv;
        }
      }
    }
  return out;
}

SymmetricField multiply(const SymmetricField& u, const SymmetricField& v, bool exact) {
  const int Lu = std::max(u.radius(), 1), Lv = std::max(v.radius(), 1);
  const int Lout = exact ? (Lu + Lv - 1) : std::max(Lu, Lv);
  ExpansionGrid prod = convolve(to_expansion(u), to_expansion(v), Lout - 1);
  return from_expansion(prod, Lout);
}

double inner_product(const SymmetricField& u, const SymmetricField& v) {
  double acc = 0.0;
  const int L = std::min(u.radius(), v.radius());
  for (int j = 0; j < L; ++j)
    for (int k = 0; j + k < L; ++k) {
      const double mk = (k == 0) ? 1.0 : 0.5;
      if (j == 0)
        acc += mk * u.a(0, k) * v.a(0, k);
      else
        acc += mk * (u.a(j, k) * v.a(j, k) + u.b(j, k) * v.b(j, k)) / 2.0;
    }
  return acc;
}

namespace {
double pair_weight(int j, int k, const NormParams& p) {
  const double mod = std::hypot(double(j), double(k));
  const double ang = 1.0 + double(j) * j + double(k) * k;
  return std::exp(2.0 * p.sigma * mod) * std::pow(ang, p.s_weight);
}
}  // namespace

double sigma_norm(const SymmetricField& u, const NormParams& p) {
  double acc = 0.0;
  for (int j = 0; j < u.radius(); ++j)
    for (int k = 0; j + k < u.radius(); ++k) {
      double q;  // sum of squared basis coefficients of the (j,k) pair
      if (j == 0 && k == 0)
        q = u.a(0, 0) * u.a(0, 0);
      else if (j == 0)
        q = u.a(0, k) * u.a(0, k) / 2.0;
      else {
        const double ck2 = (k == 0) ? 2.0 : 4.0;
        q = (u.a(j, k) * u.a(j, k) + u.b(j, k) * u.b(j, k)) / ck2;
      }
      acc += q * pair_weight(j, k, p);
    }
  return std::sqrt(acc);
}

double sigma_norm_exponential(const SymmetricField& u, const NormParams& p) {
  const ExpansionGrid g = to_expansion(u);
  double acc = 0.0;
  for (int j = -g.R; j <= g.R; ++j)
    for (int k = -g.R; k <= g.R; ++k) {
      const double c = g.at(j, k);
      if (c == 0.0) continue;
      acc += c * c * pair_weight(std::abs(j), std::abs(k), p);
    }
  return std::sqrt(acc);
}

std::complex<double> evaluate(const SymmetricField& u, double t, double s) {
  std::complex<double> acc = 0.0;
  for (int j = 0; j < u.radius(); ++j)
    for (int k = 0; j + k < u.radius(); ++k) {
      const double A = u.a(j, k), B = u.b(j, k);
      if (A == 0.0 && B == 0.0) continue;
      const std::complex<double> tpart(A * std::cos(j * t), B * std::sin(j * t));
      acc += tpart * std::cos(k * s);
    }
  return acc;
}

}  // namespace vfil
