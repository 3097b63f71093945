#include "vfil/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace vfil {

namespace {

// e^{sigma |x-y|} <x-y>^s with <z> = sqrt(1 + |z|^2)
double weight(const LatticeSite& x, const LatticeSite& y, double sigma, double s) {
  const double dj = x.j - y.j, dk = x.k - y.k;
  return std::exp(sigma * std::hypot(dj, dk)) * std::pow(1.0 + dj * dj + dk * dk, s / 2.0);
}

// Frame vector of a site: current-frequency eigenvector, except the (1,1)
// pair which is pinned at Omega0 when the kernel is excluded.
Eigen::Vector2d frame_vector(const LatticeSite& x, double Omega, double omega,
                             const AssemblyOptions& opt) {
  if (opt.exclude_kernel && x.j == 1 && x.k == 1) return kernel_pair_frame(omega, x.l);
  return evolution_eigenvector(x, Omega, omega);
}

struct ExpEntry {
  int j, k;
  double c;
};

// Exponential expansion of the site basis vector (at most four entries, all
// real).
void exp_entries(const LatticeSite& x, const Eigen::Vector2d& v, ExpEntry out[4], int* count) {
  *count = 0;
  const double s2 = std::sqrt(2.0);
  if (x.j == 0) {
    if (x.k == 0) {
      out[(*count)++] = {0, 0, 1.0};
    } else {
      out[(*count)++] = {0, x.k, s2 / 2.0};
      out[(*count)++] = {0, -x.k, s2 / 2.0};
    }
    return;
  }
  const double ck = (x.k == 0) ? s2 : 2.0;
  const double cp = ck * (v(0) + v(1)) / 2.0, cm = ck * (v(0) - v(1)) / 2.0;
  if (x.k == 0) {
    out[(*count)++] = {x.j, 0, cp};
    out[(*count)++] = {-x.j, 0, cm};
  } else {
    out[(*count)++] = {x.j, x.k, cp / 2.0};
    out[(*count)++] = {x.j, -x.k, cp / 2.0};
    out[(*count)++] = {-x.j, x.k, cm / 2.0};
    out[(*count)++] = {-x.j, -x.k, cm / 2.0};
  }
}

}  // namespace

int LatticeOperator::row_index(const LatticeSite& x) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), x, site_less);
  if (it == rows.end() || !(*it == x)) return -1;
  return int(it - rows.begin());
}

int LatticeOperator::col_index(const LatticeSite& x) const {
  const auto it = std::lower_bound(cols.begin(), cols.end(), x, site_less);
  if (it == cols.end() || !(*it == x)) return -1;
  return int(it - cols.begin());
}

std::uint64_t field_fingerprint(const SymmetricField& u) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (int j = 0; j < u.radius(); ++j)
    for (int k = 0; j + k < u.radius(); ++k) {
      mix(u.a(j, k));
      mix(u.b(j, k));
    }
  return h;
}

LatticeOperator assemble_hamiltonian(const SymmetricField& w, double r, double Omega,
                                     double omega, int L, const AssemblyOptions& opt) {
  SymmetricField u = r * kernel_field(omega, std::max(w.radius(), 3));
  u += w;

  std::vector<LatticeSite> sites = build_lattice(L);
  if (opt.exclude_kernel)
    std::erase(sites, LatticeSite{1, 1, -1});

  // multiplier field h(u); lookups reach index sums up to 2(L-1)
  const ExpansionGrid mult = nonlinearity_multiplier(u, 2 * (L - 1), opt.tail_tol);
  LatticeOperator H = assemble_block(mult, sites, Omega, omega, opt);
  H.state_hash = field_fingerprint(u);
  return H;
}

LatticeOperator assemble_block(const ExpansionGrid& mult, const std::vector<LatticeSite>& in_sites,
                               double Omega, double omega, const AssemblyOptions& opt) {
  std::vector<LatticeSite> sites = in_sites;
  std::sort(sites.begin(), sites.end(), site_less);

  const int n = int(sites.size());
  LatticeOperator H;
  H.rows = H.cols = sites;
  H.Omega = Omega;
  H.omega = omega;
  H.m = Eigen::MatrixXd::Zero(n, n);

  std::vector<Eigen::Vector2d> frames(n);
  std::vector<std::array<ExpEntry, 4>> entries(n);
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i) {
    frames[i] = frame_vector(sites[i], Omega, omega, opt);
    exp_entries(sites[i], frames[i], entries[i].data(), &counts[i]);
  }

  for (int i = 0; i < n; ++i) {
    // diagonal part
    const LatticeSite& x = sites[i];
    if (opt.exclude_kernel && x.j == 1 && x.k == 1) {
      H.m(i, i) = frames[i].dot(evolution_block(1, 1, Omega, omega) * frames[i]);
    } else {
      H.m(i, i) = lambda_site(x, Omega, omega);
    }
    // Toeplitz part: the derivative of -w g(u) along phi is -w h(u) conj(phi),
    // so T(x,y) = -w sum_{p in e_y, q in e_x} c_p c_q mult(p+q)
    for (int jcol = i; jcol < n; ++jcol) {
      double t = 0.0;
      for (int a = 0; a < counts[i]; ++a)
        for (int b = 0; b < counts[jcol]; ++b)
          t += entries[i][a].c * entries[jcol][b].c *
               mult.at(entries[i][a].j + entries[jcol][b].j,
                       entries[i][a].k + entries[jcol][b].k);
      t *= -omega;
      H.m(i, jcol) += t;
      if (jcol != i) H.m(jcol, i) += t;
    }
  }

  // structural symmetry check, then exact symmetrization
  const double asym = (H.m - H.m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, H.m.cwiseAbs().maxCoeff()))
    throw std::runtime_error("assemble_hamiltonian: symmetry defect");
  H.m = ((H.m + H.m.transpose()) / 2.0).eval();
  return H;
}

double operator_norm_sigma(const LatticeOperator& G, const NormParams& p) {
  const int nr = int(G.rows.size()), nc = int(G.cols.size());
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(nr), colsum = Eigen::VectorXd::Zero(nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) {
      const double v = std::abs(G.m(i, j));
      if (v == 0.0) continue;
      const double wgt = weight(G.rows[i], G.cols[j], p.sigma, p.s_weight);
      rowsum(i) += v * wgt;
      colsum(j) += v * wgt;
    }
  const double r = nr ? rowsum.maxCoeff() : 0.0;
  const double c = nc ? colsum.maxCoeff() : 0.0;
  return std::max(r, c);
}

LatticeOperator restrict_block(const LatticeOperator& G, const std::vector<LatticeSite>& A,
                               const std::vector<LatticeSite>& B) {
  LatticeOperator R;
  R.rows = A;
  R.cols = B;
  std::sort(R.rows.begin(), R.rows.end(), site_less);
  std::sort(R.cols.begin(), R.cols.end(), site_less);
  R.Omega = G.Omega;
  R.omega = G.omega;
  R.state_hash = G.state_hash;
  R.m.resize(R.rows.size(), R.cols.size());
  for (size_t i = 0; i < R.rows.size(); ++i) {
    const int gi = G.row_index(R.rows[i]);
    if (gi < 0) throw std::invalid_argument("restrict_block: unknown row site");
    for (size_t j = 0; j < R.cols.size(); ++j) {
      const int gj = G.col_index(R.cols[j]);
      if (gj < 0) throw std::invalid_argument("restrict_block: unknown column site");
      R.m(i, j) = G.m(gi, gj);
    }
  }
  return R;
}

LatticeOperator invert_block(const LatticeOperator& H_E, double d_floor) {
  if (H_E.rows.size() != H_E.cols.size())
    throw std::invalid_argument("invert_block: block not square");
  const int n = int(H_E.rows.size());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(H_E.m);
  // inverse iteration estimate of the smallest eigenvalue modulus
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double mu = 0.0;
  for (int it = 0; it < 25; ++it) {
    Eigen::VectorXd y = lu.solve(v);
    const double ny = y.norm();
    if (!std::isfinite(ny) || ny == 0.0) break;
    mu = 1.0 / ny;
    v = y / ny;
  }
  if (mu < d_floor) throw std::runtime_error("spectrum within d_floor");
  LatticeOperator G = H_E;
  G.m = lu.inverse();
  return G;
}

Decomposition build_decomposition(const std::vector<LatticeSite>& sites, int L_prev,
                                  double Omega, double omega, double d0, int ell) {
  Decomposition dec;
  dec.ell = ell;
  dec.L_prev = L_prev;
  for (const LatticeSite& x : sites) {
    if (x.j + x.k < L_prev) {
      dec.previous_ball.push_back(x);
      continue;
    }
    if (x.l == -1 && std::abs(lambda_site(x, Omega, omega)) <= d0)
      dec.clusters.push_back({x, {x}, 0});
    else
      dec.regular_annulus.push_back(x);
  }
  return dec;
}

PreconditionerResult assemble_preconditioner(const LatticeOperator& H, const Decomposition& dec,
                                             double d0, double d_prev, double d_n,
                                             const NormParams& p) {
  const int n = int(H.rows.size());
  PreconditionerResult res;
  res.Ln = H;
  res.Ln.m = Eigen::MatrixXd::Zero(n, n);

  auto near = [&](const std::vector<LatticeSite>& centers, const LatticeSite& x) {
    for (const LatticeSite& c : centers)
      if (site_distance(c, x) < dec.ell) return true;
    return false;
  };

  // regular part
  if (!dec.regular_annulus.empty()) {
    LatticeOperator GA = invert_block(restrict_block(H, dec.regular_annulus, dec.regular_annulus),
                                      d0 / 2.0);
    for (size_t i = 0; i < GA.rows.size(); ++i) {
      const int ri = H.row_index(GA.rows[i]);
      for (size_t j = 0; j < GA.cols.size(); ++j)
        res.Ln.m(ri, H.col_index(GA.cols[j])) = GA.m(i, j);
    }
  }

  // previous ball with a regular collar
  if (!dec.previous_ball.empty()) {
    std::vector<LatticeSite> CB = dec.previous_ball;
    for (const LatticeSite& x : dec.regular_annulus)
      if (near(dec.previous_ball, x)) CB.push_back(x);
    LatticeOperator GB = invert_block(restrict_block(H, CB, CB), d_prev);
    for (const LatticeSite& x : dec.previous_ball) {
      const int ri = H.row_index(x), bi = GB.row_index(x);
      for (size_t j = 0; j < GB.cols.size(); ++j)
        res.Ln.m(ri, H.col_index(GB.cols[j])) = GB.m(bi, j);
    }
  }

  // singular clusters with tubular neighborhoods
  for (const SiteCluster& cl : dec.clusters) {
    std::vector<LatticeSite> tube;
    for (const LatticeSite& x : H.rows)
      if (near(cl.sites, x)) tube.push_back(x);
    LatticeOperator GS = invert_block(restrict_block(H, tube, tube), d_n);
    for (const LatticeSite& x : cl.sites) {
      const int ri = H.row_index(x), si = GS.row_index(x);
      for (size_t j = 0; j < GS.cols.size(); ++j)
        res.Ln.m(ri, H.col_index(GS.cols[j])) = GS.m(si, j);
    }
  }

  res.Kn = H;
  res.Kn.m = res.Ln.m * H.m - Eigen::MatrixXd::Identity(n, n);
  res.Ln_norm = operator_norm_sigma(res.Ln, p);
  res.Kn_norm = operator_norm_sigma(res.Kn, p);

  auto rows_norm = [&](const std::vector<LatticeSite>& rows) {
    if (rows.empty()) return 0.0;
    return operator_norm_sigma(restrict_block(res.Kn, rows, res.Kn.cols), p);
  };
  res.Kn_regular = rows_norm(dec.regular_annulus);
  res.Kn_ball = rows_norm(dec.previous_ball);
  std::vector<LatticeSite> singular;
  for (const SiteCluster& cl : dec.clusters)
    singular.insert(singular.end(), cl.sites.begin(), cl.sites.end());
  res.Kn_clusters = rows_norm(singular);

  if (res.Kn_norm > 0.75) throw std::runtime_error("defect too large");

  LatticeOperator G = H;
  G.m = (Eigen::MatrixXd::Identity(n, n) + res.Kn.m).partialPivLu().solve(res.Ln.m);
  res.inverse = std::move(G);
  return res;
}

SmoothingReport smoothing_inequalities_check(const LatticeOperator& G,
                                             const std::vector<LatticeSite>& A,
                                             const std::vector<LatticeSite>& B, double sigma,
                                             double gamma, double ell, double s_weight) {
  SmoothingReport rep;
  NormParams lo{sigma - gamma, s_weight}, hi{sigma, s_weight};
  rep.c_gamma = (1.0 + std::exp(-gamma)) / (1.0 - std::exp(-gamma));

  rep.lhs_row = operator_norm_sigma(G, lo);
  double sup_row = 0.0;
  for (size_t i = 0; i < G.rows.size(); ++i) {
    double rowsum = 0.0;
    for (size_t j = 0; j < G.cols.size(); ++j)
      rowsum += std::abs(G.m(i, j)) * weight(G.rows[i], G.cols[j], hi.sigma, hi.s_weight);
    sup_row = std::max(sup_row, rowsum);
  }
  rep.rhs_row = rep.c_gamma * sup_row;
  rep.pass_row = rep.lhs_row <= rep.rhs_row * (1.0 + 1e-12);

  double dist = std::numeric_limits<double>::infinity();
  for (const LatticeSite& x : A)
    for (const LatticeSite& y : B) dist = std::min(dist, site_distance(x, y));
  if (dist < ell) throw std::invalid_argument("smoothing_inequalities_check: dist(A,B) < ell");
  rep.lhs_far = operator_norm_sigma(restrict_block(G, A, B), lo);
  rep.rhs_far = std::exp(-gamma * ell) * operator_norm_sigma(G, hi);
  rep.pass_far = rep.lhs_far <= rep.rhs_far * (1.0 + 1e-12);
  return rep;
}

Eigen::VectorXd site_coordinates(const SymmetricField& f, const std::vector<LatticeSite>& sites,
                                 double Omega, double omega, const AssemblyOptions& opt) {
  Eigen::VectorXd x(sites.size());
  for (size_t i = 0; i < sites.size(); ++i) {
    const LatticeSite& st = sites[i];
    if (st.j == 0) {
      x(i) = (st.k == 0) ? f.a(0, 0) : f.a(0, st.k) / std::sqrt(2.0);
      continue;
    }
    const double ck = (st.k == 0) ? std::sqrt(2.0) : 2.0;
    const Eigen::Vector2d v = frame_vector(st, Omega, omega, opt);
    x(i) = v.dot(Eigen::Vector2d(f.a(st.j, st.k), f.b(st.j, st.k))) / ck;
  }
  return x;
}

SymmetricField field_from_site_coordinates(const Eigen::VectorXd& x,
                                           const std::vector<LatticeSite>& sites, int radius,
                                           double Omega, double omega,
                                           const AssemblyOptions& opt) {
  SymmetricField f(radius);
  for (size_t i = 0; i < sites.size(); ++i) {
    const LatticeSite& st = sites[i];
    if (st.j + st.k >= radius) throw std::out_of_range("field_from_site_coordinates: radius");
    if (st.j == 0) {
      f.add(0, st.k, (st.k == 0) ? x(i) : x(i) * std::sqrt(2.0));
      continue;
    }
    const double ck = (st.k == 0) ? std::sqrt(2.0) : 2.0;
    const Eigen::Vector2d v = frame_vector(st, Omega, omega, opt);
    f.add(st.j, st.k, ck * x(i) * v(0), ck * x(i) * v(1));
  }
  return f;
}

double kernel_component(const SymmetricField& f, double omega) {
  // inner product with the gauged unit kernel mode; its trig pair is
  // (2a, -2a Omega0), so <f, e> = (pair . f-pair) / 4
  const SymmetricField u1 = kernel_field(omega, 3);
  return (u1.a(1, 1) * f.a(1, 1) + u1.b(1, 1) * f.b(1, 1)) / 4.0;
}

}  // namespace vfil
