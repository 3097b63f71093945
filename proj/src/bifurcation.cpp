#include "vfil/bifurcation.hpp"

#include <cmath>
#include <stdexcept>

namespace vfil {

double omega2_cubic(double omega) {
  return ((4.0 * omega + 29.0) * omega + 33.0) * omega - 6.0;
}

double omega2_closed_form(double omega) {
  return (1.0 / 6.0) * omega * omega /
         ((omega + 1.0) * (omega + 2.0) * std::sqrt(2.0 * omega + 1.0)) * omega2_cubic(omega);
}

double branch_curvature_closed_form(double omega) {
  return -omega * omega * (omega + 14.0) /
         (6.0 * (omega + 1.0) * (omega + 2.0) * std::sqrt(2.0 * omega + 1.0));
}

double exceptional_omega0() {
  double lo = 0.1, hi = 0.2;
  for (int i = 0; i < 40; ++i) {
    const double mid = (lo + hi) / 2.0;
    (omega2_cubic(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = (lo + hi) / 2.0;
  for (int i = 0; i < 8; ++i) {
    const double d = (12.0 * x + 58.0) * x + 33.0;
    x -= omega2_cubic(x) / d;
  }
  return x;
}

namespace {

// L^{-1} in the conjugate-pair orientation (blocks of block_matrix at
// Omega0); rhs must avoid the kernel pair.
SymmetricField series_linear_solve(const SymmetricField& rhs, double Omega0, double omega) {
  SymmetricField out(rhs.radius());
  for (int j = 0; j < rhs.radius(); ++j)
    for (int k = 0; j + k < rhs.radius(); ++k) {
      const double A = rhs.a(j, k), B = rhs.b(j, k);
      if (A == 0.0 && B == 0.0) continue;
      if (j == 0) {
        out.set(0, k, A / (double(k) * k + 2.0 * omega));
        continue;
      }
      if (j == 1 && k == 1) throw std::runtime_error("series_linear_solve: kernel pair in rhs");
      const Eigen::Vector2d q = block_matrix(j, k, Omega0, omega).inverse() * Eigen::Vector2d(A, B);
      out.set(j, k, q(0), q(1));
    }
  return out;
}

// i d_t on a stored pair: (A, B) -> (-B, -A)
SymmetricField apply_i_dt(const SymmetricField& u) {
  SymmetricField out(u.radius());
  for (int j = 1; j < u.radius(); ++j)
    for (int k = 0; j + k < u.radius(); ++k) out.set(j, k, -u.b(j, k), -u.a(j, k));
  return out;
}

}  // namespace

PerturbationCoefficients perturbation_series(double omega, int L) {
  if (L < 5)
    throw std::invalid_argument("resonance clash: truncation excludes the second harmonics");
  PerturbationCoefficients pc;
  pc.omega = omega;
  pc.Omega0 = std::sqrt(1.0 + 2.0 * omega);
  pc.a = 1.0 / (std::sqrt(2.0) * std::sqrt(1.0 + omega));
  pc.b = pc.a * pc.Omega0;
  pc.Q = std::sqrt(omega * omega + 8.0 * omega + 4.0);
  const Eigen::Vector2d vp = eigenpair({2, 0, +1}, pc.Omega0, omega).vector;
  const Eigen::Vector2d vm = eigenpair({2, 0, -1}, pc.Omega0, omega).vector;
  pc.aP = vp(0);
  pc.bP = vp(1);
  pc.aM = vm(0);
  pc.bM = vm(1);

  pc.u1 = SymmetricField(L);
  pc.u1.set(1, 1, 2.0 * pc.a, 2.0 * pc.b);

  const SymmetricField u1sq = multiply(pc.u1, pc.u1, /*exact=*/true);
  const SymmetricField u1c = conj(pc.u1);
  const SymmetricField u1c2 = multiply(u1c, u1c, /*exact=*/true);
  const SymmetricField u1c3 = multiply(u1c2, u1c, /*exact=*/true);

  pc.ip_idt_u1_u1 = inner_product(apply_i_dt(pc.u1), pc.u1);
  pc.ip_u1bar2_u1 = inner_product(u1c2, pc.u1);
  pc.ip_u1bar3_u1 = inner_product(u1c3, pc.u1);

  const SymmetricField y = series_linear_solve(u1sq, pc.Omega0, omega);
  pc.ip_Linv = inner_product(y, u1sq);
  const double alpha2 = std::pow(pc.a * pc.a - pc.b * pc.b, 2);
  pc.ip_Linv_first = alpha2 * (1.0 / (2.0 * omega) + 0.5 / (2.0 * omega + 4.0));
  pc.ip_Linv_P = pc.ip_Linv - pc.ip_Linv_first;

  pc.u2 = conj(-omega * y);
  pc.Omega1 = 0.0;
  pc.Omega2 =
      omega / (2.0 * pc.a * pc.b) * (pc.ip_u1bar3_u1 + 2.0 * omega * pc.ip_Linv);
  return pc;
}

std::vector<BranchPoint> solve_branch(double omega, const std::vector<double>& r_grid,
                                      const SolverSchedule& sched) {
  sched.validate();
  const double Omega0 = kernel_frequency(omega);
  const double curvature = branch_curvature_closed_form(omega);
  const int Lmax = sched.L(sched.n_max);
  const NormParams p = sched.norm(sched.n_max);

  std::vector<BranchPoint> branch;
  for (double r : r_grid) {
    BranchPoint pt;
    pt.r = r;
    if (r == 0.0) {
      pt.Omega = Omega0;
      pt.w = SymmetricField(sched.L(0));
      branch.push_back(std::move(pt));
      continue;
    }
    double Omega = Omega0 + curvature * r * r;
    try {
      SymmetricField w = initial_step(r, Omega, omega, sched);
      auto [ws, diag] = iterate(r, Omega, omega, sched, w);
      w = ws;
      pt.diagnostics = diag;
      double total = std::numeric_limits<double>::infinity();
      for (int outer = 0; outer < 10; ++outer) {
        const SymmetricField u = r * kernel_field(omega, Lmax) + w;
        total = sigma_norm(residual_field(u, Omega, omega, Lmax), p);
        if (total <= sched.target_residual) break;
        const auto [phi, dphi] = kernel_equation(w, r, Omega, omega, Lmax);
        if (std::abs(dphi) < 1e-14) throw NoContractionError("degenerate kernel equation");
        Omega -= phi / dphi;
        auto [wr, res] = refine(w, r, Omega, omega, sched, 4);
        w = wr;
      }
      if (total > sched.target_residual)
        throw NoContractionError("branch point did not reach the joint residual target");
      pt.Omega = Omega;
      pt.w = w;
      pt.residual = total;
    } catch (const ExcisionHit& hit) {
      pt.Omega = Omega;
      pt.excised = true;
      pt.excision = hit.record;
    }
    branch.push_back(std::move(pt));
  }
  return branch;
}

double fit_curvature(const std::vector<BranchPoint>& branch, double Omega0, double r_cut) {
  std::vector<double> rs, ys;
  for (const BranchPoint& pt : branch)
    if (!pt.excised && pt.r > 0.0 && pt.r <= r_cut) {
      rs.push_back(pt.r);
      ys.push_back((pt.Omega - Omega0) / (pt.r * pt.r));
    }
  if (rs.size() < 4) throw std::invalid_argument("fit_curvature: insufficient points");
  Eigen::MatrixXd A(rs.size(), 2);
  Eigen::VectorXd b(rs.size());
  for (size_t i = 0; i < rs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = rs[i];
    b(i) = ys[i];
  }
  const Eigen::Vector2d c = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  return c(0);
}

}  // namespace vfil
