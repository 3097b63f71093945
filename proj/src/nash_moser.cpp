#include "vfil/nash_moser.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace vfil {

void SolverSchedule::validate() const {
  if (L0 < 2) throw std::invalid_argument("schedule: L0 must be >= 2");
  if (n_max < 1) throw std::invalid_argument("schedule: n_max must be >= 1");
  if (beta <= 1.5) throw std::invalid_argument("schedule: beta must exceed 3/2");
  if (sigma0 <= 0.0) throw std::invalid_argument("schedule: sigma0 must be positive");
  if (s_weight <= 1.0) throw std::invalid_argument("schedule: s_weight must exceed 1");
  if (d0 <= 0.0) throw std::invalid_argument("schedule: d0 must be positive");
}

double ExcisionRecord::omega_z_at(double r) const {
  if (curve.empty()) return 0.0;
  if (r <= curve.front().first) return curve.front().second;
  if (r >= curve.back().first) return curve.back().second;
  for (size_t i = 1; i < curve.size(); ++i)
    if (r <= curve[i].first) {
      const auto [r0, O0] = curve[i - 1];
      const auto [r1, O1] = curve[i];
      const double t = (r - r0) / (r1 - r0);
      return O0 + t * (O1 - O0);
    }
  return curve.back().second;
}

bool ExcisionRecord::contains(double r, double Omega, bool doubled) const {
  const double w = doubled ? 2.0 * half_width : half_width;
  return std::abs(omega_z_at(r) - Omega) < w;
}

namespace {

std::vector<LatticeSite> range_sites(int L) {
  std::vector<LatticeSite> sites = build_lattice(L);
  std::erase(sites, LatticeSite{1, 1, -1});
  return sites;
}

// sigma-norm of the range projection of the residual at the given ball
double range_residual_norm(const SymmetricField& u, double Omega, double omega, int L,
                           const NormParams& p) {
  SymmetricField f = residual_field(u, Omega, omega, L);
  // remove the kernel component; the rest is the range equation residual
  const SymmetricField e1 = kernel_field(omega, 3);
  const double phi = kernel_component(f, omega);
  SymmetricField proj = e1;
  proj *= phi;
  f -= proj;
  return sigma_norm(f, p);
}

struct StageContext {
  std::vector<LatticeSite> sites;
  LatticeOperator H;
  Eigen::MatrixXd G;  // inverse used for the correction
  double K_norm = 0.0;
};

// Builds H and the (preconditioned or dense) inverse at the current state.
// Throws ExcisionHit on an (h3) violation at a singular cluster.
StageContext stage_operator(const SymmetricField& w, double r, double Omega, double omega,
                            int n, const SolverSchedule& sched) {
  StageContext ctx;
  const int Ln = sched.L(n);
  ctx.sites = range_sites(Ln);
  ctx.H = assemble_hamiltonian(w, r, Omega, omega, Ln);

  // (h2): classification throws "threshold too large" on separation failure
  classify_and_cluster(Omega, omega, Ln, sched.d0, {LatticeSite{1, 1, -1}}, sched.L0);

  if (sched.use_dense_inverse) {
    ctx.G = ctx.H.m.partialPivLu().inverse();
    return ctx;
  }

  const int L_prev = (n >= 1) ? sched.L(n - 1) : 0;
  Decomposition dec =
      build_decomposition(ctx.sites, L_prev, Omega, omega, sched.d0, sched.ell(n));

  // (h3): spectra of the cluster tubes must stay away from zero by d_n
  for (const SiteCluster& cl : dec.clusters) {
    std::vector<LatticeSite> tube;
    for (const LatticeSite& x : ctx.sites)
      if (site_distance(cl.center, x) < dec.ell) tube.push_back(x);
    const LatticeOperator Hc = restrict_block(ctx.H, tube, tube);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hc.m, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues().cwiseAbs().minCoeff();
    if (emin <= sched.d(n)) {
      // locate the band center Omega_z at this state before aborting
      const SymmetricField u = r * kernel_field(omega, Ln) + w;
      const ExpansionGrid mult = nonlinearity_multiplier(u, 2 * (Ln - 1));
      auto local_eig = [&](double Om) {
        const LatticeOperator blk = assemble_block(mult, tube, Om, omega, AssemblyOptions{});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(blk.m, Eigen::EigenvaluesOnly);
        int idx = 0;
        e2.eigenvalues().cwiseAbs().minCoeff(&idx);
        return e2.eigenvalues()(idx);
      };
      double Om = Omega;
      const double h = 1e-6;
      const double slope = (local_eig(Om + h) - local_eig(Om - h)) / (2.0 * h);
      for (int itn = 0; itn < 10 && std::abs(slope) > 1e-12; ++itn) {
        const double step = local_eig(Om) / slope;
        Om -= step;
        if (std::abs(step) < 1e-13) break;
      }
      ExcisionRecord rec;
      rec.j = cl.center.j;
      rec.k = cl.center.k;
      rec.stage = n;
      rec.half_width = sched.excision_width_C * sched.d(n) / sched.L(n);
      rec.slope_at_zero = slope;
      rec.curve = {{r, Om}};
      throw ExcisionHit("excised: cluster spectrum within d_n", std::move(rec));
    }
  }

  PreconditionerResult pre =
      assemble_preconditioner(ctx.H, dec, sched.d0, sched.d(std::max(n - 1, 0)), sched.d(n),
                              sched.norm(n));
  ctx.K_norm = pre.Kn_norm;
  ctx.G = pre.inverse->m;
  return ctx;
}

// One preconditioned Newton correction at stage n; updates w, records into
// diag, returns the achieved range residual.
double newton_correction(SymmetricField& w, SolveDiagnostics& diag, double r, double Omega,
                         double omega, int n, const SolverSchedule& sched) {
  const int Ln = sched.L(n);
  const NormParams p = sched.norm(n);
  if (w.radius() < Ln) w = truncate(w, Ln);
  StageContext ctx = stage_operator(w, r, Omega, omega, n, sched);
  diag.K_norms.push_back(ctx.K_norm);

  SymmetricField u = r * kernel_field(omega, Ln) + w;
  const double res = range_residual_norm(u, Omega, omega, Ln, p);
  const Eigen::VectorXd rhs =
      site_coordinates(residual_field(u, Omega, omega, Ln), ctx.sites, Omega, omega);
  const Eigen::VectorXd delta = ctx.G * rhs;
  double step = 1.0;
  for (int halve = 0; halve <= sched.halvings_max; ++halve) {
    SymmetricField trial =
        w - field_from_site_coordinates(step * delta, ctx.sites, Ln, Omega, omega);
    const double trial_res =
        range_residual_norm(r * kernel_field(omega, Ln) + trial, Omega, omega, Ln, p);
    if (trial_res < res || res <= sched.target_residual) {
      w = trial;
      diag.delta_norms.push_back(
          sigma_norm(field_from_site_coordinates(step * delta, ctx.sites, Ln, Omega, omega), p));
      diag.residual_norms.push_back(trial_res);
      return trial_res;
    }
    step /= 2.0;
  }
  throw NoContractionError("no contraction at stage " + std::to_string(n));
}

double fit_kappa(const std::vector<double>& deltas) {
  std::vector<double> xs;
  for (double d : deltas)
    if (d > 1e-300 && d < 1.0) xs.push_back(-std::log(d));
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  int cnt = 0;
  for (size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > 0 && xs[i - 1] > 0) {
      acc += std::log(xs[i] / xs[i - 1]);
      ++cnt;
    }
  return cnt ? std::exp(acc / cnt) : 0.0;
}

}  // namespace

SymmetricField initial_step(double r, double Omega, double omega, const SolverSchedule& sched) {
  sched.validate();
  const int L0 = sched.L(0);
  const std::vector<LatticeSite> sites = range_sites(L0);

  // solvability on the core ball: direct check of the mode multipliers
  double lam_min = std::numeric_limits<double>::infinity();
  for (const LatticeSite& x : sites)
    lam_min = std::min(lam_min, std::abs(lambda_site(x, Omega, omega)));
  if (lam_min <= sched.d(0) / 4.0)
    throw InitialWindowError("initial window violated: near-zero multiplier on the core ball");

  SymmetricField w(L0);
  const NormParams p = sched.norm(0);
  double res = range_residual_norm(r * kernel_field(omega, L0) + w, Omega, omega, L0, p);
  for (int it = 0; it < 30 && res > sched.initial_residual; ++it) {
    const LatticeOperator H = assemble_hamiltonian(w, r, Omega, omega, L0);
    SymmetricField u = r * kernel_field(omega, L0) + w;
    const Eigen::VectorXd rhs =
        site_coordinates(residual_field(u, Omega, omega, L0), sites, Omega, omega);
    const Eigen::VectorXd delta = H.m.partialPivLu().solve(rhs);
    double step = 1.0;
    bool accepted = false;
    for (int halve = 0; halve <= sched.halvings_max; ++halve) {
      SymmetricField trial = w - field_from_site_coordinates(step * delta, sites, L0, Omega, omega);
      const double trial_res =
          range_residual_norm(r * kernel_field(omega, L0) + trial, Omega, omega, L0, p);
      if (trial_res < res) {
        w = trial;
        res = trial_res;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) throw NoContractionError("Newton stall in the initial step");
  }
  if (res > sched.initial_residual)
    throw NoContractionError("initial step did not reach the target residual");
  return w;
}

std::pair<SymmetricField, SolveDiagnostics> iterate(double r, double Omega, double omega,
                                                    const SolverSchedule& sched,
                                                    const SymmetricField& w0) {
  sched.validate();
  SolveDiagnostics diag;
  SymmetricField w = w0;

  for (int n = 1; n <= sched.n_max; ++n) {
    newton_correction(w, diag, r, Omega, omega, n, sched);
    diag.stages = n;
  }

  // final-ball polish to the target residual
  double res = diag.residual_norms.empty() ? 1.0 : diag.residual_norms.back();
  for (int it = 0; it < sched.post_newton_max && res > sched.target_residual; ++it)
    res = newton_correction(w, diag, r, Omega, omega, sched.n_max, sched);

  diag.kappa_fit = fit_kappa(diag.delta_norms);
  diag.converged = res <= sched.target_residual;
  if (!diag.converged) throw NoContractionError("polish did not reach the target residual");
  return {w, diag};
}

std::pair<SymmetricField, double> refine(const SymmetricField& w0, double r, double Omega,
                                         double omega, const SolverSchedule& sched,
                                         int max_steps) {
  SolveDiagnostics diag;
  SymmetricField w = w0;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_steps && res > sched.target_residual; ++it)
    res = newton_correction(w, diag, r, Omega, omega, sched.n_max, sched);
  return {w, res};
}

std::pair<double, double> kernel_equation(const SymmetricField& w, double r, double Omega,
                                          double omega, int radius) {
  const SymmetricField u = r * kernel_field(omega, radius) + truncate(w, radius);
  const SymmetricField f = residual_field(u, Omega, omega, radius);
  const double phi = kernel_component(f, omega);
  // d/dOmega of the linear part is -i d_t, which maps the pair (A,B) of u at
  // (1,1) to (B,A)
  const SymmetricField e1 = kernel_field(omega, 3);
  const double dphi =
      (e1.a(1, 1) * u.b(1, 1) + e1.b(1, 1) * u.a(1, 1)) / 4.0;
  return {phi, dphi};
}

std::vector<ExcisionRecord> excision_neighborhoods(double omega, double r_max, int n,
                                                   const SolverSchedule& sched, int samples) {
  sched.validate();
  const double Omega0 = kernel_frequency(omega);
  const int Ln = sched.L(n);
  const SiteClassification cls =
      classify_and_cluster(Omega0, omega, Ln, sched.d0, {LatticeSite{1, 1, -1}}, sched.L0);

  const SymmetricField u2 = second_order_field(omega, 8);
  const AssemblyOptions opt;

  std::vector<ExcisionRecord> records;
  for (const SiteCluster& cl : cls.clusters) {
    if (cl.center.j + cl.center.k < sched.L(n - 1)) continue;  // previous ball
    ExcisionRecord rec;
    rec.j = cl.center.j;
    rec.k = cl.center.k;
    rec.stage = n;
    rec.half_width = sched.excision_width_C * sched.d(n) / sched.L(n);

    std::vector<LatticeSite> tube;
    for (const LatticeSite& x : range_sites(Ln))
      if (site_distance(cl.center, x) < sched.ell(n)) tube.push_back(x);

    for (int i = 0; i < samples; ++i) {
      const double r = r_max * i / double(samples - 1);
      SymmetricField u = r * kernel_field(omega, 8) + (r * r) * u2;
      const ExpansionGrid mult = nonlinearity_multiplier(u, 2 * (Ln - 1));

      auto local_eig = [&](double Om) {
        const LatticeOperator Hc = assemble_block(mult, tube, Om, omega, opt);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hc.m, Eigen::EigenvaluesOnly);
        int idx = 0;
        es.eigenvalues().cwiseAbs().minCoeff(&idx);
        return es.eigenvalues()(idx);
      };

      // Newton on the isolated eigenvalue; it is close to linear in Omega,
      // one measured slope serves the whole iteration
      double Om = resonance_frequency(cl.center.j, cl.center.k, omega);
      const double h = 1e-6;
      const double slope = (local_eig(Om + h) - local_eig(Om - h)) / (2.0 * h);
      if (i == 0) rec.slope_at_zero = slope;
      for (int itn = 0; itn < 10 && std::abs(slope) > 1e-12; ++itn) {
        const double step = local_eig(Om) / slope;
        Om -= step;
        if (std::abs(step) < 1e-13) break;
      }
      rec.curve.push_back({r, Om});
    }
    records.push_back(std::move(rec));
  }
  return records;
}

MeasureReport cantor_measure(double r0, const SolverSchedule& sched, double Omega0, double Omega2,
                             const std::vector<ExcisionRecord>& excisions, int sweep_points) {
  if (std::abs(Omega2) < 1e-12)
    throw std::invalid_argument("degenerate branch: Omega2 vanishes within tolerance");
  MeasureReport rep;
  double series = 0.0;
  for (int n = 1; n <= 200; ++n) {
    const double Ln = sched.L0 * std::pow(2.0, n);
    const double term = std::pow(Ln, 1.5 - sched.beta);
    series += term;
    if (term < 1e-16 * series) break;
  }
  rep.C_beta = sched.excision_width_C / std::sqrt(std::abs(Omega2)) * series;
  rep.lower_bound = r0 * (1.0 - r0 * rep.C_beta);

  int good = 0;
  for (int i = 0; i < sweep_points; ++i) {
    const double r = r0 * (i + 0.5) / sweep_points;
    const double Om = Omega0 + Omega2 * r * r;
    bool excluded = false;
    for (const ExcisionRecord& rec : excisions)
      if (rec.contains(r, Om, /*doubled=*/true)) {
        excluded = true;
        break;
      }
    if (!excluded) ++good;
  }
  rep.empirical_good = r0 * good / double(sweep_points);
  rep.excluded_fraction = 1.0 - double(good) / sweep_points;
  return rep;
}

}  // namespace vfil
