#ifndef VFIL_BIFURCATION_HPP
#define VFIL_BIFURCATION_HPP

#include <vector>

#include "vfil/nash_moser.hpp"

namespace vfil {

// Second-order coefficients of the reduced bifurcation equation, assembled in
// the conjugate-pair orientation (blocks of block_matrix, kernel gauge with
// 2ab > 0). In that bookkeeping the curvature evaluates to the classical
// closed form omega2_closed_form; the solved branch of the evolution problem
// carries the opposite-orientation value branch_curvature_closed_form. Both
// are exposed; see tests/acceptance for the cross-checks.
struct PerturbationCoefficients {
  double omega = 0.0;
  double Omega0 = 0.0;
  double a = 0.0, b = 0.0;        // kernel pair components, a,b > 0
  double aP = 0.0, bP = 0.0;      // second-harmonic pair (a_+, b_+)
  double aM = 0.0, bM = 0.0;      // (a_-, b_-)
  double Q = 0.0;                 // sqrt(w^2 + 8w + 4)
  SymmetricField u1, u2;
  double Omega1 = 0.0;
  double Omega2 = 0.0;
  // assembled inner products
  double ip_idt_u1_u1 = 0.0;      // <i d_t u1, u1> = -2ab
  double ip_u1bar2_u1 = 0.0;      // <conj(u1)^2, u1> = 0
  double ip_u1bar3_u1 = 0.0;      // <conj(u1)^3, u1> = (9/4)(a^2-b^2)^2
  double ip_Linv = 0.0;           // <L^{-1} u1^2, u1^2>
  double ip_Linv_first = 0.0;     // (a^2-b^2)^2 (1/l_{0,0} + 1/(2 l_{0,2}))
  double ip_Linv_P = 0.0;         // remainder polynomial P
};

// (1/6) w^2 (4w^3 + 29w^2 + 33w - 6) / ((w+1)(w+2) sqrt(2w+1)).
double omega2_closed_form(double omega);

// Curvature of the solved standing-wave branch of the evolution problem:
// -w^2 (w + 14) / (6 (w+1)(w+2) sqrt(2w+1)).
double branch_curvature_closed_form(double omega);

// Unique positive root of 4w^3 + 29w^2 + 33w - 6 (bracketing + Newton).
double exceptional_omega0();
double omega2_cubic(double omega);

// Assembles the second-order reduction by exact Fourier algebra on a lattice
// of radius L; Omega2 must agree with omega2_closed_form to 1e-10.
PerturbationCoefficients perturbation_series(double omega, int L = 8);

struct BranchPoint {
  double r = 0.0;
  double Omega = 0.0;
  SymmetricField w;
  double residual = 0.0;
  bool excised = false;
  ExcisionRecord excision;   // meaningful when excised
  SolveDiagnostics diagnostics;
};

// For each amplitude in r_grid, alternates the scalar kernel equation in
// Omega with range solves until the joint residual is at most the schedule
// target. Points landing in an excision band are flagged and carry no w.
std::vector<BranchPoint> solve_branch(double omega, const std::vector<double>& r_grid,
                                      const SolverSchedule& sched);

// Least-squares fit of (Omega(r) - Omega0)/r^2 against constant + linear in
// r over non-excised points; returns the constant. Requires >= 4 points.
double fit_curvature(const std::vector<BranchPoint>& branch, double Omega0,
                     double r_cut = 0.05);

}  // namespace vfil

#endif
