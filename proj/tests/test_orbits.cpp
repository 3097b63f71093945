#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vfil/orbits.hpp"

using namespace vfil;

TEST_CASE("effective potential and equilibria") {
  const RadialOrbitParams p{1.0, 0.2, 0.0};
  const Equilibria eq = equilibria(p.c, p.omega);
  REQUIRE(eq.rho_plus.has_value());
  REQUIRE(eq.rho_minus.has_value());
  CHECK(*eq.rho_plus == doctest::Approx(0.85065).epsilon(1e-4));
  CHECK(*eq.rho_minus == doctest::Approx(0.52573).epsilon(1e-4));
  // critical points of V to 1e-12
  CHECK(std::abs(effective_potential(*eq.rho_plus, p).second) <= 1e-12);
  CHECK(std::abs(effective_potential(*eq.rho_minus, p).second) <= 1e-12);

  // the helix identity omega = -c^2 rho^4 + rho^2 at both equilibria
  for (double rho : {*eq.rho_plus, *eq.rho_minus})
    CHECK(p.omega ==
          doctest::Approx(-p.c * p.c * std::pow(rho, 4) + rho * rho).epsilon(1e-14));

  // c = 0: unique equilibrium at omega^{-1/2}
  const Equilibria e0 = equilibria(0.0, 4.0);
  REQUIRE(e0.r_unique.has_value());
  CHECK(*e0.r_unique == doctest::Approx(0.5).epsilon(1e-15));

  // discriminant boundary: double root at rho^2 = 1/(2c^2)
  const Equilibria eb = equilibria(1.0, 0.25);
  CHECK(*eb.rho_plus == doctest::Approx(*eb.rho_minus).epsilon(1e-7));
  CHECK(*eb.rho_plus == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));

  CHECK_THROWS_WITH_AS(equilibria(1.0, 0.3), doctest::Contains("no equilibria"),
                       std::runtime_error);

  // rho -> 0+: the -w/rho^2 term dominates, V -> -inf
  CHECK(effective_potential(1e-6, p).first < -1e10);
}

TEST_CASE("radial quadrature") {
  const RadialOrbitParams p{1.0, 0.2, 0.0};
  const double rp = *equilibria(p.c, p.omega).rho_plus;

  // starting at the equilibrium stays there
  const RadialOrbit still = integrate_radial(p, rp, 0.0, 10.0, 1e-3);
  CHECK(std::abs(still.rho_max - rp) < 1e-12);
  CHECK(std::abs(still.rho_min - rp) < 1e-12);

  // small oscillation: the radial period matches the harmonic estimate
  // 2 pi sqrt(2 c^2 / V''(rho_+)) within 5%
  const double amp = 1e-3;
  const double h = 1e-5;
  const double Vpp = (effective_potential(rp + h, p).second -
                      effective_potential(rp - h, p).second) /
                     (2.0 * h);
  const double T_est = 2.0 * M_PI * std::sqrt(2.0 * p.c * p.c / Vpp);
  const RadialOrbit osc = integrate_radial(p, rp + amp, 0.0, 3.0 * T_est, 1e-4, 1);
  // measure the period from successive maxima of rho
  std::vector<double> maxima;
  for (size_t i = 1; i + 1 < osc.rho.size(); ++i)
    if (osc.rho[i] > osc.rho[i - 1] && osc.rho[i] > osc.rho[i + 1])
      maxima.push_back(osc.theta[i]);
  REQUIRE(maxima.size() >= 2);
  const double T_meas = maxima[1] - maxima[0];
  CHECK(T_meas == doctest::Approx(T_est).epsilon(0.05));

  // quadrature invariant over one hundred radial periods
  const RadialOrbit lng = integrate_radial(p, rp + amp, 0.0, 100.0 * T_est, 5e-4);
  CHECK(lng.energy_drift <= 1e-10);
  CHECK(!lng.escaped);
}

TEST_CASE("collapse toward the axis is reported") {
  // below the inner equilibrium the potential falls off toward rho = 0 and
  // the orbit leaves the bounded well
  const RadialOrbitParams p{1.0, 0.2, 0.0};
  const double rm = *equilibria(p.c, p.omega).rho_minus;
  const RadialOrbit fall = integrate_radial(p, 0.8 * rm, -0.5, 50.0, 1e-4);
  CHECK(fall.escaped);
}

TEST_CASE("helix frequencies and transforms") {
  const HelixDescriptor h = helix_and_galilei(1.0, 0.5, 0.0);
  CHECK(h.omega == doctest::Approx(0.75).epsilon(1e-15));

  // alpha = -sigma lands on the straight branch with omega' = a^{-2}
  const HelixDescriptor b = helix_and_galilei(2.0, 0.7, -0.7);
  CHECK(b.sigma_boosted == doctest::Approx(0.0));
  CHECK(b.omega_boosted == doctest::Approx(1.0 / 4.0).epsilon(1e-14));

  // scaling arithmetic: P -> 2 pi
  const ScalingDescriptor sd = rescale_to_standard_period(4.0 * M_PI, 1.0, 0.3);
  CHECK(sd.tau == doctest::Approx(2.0));
  CHECK(sd.amplitude == doctest::Approx(0.5));
  CHECK(sd.omega == doctest::Approx(1.2));
}

TEST_CASE("traveling branch") {
  const double om = std::sqrt(2.0);
  const int k = 1;
  CHECK(traveling_bifurcation_frequency(om, 1) ==
        doctest::Approx(std::sqrt(1.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(traveling_bifurcation_frequency(om, 1) == doctest::Approx(1.95664).epsilon(1e-5));
  CHECK(traveling_bifurcation_frequency(1.0, 2) == doctest::Approx(2.0 * std::sqrt(6.0)));

  std::vector<double> amps = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  const TravelingBranch branch = traveling_branch(om, k, amps, 12);
  REQUIRE(branch.points.size() == amps.size());
  CHECK(!branch.truncated);

  // amplitude 0: v = 1 at the bifurcation frequency
  CHECK(branch.points[0].Omega == doctest::Approx(traveling_bifurcation_frequency(om, k)));
  CHECK(branch.points[0].field.coef(0) == 1.0);

  for (size_t i = 1; i < branch.points.size(); ++i) {
    const TravelingPoint& pt = branch.points[i];
    CHECK(pt.residual <= 1e-12);
    CHECK(pt.field.coef(1) == doctest::Approx(pt.amplitude));
    // coefficients are stored real; the represented function satisfies
    // v(t,s) = conj(v)(-t,-s) by construction
    // frequency correction is quadratic in the amplitude
  }
  const double dOm1 = std::abs(branch.points[1].Omega - branch.points[0].Omega);
  const double dOm5 = std::abs(branch.points[5].Omega - branch.points[0].Omega);
  CHECK(dOm5 / dOm1 == doctest::Approx(25.0).epsilon(0.2));
}
