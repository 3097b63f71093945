// Batch front end for the standing-wave workbench: spectra, branch solves,
// excision scans, filament simulations and the appendix computations, all
// emitting machine-readable CSV/JSON plus a manifest.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

#include "vfil/io.hpp"

namespace {

constexpr int EXIT_OK = 0;
constexpr int EXIT_EXCISED = 2;
constexpr int EXIT_NO_CONTRACTION = 3;
constexpr int EXIT_CONFIG = 4;

using namespace vfil;

std::string outdir_root(const RunConfig& cfg) {
  if (const char* env = std::getenv("VFIL_OUT")) return std::string(env) + "/" + cfg.outdir;
  return cfg.outdir;
}

double spectrum_frequency(const RunConfig& cfg) {
  return (cfg.Omega > 0.0) ? cfg.Omega : kernel_frequency(cfg.omega);
}

std::vector<double> amplitude_grid(const RunConfig& cfg) {
  if (!cfg.r_grid.empty()) return cfg.r_grid;
  std::vector<double> rs;
  for (int i = 1; i <= cfg.r_points; ++i) rs.push_back(cfg.r0 * i / cfg.r_points);
  return rs;
}

int cmd_spectrum(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  const double Om = spectrum_frequency(cfg);
  write_text(out + "/spectrum.csv", spectrum_csv(Om, cfg.omega, cfg.L));
  write_manifest(out, "spectrum", cfg, {"spectrum.csv"});
  return EXIT_OK;
}

int cmd_classify(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  const double Om = spectrum_frequency(cfg);
  const SiteClassification cls =
      classify_and_cluster(Om, cfg.omega, cfg.L, cfg.schedule.d0, {}, cfg.schedule.L0);
  write_text(out + "/classification.json", classification_to_json(cls).dump(2) + "\n");
  write_manifest(out, "classify", cfg, {"classification.json"});
  return EXIT_OK;
}

int cmd_omega2(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  const PerturbationCoefficients pc = perturbation_series(cfg.omega, 8);
  json j = coefficients_to_json(pc);
  j["Omega2_closed_form"] = omega2_closed_form(cfg.omega);
  j["Omega2_series_minus_closed_form"] = pc.Omega2 - omega2_closed_form(cfg.omega);
  j["branch_curvature_closed_form"] = branch_curvature_closed_form(cfg.omega);
  j["exceptional_omega0"] = exceptional_omega0();
  write_text(out + "/omega2.json", j.dump(2) + "\n");
  std::cout << "omega " << cfg.omega << ": series " << pc.Omega2 << ", closed form "
            << omega2_closed_form(cfg.omega) << ", branch curvature "
            << branch_curvature_closed_form(cfg.omega) << "\n";
  write_manifest(out, "omega2", cfg, {"omega2.json"});
  return EXIT_OK;
}

int cmd_branch(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  const std::vector<double> rs = amplitude_grid(cfg);
  std::vector<BranchPoint> branch;
  try {
    branch = solve_branch(cfg.omega, rs, cfg.schedule);
  } catch (const NoContractionError& e) {
    std::cerr << e.what() << "\n";
    return EXIT_NO_CONTRACTION;
  }
  const NormParams p = cfg.schedule.norm(cfg.schedule.n_max);
  write_text(out + "/branch.csv", branch_csv(branch, p));

  // per-point solve transcripts
  json transcripts = json::array();
  for (const BranchPoint& pt : branch) {
    json t;
    t["r"] = pt.r;
    t["Omega"] = pt.Omega;
    t["excised"] = pt.excised;
    t["diagnostics"] = diagnostics_to_json(pt.diagnostics);
    transcripts.push_back(t);
  }
  write_text(out + "/transcripts.json",
             json{{"schedule", schedule_to_json(cfg.schedule)}, {"points", transcripts}}.dump(2) +
                 "\n");

  json summary;
  summary["Omega0"] = kernel_frequency(cfg.omega);
  int excised = 0;
  std::vector<ExcisionRecord> recs;
  for (const BranchPoint& pt : branch)
    if (pt.excised) {
      ++excised;
      recs.push_back(pt.excision);
    }
  summary["excised_points"] = excised;
  summary["excisions"] = excisions_to_json(recs);
  try {
    const double fit = fit_curvature(branch, kernel_frequency(cfg.omega), cfg.r0);
    summary["fitted_curvature"] = fit;
    summary["branch_curvature_closed_form"] = branch_curvature_closed_form(cfg.omega);
    summary["omega2_closed_form"] = omega2_closed_form(cfg.omega);
    const auto bands = excision_neighborhoods(cfg.omega, cfg.r0, cfg.schedule.n_max, cfg.schedule);
    const MeasureReport mr =
        cantor_measure(cfg.r0, cfg.schedule, kernel_frequency(cfg.omega), fit, bands);
    summary["cantor"] = {{"C_beta", mr.C_beta},
                         {"lower_bound", mr.lower_bound},
                         {"empirical_good", mr.empirical_good},
                         {"excluded_fraction", mr.excluded_fraction}};
  } catch (const std::exception& e) {
    summary["fit_error"] = e.what();
  }
  write_text(out + "/branch_summary.json", summary.dump(2) + "\n");
  write_manifest(out, "branch", cfg,
                 {"branch.csv", "transcripts.json", "branch_summary.json"});
  return excised > 0 ? EXIT_EXCISED : EXIT_OK;
}

int cmd_excisions(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  std::vector<ExcisionRecord> all;
  for (int n = 1; n <= cfg.schedule.n_max; ++n) {
    const auto recs = excision_neighborhoods(cfg.omega, cfg.r0, n, cfg.schedule);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  write_text(out + "/excisions.json", excisions_to_json(all).dump(2) + "\n");
  write_manifest(out, "excisions", cfg, {"excisions.json"});
  return EXIT_OK;
}

int cmd_simulate(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  json report;
  IntegrationOptions opt;
  opt.dt = cfg.dt;

  std::string traj;
  traj.reserve(1 << 20);
  traj += "t,filament,s,re,im\n";
  auto record = [&](const FilamentEnsemble& e) {
    const int G = 64;
    for (int f = 0; f < e.n; ++f) {
      const Eigen::VectorXcd g = e.grid_values(f, G);
      for (int i = 0; i < G; ++i) {
        const double s = 2.0 * M_PI * i / G;
        traj += std::to_string(e.time) + "," + std::to_string(f) + "," + std::to_string(s) +
                "," + std::to_string(g(i).real()) + "," + std::to_string(g(i).imag()) + "\n";
      }
    }
  };

  if (cfg.scenario == "two-filament-standing") {
    const CentralConfiguration cc = central_configuration(2, ConfigShape::Polygon, 1.0);
    const auto branch = solve_branch(cc.omega, {cfg.scenario_r}, cfg.schedule);
    if (branch.front().excised) {
      std::cerr << "scenario amplitude falls in an excision band\n";
      return EXIT_EXCISED;
    }
    const SymmetricField u =
        cfg.scenario_r * kernel_field(cc.omega, cfg.schedule.L(cfg.schedule.n_max)) +
        branch.front().w;
    auto [e0, wave] = reconstruct(cc, u, branch.front().Omega, cfg.modes);
    const double T = cfg.periods * 2.0 * M_PI / branch.front().Omega;
    opt.frame_stride = std::max(1, int(T / cfg.dt / 32));
    opt.frame_callback = record;
    record(e0);
    const IntegrationResult res = integrate(e0, T, opt);
    double defect = 0.0;
    const int G = 128;
    for (int f = 0; f < e0.n; ++f) {
      const Eigen::VectorXcd g1 = res.state.grid_values(f, G);
      const Eigen::VectorXcd g0 = e0.grid_values(f, G);
      for (int i = 0; i < G; ++i)
        defect =
            std::max(defect, std::abs(std::polar(1.0, -cc.omega * T) * g1(i) - g0(i)));
    }
    report["periodicity_defect"] = defect;
    report["energy_drift"] = res.energy_drift;
    report["center_drift"] = res.center_drift;
    report["Omega"] = branch.front().Omega;
    std::cout << "periodicity defect " << defect << "\n";
  } else if (cfg.scenario == "polygon-rotation") {
    const CentralConfiguration cc =
        central_configuration(std::max(cfg.k, 2), ConfigShape::Polygon, 1.0);
    auto [e0, wave] = reconstruct(cc, SymmetricField(2), kernel_frequency(cc.omega), cfg.modes);
    const double T = cfg.periods * 2.0 * M_PI / cc.omega;
    const IntegrationResult res = integrate(e0, T, opt);
    double dev = 0.0;
    const int G = 64;
    for (int f = 0; f < e0.n; ++f) {
      const Eigen::VectorXcd g1 = res.state.grid_values(f, G);
      for (int i = 0; i < G; ++i)
        dev = std::max(dev, std::abs(g1(i) - wave.value(f, T, 2.0 * M_PI * i / G)));
    }
    report["rotation_deviation"] = dev;
    report["energy_drift"] = res.energy_drift;
    std::cout << "rotation deviation " << dev << "\n";
  } else if (cfg.scenario == "helix") {
    const CentralConfiguration cc = central_configuration(2, ConfigShape::Polygon, 1.0);
    const double sig = cfg.k;
    std::vector<std::function<cplx(double)>> profiles;
    for (int f = 0; f < 2; ++f)
      profiles.push_back([&, f](double s) { return cc.points(f) * std::polar(1.0, sig * s); });
    FilamentEnsemble e0 = FilamentEnsemble::from_profiles(profiles, cfg.modes);
    e0.anchors = cc.points;
    const double om_h = -sig * sig + cc.omega;
    const double T = cfg.periods * 2.0 * M_PI / std::abs(om_h);
    const IntegrationResult res = integrate(e0, T, opt);
    double dev = 0.0;
    const int G = 64;
    for (int f = 0; f < 2; ++f) {
      const Eigen::VectorXcd g1 = res.state.grid_values(f, G);
      for (int i = 0; i < G; ++i) {
        const double s = 2.0 * M_PI * i / G;
        dev = std::max(dev,
                       std::abs(g1(i) - cc.points(f) * std::polar(1.0, om_h * T + sig * s)));
      }
    }
    report["helix_deviation"] = dev;
    report["energy_drift"] = res.energy_drift;
    std::cout << "helix deviation " << dev << "\n";
  } else {
    std::cerr << "unknown scenario: " << cfg.scenario << "\n";
    return EXIT_CONFIG;
  }
  write_text(out + "/trajectory.csv", traj);
  write_text(out + "/simulate.json", report.dump(2) + "\n");
  write_manifest(out, "simulate", cfg, {"trajectory.csv", "simulate.json"});
  return EXIT_OK;
}

int cmd_orbits(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  RadialOrbitParams p{cfg.c, cfg.omega, 0.0};
  const Equilibria eq = equilibria(cfg.c, cfg.omega);
  json report;
  if (eq.rho_plus) report["rho_plus"] = *eq.rho_plus;
  if (eq.rho_minus) report["rho_minus"] = *eq.rho_minus;
  if (eq.r_unique) report["r_unique"] = *eq.r_unique;
  std::vector<std::string> artifacts = {"orbits.json"};
  if (eq.rho_plus) {
    const double rho0 = (cfg.orbit_rho > 0.0) ? cfg.orbit_rho : *eq.rho_plus * 1.01;
    const RadialOrbit orbit = integrate_radial(p, rho0, cfg.orbit_drho, cfg.theta_span, cfg.dtheta);
    report["energy_drift"] = orbit.energy_drift;
    report["rho_min"] = orbit.rho_min;
    report["rho_max"] = orbit.rho_max;
    report["escaped"] = orbit.escaped;
    write_text(out + "/orbit.csv", orbit_csv(orbit));
    artifacts.push_back("orbit.csv");
  }
  write_text(out + "/orbits.json", report.dump(2) + "\n");
  write_manifest(out, "orbits", cfg, artifacts);
  return EXIT_OK;
}

int cmd_traveling(const RunConfig& cfg) {
  const std::string out = outdir_root(cfg);
  std::vector<double> amps;
  for (int i = 0; i <= cfg.amp_points; ++i) amps.push_back(cfg.amp_max * i / cfg.amp_points);
  const TravelingBranch branch = traveling_branch(cfg.omega, cfg.k, amps, cfg.L);
  write_text(out + "/traveling.csv", traveling_csv(branch));
  json j;
  j["Omega0"] = traveling_bifurcation_frequency(cfg.omega, cfg.k);
  j["points"] = int(branch.points.size());
  j["truncated"] = branch.truncated;
  write_text(out + "/traveling.json", j.dump(2) + "\n");
  write_manifest(out, "traveling", cfg, {"traveling.csv", "traveling.json"});
  return EXIT_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"standing waves in near-parallel vortex filaments: spectral workbench"};
  app.require_subcommand(1);

  std::string config_path;

  // staging area for flags; only flags the user actually passed overlay the
  // config file
  RunConfig flags;
  std::map<std::string, CLI::Option*> opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    opts["omega:" + sub->get_name()] = sub->add_option("--omega", flags.omega);
    opts["Omega:" + sub->get_name()] = sub->add_option("--Omega", flags.Omega);
    opts["L:" + sub->get_name()] = sub->add_option("--L", flags.L);
    opts["outdir:" + sub->get_name()] = sub->add_option("--outdir", flags.outdir);
    opts["d0:" + sub->get_name()] = sub->add_option("--d0", flags.schedule.d0);
    opts["L0:" + sub->get_name()] = sub->add_option("--L0", flags.schedule.L0);
    opts["nmax:" + sub->get_name()] = sub->add_option("--nmax", flags.schedule.n_max);
    opts["rmax:" + sub->get_name()] = sub->add_option("--rmax", flags.r0);
    opts["rpoints:" + sub->get_name()] = sub->add_option("--rpoints", flags.r_points);
    opts["r:" + sub->get_name()] = sub->add_option("--r", flags.scenario_r);
    opts["scenario:" + sub->get_name()] = sub->add_option("--scenario", flags.scenario);
    opts["modes:" + sub->get_name()] = sub->add_option("--modes", flags.modes);
    opts["dt:" + sub->get_name()] = sub->add_option("--dt", flags.dt);
    opts["periods:" + sub->get_name()] = sub->add_option("--periods", flags.periods);
    opts["k:" + sub->get_name()] = sub->add_option("--k", flags.k);
    opts["amp-max:" + sub->get_name()] = sub->add_option("--amp-max", flags.amp_max);
    opts["amp-points:" + sub->get_name()] = sub->add_option("--amp-points", flags.amp_points);
    opts["c:" + sub->get_name()] = sub->add_option("--c", flags.c);
    opts["rho:" + sub->get_name()] = sub->add_option("--rho", flags.orbit_rho);
    opts["theta-span:" + sub->get_name()] = sub->add_option("--theta-span", flags.theta_span);
    opts["seed:" + sub->get_name()] = sub->add_option("--seed", flags.seed);
  };

  CLI::App* sub_spectrum = app.add_subcommand("spectrum", "mode multipliers CSV");
  CLI::App* sub_classify = app.add_subcommand("classify", "regular/singular partition JSON");
  CLI::App* sub_branch = app.add_subcommand("branch", "standing-wave branch + curvature fit");
  CLI::App* sub_omega2 = app.add_subcommand("omega2", "closed form vs series table");
  CLI::App* sub_excisions = app.add_subcommand("excisions", "resonance band scan");
  CLI::App* sub_simulate = app.add_subcommand("simulate", "filament dynamics scenarios");
  CLI::App* sub_orbits = app.add_subcommand("orbits", "relative equilibria and radial orbits");
  CLI::App* sub_traveling = app.add_subcommand("traveling", "traveling-wave branch");
  std::vector<CLI::App*> subs = {sub_spectrum, sub_classify, sub_branch,  sub_omega2,
                                 sub_excisions, sub_simulate, sub_orbits, sub_traveling};
  for (CLI::App* sub : subs) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::from_json(json::parse(read_text(config_path)));

    CLI::App* active = nullptr;
    for (CLI::App* sub : subs)
      if (sub->parsed()) active = sub;
    auto passed = [&](const std::string& name) {
      const auto it = opts.find(name + ":" + active->get_name());
      return it != opts.end() && it->second->count() > 0;
    };
    if (passed("omega")) cfg.omega = flags.omega;
    if (passed("Omega")) cfg.Omega = flags.Omega;
    if (passed("L")) cfg.L = flags.L;
    if (passed("outdir")) cfg.outdir = flags.outdir;
    if (passed("d0")) cfg.schedule.d0 = flags.schedule.d0;
    if (passed("L0")) cfg.schedule.L0 = flags.schedule.L0;
    if (passed("nmax")) cfg.schedule.n_max = flags.schedule.n_max;
    if (passed("rmax")) cfg.r0 = flags.r0;
    if (passed("rpoints")) cfg.r_points = flags.r_points;
    if (passed("r")) cfg.scenario_r = flags.scenario_r;
    if (passed("scenario")) cfg.scenario = flags.scenario;
    if (passed("modes")) cfg.modes = flags.modes;
    if (passed("dt")) cfg.dt = flags.dt;
    if (passed("periods")) cfg.periods = flags.periods;
    if (passed("k")) cfg.k = flags.k;
    if (passed("amp-max")) cfg.amp_max = flags.amp_max;
    if (passed("amp-points")) cfg.amp_points = flags.amp_points;
    if (passed("c")) cfg.c = flags.c;
    if (passed("rho")) cfg.orbit_rho = flags.orbit_rho;
    if (passed("theta-span")) cfg.theta_span = flags.theta_span;
    if (passed("seed")) cfg.seed = flags.seed;
    cfg.validate();

    if (active == sub_spectrum) return cmd_spectrum(cfg);
    if (active == sub_classify) return cmd_classify(cfg);
    if (active == sub_branch) return cmd_branch(cfg);
    if (active == sub_omega2) return cmd_omega2(cfg);
    if (active == sub_excisions) return cmd_excisions(cfg);
    if (active == sub_simulate) return cmd_simulate(cfg);
    if (active == sub_orbits) return cmd_orbits(cfg);
    if (active == sub_traveling) return cmd_traveling(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return EXIT_CONFIG;
  } catch (const vfil::ExcisionHit& e) {
    std::cerr << e.what() << "\n";
    return EXIT_EXCISED;
  } catch (const vfil::NoContractionError& e) {
    std::cerr << e.what() << "\n";
    return EXIT_NO_CONTRACTION;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return EXIT_OK;
}
