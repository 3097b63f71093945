#ifndef VFIL_IO_HPP
#define VFIL_IO_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfil/bifurcation.hpp"
#include "vfil/dynamics.hpp"
#include "vfil/hamiltonian.hpp"
#include "vfil/orbits.hpp"

namespace vfil {

using json = nlohmann::json;

// Field file format: {"L": int, "omega": float|null, "entries": [[j,k,a,b],...]},
// b omitted for j = 0, entries in canonical order.
json field_to_json(const SymmetricField& u, double omega = std::nan(""));
SymmetricField field_from_json(const json& j);

std::string spectrum_csv(double Omega, double omega, int L);
json classification_to_json(const SiteClassification& cls);
std::string branch_csv(const std::vector<BranchPoint>& branch, const NormParams& p);
json coefficients_to_json(const PerturbationCoefficients& pc);
json excisions_to_json(const std::vector<ExcisionRecord>& recs);
json diagnostics_to_json(const SolveDiagnostics& diag);
json schedule_to_json(const SolverSchedule& s);

std::string orbit_csv(const RadialOrbit& orbit);
std::string traveling_csv(const TravelingBranch& branch);

// Row-major float64 dump with a JSON header naming the site ordering:
// uint64 header length, header bytes, matrix data.
void dump_operator(const LatticeOperator& op, const std::string& path);
LatticeOperator load_operator(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);
std::string hash_hex(const json& j);

struct RunConfig {
  double omega = 1.0;
  double Omega = -1.0;  // <= 0: use the bifurcation frequency of omega
  SolverSchedule schedule;
  NormParams norm;
  double r0 = 0.05;
  std::vector<double> r_grid;
  int r_points = 6;
  int L = 64;
  double tol = 1e-9;
  std::string scenario = "two-filament-standing";
  double scenario_r = 0.02;
  int modes = 32;
  double dt = 2e-3;
  double periods = 1.0;
  int k = 1;
  double amp_max = 0.05;
  int amp_points = 6;
  double c = 1.0;
  double orbit_rho = -1.0, orbit_drho = 0.0, theta_span = 62.832, dtheta = 1e-3;
  std::string outdir = "out";
  std::uint64_t seed = 1;

  json to_json() const;
  static RunConfig from_json(const json& j);  // throws std::invalid_argument on bad fields
  void validate() const;
};

// manifest.json: config hash plus the artifact list
void write_manifest(const std::string& outdir, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::string>& artifacts);

}  // namespace vfil

#endif
