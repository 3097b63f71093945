#include "vfil/io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vfil {

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace

json field_to_json(const SymmetricField& u, double omega) {
  json entries = json::array();
  for (const LatticeSite& x : build_lattice(std::max(u.radius(), 1))) {
    if (x.l == -1) continue;  // one entry per (j,k) pair
    const double a = u.a(x.j, x.k), b = u.b(x.j, x.k);
    if (a == 0.0 && b == 0.0) continue;
    if (x.j == 0)
      entries.push_back({x.j, x.k, a});
    else
      entries.push_back({x.j, x.k, a, b});
  }
  json j;
  j["L"] = u.radius();
  j["omega"] = std::isnan(omega) ? json(nullptr) : json(omega);
  j["entries"] = entries;
  return j;
}

SymmetricField field_from_json(const json& j) {
  SymmetricField u(j.at("L").get<int>());
  for (const auto& e : j.at("entries")) {
    const int jj = e.at(0).get<int>(), kk = e.at(1).get<int>();
    const double a = e.at(2).get<double>();
    const double b = (e.size() > 3) ? e.at(3).get<double>() : 0.0;
    u.set(jj, kk, a, b);
  }
  return u;
}

std::string spectrum_csv(double Omega, double omega, int L) {
  std::ostringstream os;
  os << "j,k,l,lambda\n";
  for (const LatticeSite& x : build_lattice(L))
    os << x.j << ',' << x.k << ',' << x.l << ',' << fmt(lambda_site(x, Omega, omega)) << '\n';
  return os.str();
}

json classification_to_json(const SiteClassification& cls) {
  json j;
  j["d0"] = cls.d0;
  j["ell"] = cls.ell;
  j["separation_constant"] =
      std::isfinite(cls.separation_constant) ? json(cls.separation_constant) : json(nullptr);
  json reg = json::array();
  for (const LatticeSite& x : cls.regular) reg.push_back({x.j, x.k, x.l});
  j["regular"] = reg;
  json clusters = json::array();
  for (const SiteCluster& c : cls.clusters) {
    json sites = json::array();
    for (const LatticeSite& x : c.sites) sites.push_back({x.j, x.k, x.l});
    clusters.push_back({{"center", {c.center.j, c.center.k, c.center.l}}, {"sites", sites}});
  }
  j["clusters"] = clusters;
  return j;
}

std::string branch_csv(const std::vector<BranchPoint>& branch, const NormParams& p) {
  std::ostringstream os;
  os << "r,Omega,residual,excised,norm_w\n";
  for (const BranchPoint& pt : branch)
    os << fmt(pt.r) << ',' << fmt(pt.Omega) << ',' << fmt(pt.residual) << ','
       << (pt.excised ? 1 : 0) << ',' << fmt(pt.excised ? 0.0 : sigma_norm(pt.w, p)) << '\n';
  return os.str();
}

json coefficients_to_json(const PerturbationCoefficients& pc) {
  json j;
  j["omega"] = pc.omega;
  j["Omega0"] = pc.Omega0;
  j["a"] = pc.a;
  j["b"] = pc.b;
  j["a_plus"] = pc.aP;
  j["b_plus"] = pc.bP;
  j["a_minus"] = pc.aM;
  j["b_minus"] = pc.bM;
  j["Q"] = pc.Q;
  j["Omega1"] = pc.Omega1;
  j["Omega2"] = pc.Omega2;
  j["ip_idt_u1_u1"] = pc.ip_idt_u1_u1;
  j["ip_u1bar2_u1"] = pc.ip_u1bar2_u1;
  j["ip_u1bar3_u1"] = pc.ip_u1bar3_u1;
  j["ip_Linv"] = pc.ip_Linv;
  j["ip_Linv_first"] = pc.ip_Linv_first;
  j["ip_Linv_P"] = pc.ip_Linv_P;
  j["u1"] = field_to_json(pc.u1, pc.omega);
  j["u2"] = field_to_json(pc.u2, pc.omega);
  return j;
}

json excisions_to_json(const std::vector<ExcisionRecord>& recs) {
  json arr = json::array();
  for (const ExcisionRecord& r : recs) {
    json c = json::array();
    for (const auto& [rr, oz] : r.curve) c.push_back({rr, oz});
    arr.push_back({{"j", r.j},
                   {"k", r.k},
                   {"stage", r.stage},
                   {"half_width", r.half_width},
                   {"slope_at_zero", r.slope_at_zero},
                   {"curve", c}});
  }
  return arr;
}

json diagnostics_to_json(const SolveDiagnostics& diag) {
  json j;
  j["residual_norms"] = diag.residual_norms;
  j["delta_norms"] = diag.delta_norms;
  j["K_norms"] = diag.K_norms;
  j["kappa_fit"] = diag.kappa_fit;
  j["stages"] = diag.stages;
  j["converged"] = diag.converged;
  return j;
}

json schedule_to_json(const SolverSchedule& s) {
  return json{{"L0", s.L0},
              {"n_max", s.n_max},
              {"beta", s.beta},
              {"sigma0", s.sigma0},
              {"s_weight", s.s_weight},
              {"d0", s.d0},
              {"kappa_target", s.kappa_target},
              {"excision_width_C", s.excision_width_C},
              {"target_residual", s.target_residual}};
}

std::string orbit_csv(const RadialOrbit& orbit) {
  std::ostringstream os;
  os << "theta,rho\n";
  for (size_t i = 0; i < orbit.theta.size(); ++i)
    os << fmt(orbit.theta[i]) << ',' << fmt(orbit.rho[i]) << '\n';
  return os.str();
}

std::string traveling_csv(const TravelingBranch& branch) {
  std::ostringstream os;
  os << "amplitude,Omega,residual\n";
  for (const TravelingPoint& pt : branch.points)
    os << fmt(pt.amplitude) << ',' << fmt(pt.Omega) << ',' << fmt(pt.residual) << '\n';
  return os.str();
}

void dump_operator(const LatticeOperator& op, const std::string& path) {
  json sites = json::array();
  for (const LatticeSite& x : op.rows) sites.push_back({x.j, x.k, x.l});
  json header{{"rows", int(op.rows.size())},
              {"cols", int(op.cols.size())},
              {"Omega", op.Omega},
              {"omega", op.omega},
              {"sites", sites}};
  const std::string h = header.dump();
  std::ofstream f(path, std::ios::binary);
  const std::uint64_t len = h.size();
  f.write(reinterpret_cast<const char*>(&len), sizeof(len));
  f.write(h.data(), len);
  // row-major float64
  for (Eigen::Index i = 0; i < op.m.rows(); ++i)
    f.write(reinterpret_cast<const char*>(op.m.row(i).eval().data()),
            sizeof(double) * op.m.cols());
}

LatticeOperator load_operator(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::uint64_t len = 0;
  f.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string h(len, '\0');
  f.read(h.data(), len);
  const json header = json::parse(h);
  LatticeOperator op;
  op.Omega = header.at("Omega").get<double>();
  op.omega = header.at("omega").get<double>();
  for (const auto& s : header.at("sites"))
    op.rows.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>()});
  op.cols = op.rows;
  const int n = header.at("rows").get<int>();
  op.m.resize(n, header.at("cols").get<int>());
  for (Eigen::Index i = 0; i < op.m.rows(); ++i) {
    Eigen::VectorXd row(op.m.cols());
    f.read(reinterpret_cast<char*>(row.data()), sizeof(double) * op.m.cols());
    op.m.row(i) = row;
  }
  return op;
}

void write_text(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream f(path, std::ios::binary);
  f << content;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const json& j) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(j.dump());
  return os.str();
}

json RunConfig::to_json() const {
  json j;
  j["omega"] = omega;
  j["Omega"] = Omega;
  j["schedule"] = schedule_to_json(schedule);
  j["norm"] = {{"sigma", norm.sigma}, {"s_weight", norm.s_weight}};
  j["r0"] = r0;
  j["r_grid"] = r_grid;
  j["r_points"] = r_points;
  j["L"] = L;
  j["tol"] = tol;
  j["scenario"] = scenario;
  j["scenario_r"] = scenario_r;
  j["modes"] = modes;
  j["dt"] = dt;
  j["periods"] = periods;
  j["k"] = k;
  j["amp_max"] = amp_max;
  j["amp_points"] = amp_points;
  j["c"] = c;
  j["orbit_rho"] = orbit_rho;
  j["orbit_drho"] = orbit_drho;
  j["theta_span"] = theta_span;
  j["dtheta"] = dtheta;
  j["outdir"] = outdir;
  j["seed"] = seed;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("omega", c.omega);
  get("Omega", c.Omega);
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    auto gs = [&](const char* key, auto& target) {
      if (s.contains(key)) target = s.at(key).get<std::decay_t<decltype(target)>>();
    };
    gs("L0", c.schedule.L0);
    gs("n_max", c.schedule.n_max);
    gs("beta", c.schedule.beta);
    gs("sigma0", c.schedule.sigma0);
    gs("s_weight", c.schedule.s_weight);
    gs("d0", c.schedule.d0);
    gs("kappa_target", c.schedule.kappa_target);
    gs("excision_width_C", c.schedule.excision_width_C);
    gs("target_residual", c.schedule.target_residual);
  }
  if (j.contains("norm")) {
    c.norm.sigma = j.at("norm").value("sigma", c.norm.sigma);
    c.norm.s_weight = j.at("norm").value("s_weight", c.norm.s_weight);
  }
  get("r0", c.r0);
  get("r_grid", c.r_grid);
  get("r_points", c.r_points);
  get("L", c.L);
  get("tol", c.tol);
  get("scenario", c.scenario);
  get("scenario_r", c.scenario_r);
  get("modes", c.modes);
  get("dt", c.dt);
  get("periods", c.periods);
  get("k", c.k);
  get("amp_max", c.amp_max);
  get("amp_points", c.amp_points);
  get("c", c.c);
  get("orbit_rho", c.orbit_rho);
  get("orbit_drho", c.orbit_drho);
  get("theta_span", c.theta_span);
  get("dtheta", c.dtheta);
  get("outdir", c.outdir);
  get("seed", c.seed);
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (omega <= 0.0) throw std::invalid_argument("config: omega must be positive");
  if (r0 < 0.0 || r0 > 0.5) throw std::invalid_argument("config: r0 out of range [0, 0.5]");
  if (L < 2 || L > 4096) throw std::invalid_argument("config: L out of range [2, 4096]");
  if (modes < 4 || modes > 1024) throw std::invalid_argument("config: modes out of range");
  if (dt <= 0.0) throw std::invalid_argument("config: dt must be positive");
  if (norm.s_weight <= 1.0) throw std::invalid_argument("config: s_weight must exceed 1");
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  for (double r : r_grid)
    if (r < 0.0 || r > r0) throw std::invalid_argument("config: r_grid entry outside [0, r0]");
  schedule.validate();
}

void write_manifest(const std::string& outdir, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::string>& artifacts) {
  json m;
  m["command"] = command;
  m["config"] = cfg.to_json();
  m["config_hash"] = hash_hex(cfg.to_json());
  m["artifacts"] = artifacts;
  m["library"] = "vfil 0.1.0";
  write_text(outdir + "/manifest.json", m.dump(2) + "\n");
}

}  // namespace vfil
