#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "vfil/io.hpp"

using namespace vfil;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(VFIL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vfil_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("field json round trip") {
  SymmetricField u(4);
  u.set(0, 0, 0.5);
  u.set(0, 2, -0.25);
  u.set(1, 1, 0.125, -0.375);
  const json j = field_to_json(u, 1.0);
  CHECK(j.at("L") == 4);
  CHECK(j.at("omega") == 1.0);
  // j = 0 entries carry no b component
  for (const auto& e : j.at("entries"))
    if (e.at(0) == 0) CHECK(e.size() == 3);
  const SymmetricField back = field_from_json(j);
  CHECK(back.a(0, 2) == -0.25);
  CHECK(back.b(1, 1) == -0.375);
}

TEST_CASE("operator binary dump round trip") {
  TempDir tmp;
  const LatticeOperator H = assemble_hamiltonian(SymmetricField(6), 0.02, std::sqrt(3.0), 1.0, 6);
  const std::string path = tmp.str() + "/h.bin";
  dump_operator(H, path);
  const LatticeOperator back = load_operator(path);
  CHECK(back.rows.size() == H.rows.size());
  CHECK((back.m - H.m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.Omega == H.Omega);
}

TEST_CASE("config validation") {
  json j;
  j["omega"] = -1.0;
  CHECK_THROWS_AS(RunConfig::from_json(j), std::invalid_argument);
  j["omega"] = 1.0;
  j["r0"] = 0.9;
  CHECK_THROWS_AS(RunConfig::from_json(j), std::invalid_argument);
  j["r0"] = 0.05;
  j["schedule"] = {{"beta", 1.0}};
  CHECK_THROWS_AS(RunConfig::from_json(j), std::invalid_argument);
  j["schedule"] = {{"beta", 2.0}};
  const RunConfig ok = RunConfig::from_json(j);
  CHECK(ok.omega == 1.0);
  // the config hash is stable across dumps
  CHECK(hash_hex(ok.to_json()) == hash_hex(RunConfig::from_json(ok.to_json()).to_json()));
}

TEST_CASE("cli: omega2 and spectrum artifacts") {
  TempDir tmp;
  const std::string out = tmp.str() + "/t1";
  CHECK(run("omega2 --omega 1 --outdir " + out) == 0);
  const json j = json::parse(read_text(out + "/omega2.json"));
  CHECK(j.at("Omega2").get<double>() == doctest::Approx(0.962250).epsilon(1e-6));
  CHECK(std::abs(j.at("Omega2_series_minus_closed_form").get<double>()) <= 1e-10);
  CHECK(j.at("exceptional_omega0").get<double>() == doctest::Approx(0.159).epsilon(5e-3));
  const json manifest = json::parse(read_text(out + "/manifest.json"));
  CHECK(manifest.at("command") == "omega2");
  CHECK(manifest.contains("config_hash"));

  CHECK(run("spectrum --omega 1.4142135 --L 16 --outdir " + tmp.str() + "/t2") == 0);
  const std::string csv = read_text(tmp.str() + "/t2/spectrum.csv");
  CHECK(csv.substr(0, 12) == "j,k,l,lambda");

  CHECK(run("classify --omega 1 --L 32 --outdir " + tmp.str() + "/t3") == 0);
  const json cls = json::parse(read_text(tmp.str() + "/t3/classification.json"));
  // omega = 1 at the bifurcation frequency: the kernel site and (15,5) are
  // the singular clusters inside L = 32
  CHECK(cls.at("clusters").size() == 2);
}

TEST_CASE("cli: determinism of artifacts") {
  TempDir tmp;
  const std::string a = tmp.str() + "/a", b = tmp.str() + "/b";
  CHECK(run("traveling --omega 1.4142135 --k 1 --amp-max 0.03 --amp-points 3 --L 10 --outdir " +
            a) == 0);
  CHECK(run("traveling --omega 1.4142135 --k 1 --amp-max 0.03 --amp-points 3 --L 10 --outdir " +
            b) == 0);
  CHECK(read_text(a + "/traveling.csv") == read_text(b + "/traveling.csv"));
  CHECK(read_text(a + "/traveling.json") == read_text(b + "/traveling.json"));
}

TEST_CASE("cli: orbits artifacts") {
  TempDir tmp;
  const std::string out = tmp.str() + "/orb";
  CHECK(run("orbits --omega 0.2 --c 1.0 --theta-span 12.0 --outdir " + out) == 0);
  const json j = json::parse(read_text(out + "/orbits.json"));
  CHECK(j.at("rho_plus").get<double>() == doctest::Approx(0.85065).epsilon(1e-4));
  CHECK(j.at("energy_drift").get<double>() <= 1e-10);
}

TEST_CASE("cli: branch exit codes") {
  TempDir tmp;
  // tiny converged branch: exit 0 and artifacts present
  const std::string ok = tmp.str() + "/ok";
  CHECK(run("branch --omega 1.4142135 --L0 4 --nmax 1 --rmax 0.02 --rpoints 2 --outdir " + ok) ==
        0);
  const std::string csv = read_text(ok + "/branch.csv");
  CHECK(csv.substr(0, 1) == "r");
  CHECK(json::parse(read_text(ok + "/transcripts.json")).contains("points"));
  CHECK(json::parse(read_text(ok + "/branch_summary.json")).contains("excisions"));

  // an amplitude pinned inside the omega = 1 resonance band excises: exit 2
  const std::string ex = tmp.str() + "/ex";
  CHECK(run("branch --omega 1 --L0 8 --nmax 2 --rmax 0.004 --rpoints 1 --outdir " + ex) == 2);
}

TEST_CASE("cli: config errors exit with code 4") {
  TempDir tmp;
  const std::string cfg = tmp.str() + "/bad.json";
  write_text(cfg, "{\"omega\": -2.0}\n");
  CHECK(run("spectrum --config " + cfg) == 4);
  CHECK(run("simulate --scenario no-such-scenario --outdir " + tmp.str() + "/x") == 4);
}
