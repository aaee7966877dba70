#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

fs::path scratch_root() {
  static fs::path p = [] {
    fs::path root =
        fs::temp_directory_path() / ("grushin_cli_" + std::to_string(::getpid()));
    fs::create_directories(root);
    return root;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the binary with stdout+stderr captured; returns the exit code.
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path cap = scratch_root() / ("capture_" + std::to_string(counter++) + ".txt");
  std::string cmd = std::string("\"") + GRUSHIN_CLI_PATH + "\" " + args + " > " +
                    cap.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(cap);
  return r;
}

double parse_double(const std::string& s) {
  std::istringstream in(s);
  double v = 0.0;
  REQUIRE(bool(in >> v));
  return v;
}

}  // namespace

TEST_CASE("eval prints frozen special-function values") {
  RunResult jac = run_cli("eval jacobi --j 2 --alpha 0 --beta 0 --x 0");
  CHECK(jac.code == 0);
  CHECK(parse_double(jac.out) == doctest::Approx(-0.5).epsilon(1e-15));

  RunResult prof = run_cli("eval profile --d 2 --ell2 1 --m2 0 --psi 0.2");
  CHECK(prof.code == 0);
  CHECK(parse_double(prof.out) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  RunResult zon = run_cli("eval zonal --k 2 --m2 3 --u 0.37");  // n = 1 on N + 1/2
  CHECK(zon.code == 0);
  CHECK(parse_double(zon.out) == doctest::Approx(3.0 * 0.37 / (4.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("usage and domain problems exit with code 2") {
  CHECK(run_cli("eval jacobi --j 2 --alpha 0 --beta 0").code == 2);   // missing --x
  CHECK(run_cli("eval jacobi --j 2 --alpha 0 --beta 0 --x 1.5").code == 2);
  CHECK(run_cli("eval profile --d 2 --ell2 2 --m2 0 --psi 0.1").code == 2);  // off lattice
  CHECK(run_cli("scan cluster --d 9 --k 1").code == 2);
  CHECK(run_cli("scan cluster --d 2 --k 1 --i 16:48").code == 2);  // not a doubling range
  CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("cluster scan writes a manifest and reruns byte-identically") {
  fs::path out = scratch_root() / "cluster_run";
  std::string args =
      "scan cluster --d 2 --k 1 --i 16:64 --out " + out.string();
  RunResult first = run_cli(args);
  CHECK(first.code == 0);

  std::string csv1 = slurp(out / "cluster.csv");
  nlohmann::json man = nlohmann::json::parse(slurp(out / "cluster_manifest.json"));
  CHECK(man.at("command") == "scan cluster");
  CHECK(man.at("pass") == true);
  CHECK(man.at("outputs").at(0) == "cluster.csv");
  CHECK(man.at("config").at("d") == 2);
  std::string hash = man.at("config_hash").get<std::string>();
  CHECK(hash.size() == 16);
  CHECK(csv1.find(hash) != std::string::npos);

  RunResult second = run_cli(args);
  CHECK(second.code == 0);
  CHECK(slurp(out / "cluster.csv") == csv1);
}

TEST_CASE("json format emits parseable tables") {
  fs::path out = scratch_root() / "cluster_json";
  RunResult r = run_cli("scan cluster --d 2 --k 1 --i 16:64 --format json --out " + out.string());
  CHECK(r.code == 0);
  nlohmann::json data = nlohmann::json::parse(slurp(out / "cluster.json"));
  CHECK(data.at("header").at(0) == "i");
  CHECK(data.at("rows").size() == 3);
  CHECK(data.at("rows").at(0).at(0) == "16");  // cells keep the %.17g text form
  nlohmann::json man = nlohmann::json::parse(slurp(out / "cluster_manifest.json"));
  CHECK(man.at("outputs").at(0) == "cluster.json");
}

TEST_CASE("config files set defaults and explicit flags win") {
  fs::path cfg = scratch_root() / "cfg.json";
  {
    std::ofstream f(cfg);
    f << "{\"d\": 2, \"k\": 1, \"seed\": 123}\n";
  }
  fs::path out1 = scratch_root() / "cfg_run1";
  RunResult a = run_cli("scan cluster --config " + cfg.string() + " --i 16:64 --out " +
                        out1.string());
  CHECK(a.code == 0);
  nlohmann::json man1 = nlohmann::json::parse(slurp(out1 / "cluster_manifest.json"));
  CHECK(man1.at("config").at("seed") == 123);
  CHECK(man1.at("config").at("out_dir") == out1.string());

  fs::path out2 = scratch_root() / "cfg_run2";
  RunResult b = run_cli("scan cluster --config " + cfg.string() + " --seed 777 --i 16:64 --out " +
                        out2.string());
  CHECK(b.code == 0);
  nlohmann::json man2 = nlohmann::json::parse(slurp(out2 / "cluster_manifest.json"));
  CHECK(man2.at("config").at("seed") == 777);
  CHECK(man2.at("config_hash") != man1.at("config_hash"));
}

TEST_CASE("failed scan assertions exit with code 3") {
  // Plain-mode sampling at radius 2^-6 with 500 draws has hit probability
  // around 4e-6 per draw: the measured volume is zero, the ratio spread is
  // not a number, and the assertion must fail.
  fs::path out = scratch_root() / "volume_fail";
  RunResult r = run_cli(
      "scan volume --d 2 --k 1 --rexp 6:6 --psi 0.0 --samples 500 --mode plain --out " +
      out.string());
  CHECK(r.code == 3);
  nlohmann::json man = nlohmann::json::parse(slurp(out / "volume_manifest.json"));
  CHECK(man.at("pass") == false);
}
