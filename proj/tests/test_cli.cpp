#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ftn/ftn.hpp"

using Catch::Approx;

namespace {

const std::string kCli = FTN_CLI_PATH;

std::string temp_path(const std::string& stem) {
  return "/tmp/ftn_cli_test_" + std::to_string(::getpid()) + "_" + stem;
}

int run(const std::string& args) {
  const int st = std::system((kCli + " " + args).c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& body) {
  return body.substr(0, body.find('\n'));
}

}  // namespace

TEST_CASE("capacity subcommand", "[cli]") {
  const std::string out = temp_path("cap.json");
  REQUIRE(run("capacity --mode flat --k 2 --l 2 --delta 0.9 --beta 0.25 "
              "--snr-db 10 --seed 31 --out " + out) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["format"] == "ftn-capacity v1");
  CHECK(j["engine"] == "flat-closed-form");
  CHECK(j["snr_db"] == 10.0);
  CHECK(j["delta"] == 0.9);

  ftn::PulseConfig pulse{0.01, 0.25, 0.9};
  const ftn::CapacityReport direct =
      ftn::flat_capacity(ftn::gen_flat(2, 2, 31, 0), 10.0, 1.0, pulse).report;
  CHECK(j["capacity_bits_per_channel_use"].get<double>() ==
        Approx(direct.bits_per_channel_use).epsilon(1e-12));
  CHECK(j["capacity_bits_s_hz"].get<double>() ==
        Approx(direct.bits_per_s_per_hz).epsilon(1e-12));
  std::remove(out.c_str());

  const std::string txt = temp_path("cap.txt");
  REQUIRE(run("capacity --mode flat --delta 0.9 --beta 0.25 --snr-db 10 "
              "--seed 31 > " + txt) == 0);
  const std::string body = slurp(txt);
  CHECK(body.find("engine=flat-closed-form") != std::string::npos);
  CHECK(body.find("capacity_bits_s_hz=") != std::string::npos);
  std::remove(txt.c_str());
}

TEST_CASE("sweep subcommand", "[cli]") {
  const std::string a = temp_path("sweep_a.csv");
  const std::string b = temp_path("sweep_b.csv");
  const std::string args =
      "sweep --mode flat --k 2 --l 2 --delta 0.9 --beta 0.25 "
      "--snr-db 0,10 --realizations 3 --seed 7 --out ";
  REQUIRE(run(args + a) == 0);
  REQUIRE(run(args + b) == 0);
  const std::string csv = slurp(a);
  CHECK(csv == slurp(b));
  CHECK(first_line(csv) == "# ftn-sweep v1");
  CHECK(csv.find("snr_db,delta,beta,mean_capacity_bits_s_hz,stderr,"
                 "realizations,seed") != std::string::npos);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("spectrum subcommand", "[cli]") {
  const std::string out = temp_path("spec.csv");
  REQUIRE(run("spectrum --mode fs --j 3 --delta 0.8 --beta 0.5 --snr-db 5 "
              "--grid 128 --seed 3 --out " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(first_line(csv) == "# ftn-spectrum v1");
  CHECK(csv.find("f_n,tau_1,tau_2,phi_1,phi_2,input_phi_1,input_phi_2,G_d") !=
        std::string::npos);
  int rows = 0;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 128 + 1);
  std::remove(out.c_str());
}

TEST_CASE("validate subcommand", "[cli]") {
  const std::string out = temp_path("validate.json");
  REQUIRE(run("validate --quick --seed 42 --out " + out) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["format"] == "ftn-validate v1");
  CHECK(j["all_pass"] == true);
  CHECK(j["checks"].size() == 6);

  REQUIRE(run("validate --quick --seed 42 --tol-scale 1e-15 --out " + out) ==
          2);
  j = nlohmann::json::parse(slurp(out));
  CHECK(j["all_pass"] == false);
  std::remove(out.c_str());
}

TEST_CASE("channel file utilities", "[cli]") {
  const std::string out = temp_path("chan.txt");
  REQUIRE(run("channel gen --k 2 --l 2 --j 3 --seed 123 --out " + out) == 0);
  const ftn::FsChannel loaded = ftn::load_channel(out);
  const ftn::FsChannel drawn = ftn::gen_fs(2, 2, 3, 123, 0);
  REQUIRE(loaded.j_taps == 3);
  for (int j = 0; j < 3; ++j)
    CHECK((loaded.taps[j] - drawn.taps[j]).cwiseAbs().maxCoeff() == 0.0);

  const std::string shown = temp_path("chan_show.txt");
  REQUIRE(run("channel show --channel-file " + out + " > " + shown) == 0);
  CHECK(first_line(slurp(shown)) == "K=2 L=2 J=3");
  std::remove(out.c_str());
  std::remove(shown.c_str());

  CHECK(run("channel gen --k 2 --l 2 --j 3 --seed 1 2> /dev/null") == 1);
}

TEST_CASE("config file with flag override", "[cli]") {
  const std::string cfg = temp_path("run.cfg");
  {
    std::ofstream f(cfg);
    f << "mode = flat\n"
      << "seed = 9\n"
      << "snr_db = 0:30:5\n"
      << "delta = 0.9\n"
      << "beta = 0.25\n";
  }
  const std::string out = temp_path("cfg_cap.json");
  REQUIRE(run("capacity --config " + cfg + " --snr-db 10 --out " + out) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["snr_db"] == 10.0);  // flag wins
  CHECK(j["seed"] == 9);       // file survives
  CHECK(j["delta"] == 0.9);
  std::remove(cfg.c_str());
  std::remove(out.c_str());

  CHECK(run("capacity --config " + temp_path("no_such.cfg") +
            " 2> /dev/null") == 1);
}

TEST_CASE("error exits", "[cli]") {
  CHECK(run("frobnicate 2> /dev/null") == 1);
  const std::string err = temp_path("mazo.err");
  CHECK(run("sweep --mode flat --delta 0.6 --beta 0.5 --snr-db 10 "
            "--realizations 1 --seed 1 2> " + err) == 1);
  CHECK(slurp(err).find("error:") != std::string::npos);
  std::remove(err.c_str());
}
