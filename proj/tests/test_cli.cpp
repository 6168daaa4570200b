#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfqkd/analytic.hpp"
#include "cli.hpp"

using namespace cfqkd;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<double> csv_numbers(const std::string& line) {
  std::vector<double> v;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) v.push_back(std::stod(cell));
  return v;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cfqkd_test_" + name);
}

}  // namespace

TEST_CASE("baseline with no light prints zeros") {
  const auto r = run({"baseline", "--set", "mean_photon_number=0", "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "p_d0,p_d1,p_d2,p_d0_opp");
  CHECK(l[1] == "0,0,0,0");
}

TEST_CASE("CSV values round-trip to the library values") {
  const auto r = run({"baseline", "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  const auto got = csv_numbers(lines(r.out)[1]);
  const auto want = baseline_stats(validate_config(cli::default_config())).values();
  REQUIRE(got.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(got[i] == want[i]);

  const auto a = run({"attack", "--scenario", "combined-nodisc", "--x", "0.042", "--z", "0.668", "--format", "csv"});
  REQUIRE(a.code == cli::kOk);
  CHECK(lines(a.out)[0] == "p_d0,p_d1,p_d2,p_d0_opp,r_d0,r_d1,r_d2,r_d0_opp,x,y,z,z0,max_deviation");
  const auto v = csv_numbers(lines(a.out)[1]);
  const ProtocolConfig c = validate_config(cli::default_config());
  const auto rep = ratio_report(attack_stats(c, AttackScenario::CombinedNoDisc, {0.042, 1.0, 0.668, 0.0}),
                                baseline_stats(c));
  CHECK(v[4] == rep.r_d0);
  CHECK(v[6] == rep.r_d2);
  CHECK(v[12] == rep.max_deviation);
}

TEST_CASE("validation failures exit with 1") {
  CHECK(run({"baseline", "--set", "reflectivity=1.5"}).code == cli::kValidationError);
  const auto r = run({"baseline", "--set", "reflectivity=1.5"});
  CHECK(r.err.find("reflectivity") != std::string::npos);
  CHECK(run({"baseline", "--set", "colour=blue"}).code == cli::kValidationError);
  CHECK(run({"baseline", "--set", "noequals"}).code == cli::kValidationError);
  CHECK(run({"baseline", "--config", "/nonexistent/cfqkd.cfg"}).code == cli::kValidationError);
  CHECK(run({"attack", "--scenario", "combined-nodisc"}).code == cli::kValidationError);
  CHECK(run({"attack", "--scenario", "combined-nodisc", "--x", "1.2"}).code == cli::kValidationError);
  CHECK(run({"attack", "--scenario", "combined-d1d2", "--x", "0.1"}).code == cli::kValidationError);
  CHECK(run({"simulate", "--scenario", "baseline", "--pulses", "10"}).code == cli::kValidationError);
  CHECK(run({"loss-equiv", "--deviation", "2"}).code == cli::kValidationError);
  CHECK(run({"bogus"}).code == cli::kValidationError);
  CHECK(run({"tables", "III"}).code == cli::kValidationError);
}

TEST_CASE("degenerate ratios exit with 2") {
  const auto r = run({"attack", "--scenario", "combined-nodisc", "--x", "0.1", "--set", "mean_photon_number=0"});
  CHECK(r.code == cli::kRuntimeError);
  CHECK(!r.err.empty());
}

TEST_CASE("simulate is reproducible") {
  const std::vector<std::string> args{"simulate", "--scenario", "combined-nodisc", "--x", "0.042", "--z", "0.668",
                                      "--pulses", "20000", "--seed", "42", "--format", "csv"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const auto l = lines(a.out);
  CHECK(l[0] == "statistic,count,empirical,expected,z");
  CHECK(l[6] == "pulses,sifted_key_length,qber,eve_key_recovery,blinded_clicks");
}

TEST_CASE("simulate writes pulse records") {
  const auto path = temp_file("records.csv");
  const auto r = run({"simulate", "--scenario", "blind-reduce", "--pulses", "100", "--seed", "1", "--records",
                      path.string()});
  REQUIRE(r.code == cli::kOk);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("alice_pol,bob_pol,eve_action", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("config files are read") {
  const auto path = temp_file("link.cfg");
  {
    std::ofstream f(path);
    f << "# short link\n"
         "mean_photon_number = 0.1\nreflectivity = 0.5\nchannel_transmission = 0.6\n"
         "eve_channel_transmission = 0.72\neta_d0 = 0.1\neta_d1 = 0.1\neta_d2 = 0.1\neta_eve = 0.9\n"
         "discrimination = d0d2\n";
  }
  const auto r = run({"optimize", "--config", path.string(), "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  const auto v = csv_numbers(lines(r.out)[1]);
  CHECK(std::abs(v[7] - 0.08167) < 1e-3);
  std::filesystem::remove(path);
}

TEST_CASE("tables and loss equivalence") {
  const auto t = run({"tables", "I", "--step", "0.001"});
  REQUIRE(t.code == cli::kOk);
  CHECK(t.out.find("### No polarization discrimination") != std::string::npos);
  CHECK(t.out.find("### Polarization discrimination in D0 and D2 only") != std::string::npos);
  CHECK(t.out.find("| P_D0 ratio | 1.01383 |") != std::string::npos);
  CHECK(t.out.find("| z0 | 0.02005 |") != std::string::npos);

  const auto l = run({"loss-equiv", "--deviation", "0.015", "--format", "csv"});
  REQUIRE(l.code == cli::kOk);
  const auto v = csv_numbers(lines(l.out)[1]);
  CHECK(std::abs(v[1] - 0.069) <= 0.005);
}

TEST_CASE("help exits cleanly") {
  const auto r = run({"--help"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("simulate") != std::string::npos);
}
