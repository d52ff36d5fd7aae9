#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "ifock/cli.h"

using namespace ifock;

namespace {

const std::string fixtures = IFOCK_FIXTURE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ifock");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("CSV quoting and number format") {
  CHECK(cli::CsvWriter::quote("plain") == "plain");
  CHECK(cli::CsvWriter::quote("a,b") == "\"a,b\"");
  CHECK(cli::CsvWriter::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(cli::CsvWriter::quote("two\nlines") == "\"two\nlines\"");
  CHECK(cli::CsvWriter::number(0.1) == "0.10000000000000001");
  CHECK(cli::CsvWriter::number(2.0) == "2");
}

TEST_CASE("config parsing") {
  const auto cfg = cli::load_config(fixtures + "/two_point.json");
  CHECK(cfg.probe_p.size() == 3);
  CHECK(cfg.route == cli::Route::All);
  const auto spec = cfg.correlator(2.0);
  CHECK(spec.times == std::vector<double>{1.0, 1.0});
  CHECK(spec.factors.size() == 2);

  CHECK_THROWS_AS(cli::load_config(fixtures + "/unknown_field.json"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"schema": 2})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"schema": 1, "extra": 0})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"schema": 1, "form_factors": [{"type": "gaussian",
      "re_amp": 1, "im_amp": 0, "center": [0], "width": 1, "sigma": 2}]})"),
                  ConfigError);

  const auto grid = cli::parse_config(R"({"schema": 1, "probe_p": {"start": 1, "stop": 2, "count": 3}})");
  CHECK(grid.probe_p == std::vector<double>{1.0, 1.5, 2.0});

  const auto quad = cli::parse_config(
      R"({"schema": 1, "dispersion": {"type": "quadratic", "omega0": 0.5, "mu": 2}})");
  CHECK(quad.dispersion(2.0) == 1.5);
}

TEST_CASE("partition command") {
  auto r = run_cli({"partition", "--epsilon", "1,0,0,1"});
  CHECK(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "epsilon,status,wigner_pairing,pairing_count");
  CHECK(rows[1].find("trivial") != std::string::npos);
  CHECK(rows[1].find("nontrivial") == std::string::npos);

  r = run_cli({"partition", "--epsilon", "1,1,0,0"});
  CHECK(r.code == 0);
  rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].find("nontrivial") != std::string::npos);
  CHECK(rows[1].substr(0, 9) == "\"1,1,0,0\"");

  CHECK(run_cli({"partition", "--epsilon", "1,2"}).code == cli::exit_code::config);
  CHECK(run_cli({"partition"}).code == cli::exit_code::config);
}

TEST_CASE("moment command") {
  const auto r = run_cli({"moment", "--config", fixtures + "/rainbow.json"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "p,re,im,route");
  CHECK(rows[1].rfind("3,4.97660302461720", 0) == 0);
}

TEST_CASE("crosscheck on the two-point reference config") {
  const auto r = run_cli({"crosscheck", "--config", fixtures + "/two_point.json"});
  CHECK(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dev = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    CHECK(dev < 1e-6);
  }
}

TEST_CASE("bose-moment command") {
  const auto r = run_cli({"bose-moment", "--config", fixtures + "/bose.json"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "2");
}

TEST_CASE("prelimit command") {
  const auto r = run_cli({"prelimit", "--config", fixtures + "/prelimit.json"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "lambda,pairing_id,re,im,crossing_flag");
  // one pairing row and one total row per lambda
  CHECK(rows.size() == 5);
}

TEST_CASE("kernel-scan flags the tangent shell") {
  const auto r = run_cli({"kernel-scan", "--config", fixtures + "/kernel_scan.json"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "ok");
  CHECK(rows[2].substr(rows[2].rfind(',') + 1) == "degenerate");
  CHECK(rows[3].substr(rows[3].rfind(',') + 1) == "ok");
}

TEST_CASE("error exit codes") {
  auto r = run_cli({"moment", "--config", fixtures + "/degenerate.json"});
  CHECK(r.code == cli::exit_code::degenerate);
  CHECK(r.err.find("p=") != std::string::npos);
  r = run_cli({"moment", "--config", fixtures + "/unknown_field.json"});
  CHECK(r.code == cli::exit_code::config);
  CHECK(r.err.find("slope") != std::string::npos);
  CHECK(run_cli({"moment", "--config", fixtures + "/missing.json"}).code == cli::exit_code::config);
  CHECK(run_cli({"moment"}).code == cli::exit_code::config);
  CHECK(run_cli({"frobnicate"}).code == cli::exit_code::config);
}

TEST_CASE("output file and determinism") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "ifock_test_a.csv").string();
  const auto b = (dir / "ifock_test_b.csv").string();
  REQUIRE(run_cli({"moment", "--config", fixtures + "/two_point.json", "--out", a}).code == 0);
  REQUIRE(run_cli({"moment", "--config", fixtures + "/two_point.json", "--out", b}).code == 0);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text.find("\r\n") != std::string::npos);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("installed binary") {
  const char* bin = std::getenv("IFOCK_BIN");
  if (!bin) SKIP("IFOCK_BIN not set");
  const std::string base = std::string(bin) + " ";
  CHECK(WEXITSTATUS(std::system((base + "partition --epsilon 1,0,0,1 > /dev/null").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system(
            (base + "moment --config " + fixtures + "/degenerate.json 2> /dev/null").c_str())) == 3);
  CHECK(WEXITSTATUS(std::system(
            (base + "moment --config " + fixtures + "/unknown_field.json 2> /dev/null").c_str())) == 2);
}
