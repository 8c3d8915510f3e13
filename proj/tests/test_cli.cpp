#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "nbound/errors.hpp"
#include "nbound/report.hpp"
#include "nbound/run.hpp"

using namespace nb;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("nbound_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command and format names") {
  for (Command c : {Command::bound, Command::classical, Command::verify_constants, Command::eig,
                    Command::capacity, Command::sweep}) {
    CHECK(parse_command(to_string(c)) == c);
  }
  CHECK_FALSE(parse_command("bogus").has_value());
  CHECK(parse_format("csv") == Format::csv);
}

TEST_CASE("bound report carries both variants and the input echo") {
  const auto j = Json::parse(render(Command::bound, Format::json,
                                    parse_key_values("n = 3\ngammas = 2,2\np = 2\n"), 1));
  CHECK(j["version"] == kVersion);
  CHECK(j["input"]["gammas"] == "2,2");
  for (const char* v : {"corrected", "paper_simplified"}) {
    REQUIRE(j.contains(v));
    for (const char* k : {"a_star", "k_pq", "m_rp", "b_rq", "mu_lower", "a_on_boundary", "radicand"}) {
      CHECK(j[v].contains(k));
    }
  }
  const auto& c = j["corrected"];
  CHECK(c["status"] == "ok");
  CHECK(c["mu_lower"].get<double>() == doctest::Approx(0.0011545064178836045).epsilon(1e-9));
  CHECK(j["paper_simplified"]["status"] == "invalid-variant");
}

TEST_CASE("classical report") {
  const auto j = Json::parse(render(Command::classical, Format::json,
                                    parse_key_values("n = 2\np = 2\ndiameter = 1.4142135623730951\nvolume = 1\n"), 1));
  CHECK(j["classical"]["pw_lower"].get<double>() == doctest::Approx(M_PI * M_PI / 2));
  CHECK(j["classical"]["ent_lower"] == j["classical"]["pw_lower"]);
}

TEST_CASE("verify-constants rows") {
  const std::string csv = render(Command::verify_constants, Format::csv,
                                 parse_key_values("gammas = 1,1\na = 1\np = 2\nq = 1.5\nr = 4\n"), 1);
  CHECK(csv.find("a,gammas,p,q,r,k_closed_corrected,k_closed_paper,k_numeric,m_exact,m_numeric,status") !=
        std::string::npos);
  CHECK(csv.find(",ok\n") != std::string::npos);
  CHECK(csv.rfind("# ", 0) == 0);
}

TEST_CASE("missing key is a config error naming the key") {
  try {
    render(Command::bound, Format::json, parse_key_values("n = 3\ngammas = 2,2\n"), 1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "p");
  }
  CHECK_THROWS_AS(render(Command::bound, Format::json, parse_key_values("n = 3\ngammas = 2,2\np = 2\nzz = 1\n"), 1),
                  ConfigError);
}

TEST_CASE("run maps failures to exit codes") {
  const fs::path missing_p = write_file("missing_p.cfg", "n = 3\ngammas = 2,2\n");
  RunConfig cfg;
  cfg.command = Command::bound;
  cfg.input = missing_p.string();
  std::stringstream err;
  CHECK(run(cfg, err) == kExitConfig);
  CHECK(err.str().find("'p'") != std::string::npos);

  const fs::path diverge = write_file("diverge.cfg", "gammas = 3\na = 0.9\np = 2\nq = 1.2\nr = 4\n");
  cfg.command = Command::verify_constants;
  cfg.input = diverge.string();
  cfg.format = Format::csv;
  cfg.output = (scratch_dir() / "verify.csv").string();
  std::stringstream err2;
  CHECK(run(cfg, err2) == kExitOk);
  CHECK(slurp(cfg.output).find("divergent") != std::string::npos);

  cfg.command = Command::capacity;
  cfg.input = write_file("cap.cfg", "domain = cusp\ngammas = 1.5\na = 0.4\np = 1.8\nh = 0.05\n").string();
  std::stringstream err3;
  CHECK(run(cfg, err3) == kExitConfig);
}

TEST_CASE("binary: eig on the unit square, exit codes") {
  const std::string exe = NB_CLI;
  const fs::path cfg = write_file("sq.cfg", "domain = square\nrestarts = 1\n");
  const fs::path out = scratch_dir() / "sq.json";
  REQUIRE(shell(exe + " --cmd eig --config " + cfg.string() + " --h 0.02 --out " + out.string()) == 0);
  const auto j = Json::parse(slurp(out));
  CHECK(j["mu2_fem"]["value"].get<double>() == doctest::Approx(9.87).epsilon(0.01));
  CHECK(j["bracket"]["status"] == "ok");

  const fs::path bad = write_file("bad.cfg", "n = 3\ngammas = 2,2\n");
  CHECK(shell(exe + " --cmd bound --config " + bad.string() + " 2>/dev/null") == 2);
  CHECK(shell(exe + " --cmd nonsense 2>/dev/null >/dev/null") == 2);
  CHECK(shell(exe + " --version >/dev/null") == 0);
}

TEST_CASE("identical config and seed give identical bytes") {
  const KeyValues sweep = parse_key_values("gammas = 3;2;1.5\np = 1.5,2\nq = 1.2,1.4\nr = 2.5\n");
  CHECK(render(Command::sweep, Format::csv, sweep, 7) == render(Command::sweep, Format::csv, sweep, 7));
  const KeyValues eig = parse_key_values("domain = cusp\ngamma1 = 2\nh = 0.05\np = 3\nrestarts = 3\n");
  CHECK(render(Command::eig, Format::json, eig, 42) == render(Command::eig, Format::json, eig, 42));
}
