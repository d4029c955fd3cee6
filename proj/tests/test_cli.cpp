#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "levyrep/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("levyrep_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const json& j) {
  const auto p = workdir() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

// runs the installed binary when LEVYREP_BIN is set, the library entry point otherwise
Run run(const std::string& args) {
  const char* bin = std::getenv("LEVYREP_BIN");
  if (bin) {
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
  }
  std::istringstream split(args);
  std::vector<std::string> words{"levyrep"};
  for (std::string w; split >> w;) words.push_back(w);
  std::vector<char*> argv;
  for (auto& w : words) argv.push_back(w.data());
  std::ostringstream out, err;
  const int code = levyrep::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str() + err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json merton_market() {
  return {{"r", 0.02}, {"T", 1.0}, {"K", 1.0},
          {"model", {{"kind", "merton"}, {"mu", -0.1}, {"sigma", 0.2},
                     {"params", {{"gamma", 1.0}, {"m", -0.1}, {"delta", 0.3}}}}}};
}

std::string out_flag(const std::string& sub) {
  const auto d = workdir() / sub;
  return " --out " + d.string();
}

}  // namespace

TEST_CASE("check passes on the Merton market") {
  const auto cfg = write_config("merton.json", {{"market", merton_market()},
                                                {"payoff", {{"kind", "digital"}, {"strike_level", -0.02}}}});
  const auto r = run("check --config " + cfg.string() + out_flag("check"));
  CHECK(r.code == 0);
  CHECK(r.out.find("Assumption 3") != std::string::npos);
  const auto report = json::parse(slurp(workdir() / "check" / "check.json"));
  CHECK(report["all_passed"] == true);
  CHECK(report["config_hash"].get<std::string>().size() == 16);
  CHECK(report["tool"].get<std::string>().rfind("levyrep ", 0) == 0);
}

TEST_CASE("check fails VG on the decay part and points at the Malliavin route") {
  json mk = {{"r", 0.02}, {"T", 1.0}, {"K", 1.0},
             {"model", {{"kind", "vg"}, {"mu", -0.05}, {"params", {{"C", 1.0}, {"G", 5.0}, {"M", 5.0}}}}}};
  const auto cfg = write_config("vg.json", {{"market", mk}});
  const auto r = run("check --config " + cfg.string() + out_flag("vg"));
  CHECK(r.code == 1);
  CHECK(r.out.find("Assumption 3: FAIL (decay)") != std::string::npos);
  CHECK(r.out.find("malliavin") != std::string::npos);
}

TEST_CASE("represent writes a headed csv") {
  json doc = {{"model", merton_market()["model"]}, {"T", 1.0},
              {"payoff", {{"kind", "digital"}, {"strike_level", 0.0}}},
              {"represent", {{"t", {0.5}}, {"x", {0.0, 0.1}}, {"y", {0.2}}}}};
  const auto cfg = write_config("rep.json", doc);
  const auto r = run("represent --config " + cfg.string() + out_flag("rep"));
  CHECK(r.code == 0);
  const std::string csv = slurp(workdir() / "rep" / "represent.csv");
  CHECK(csv.rfind("# levyrep ", 0) == 0);
  CHECK(csv.find("t,x,y,value,u,theta,err_estimate") != std::string::npos);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 4);
  // the same config hashes the same way
  const auto r2 = run("represent --config " + cfg.string() + out_flag("rep2"));
  CHECK(slurp(workdir() / "rep2" / "represent.csv") == csv);
}

TEST_CASE("density and hedge outputs") {
  json doc = {{"market", merton_market()}, {"density", {{"n", 5}, {"measure", "mmm"}}},
              {"hedge", {{"n_t", 2}, {"n_s", 3}}}};
  const auto cfg = write_config("dh.json", doc);
  CHECK(run("density --config " + cfg.string() + out_flag("dh")).code == 0);
  CHECK(run("hedge --config " + cfg.string() + out_flag("dh") + " --format json").code == 0);
  const auto h = json::parse(slurp(workdir() / "dh" / "hedge.json"));
  CHECK(h["rows"].size() == 6);
  CHECK(slurp(workdir() / "dh" / "density.csv").find("t,x,value,err_estimate") != std::string::npos);
}

TEST_CASE("verify-fs on a complete market") {
  json mk = {{"r", 0.0}, {"T", 1.0}, {"K", 1.0},
             {"model", {{"kind", "brownian"}, {"mu", -0.05}, {"sigma", 0.2}}}};
  const auto cfg = write_config("bs.json", {{"market", mk}});
  const auto r = run("verify-fs --config " + cfg.string() + " --paths 200 --steps 20" + out_flag("fs"));
  CHECK(r.code == 0);
  CHECK(r.out.find("complete market") != std::string::npos);
}

TEST_CASE("small replication run is reproducible") {
  json doc = {{"model", merton_market()["model"]}, {"T", 1.0},
              {"payoff", {{"kind", "digital"}, {"strike_level", 0.0}}}};
  const auto cfg = write_config("vr.json", doc);
  const auto a = run("verify-replication --config " + cfg.string() + " --paths 300 --steps 40" + out_flag("vr1"));
  const auto b = run("verify-replication --config " + cfg.string() + " --paths 300 --steps 40" + out_flag("vr2"));
  CHECK(a.code == b.code);
  CHECK(slurp(workdir() / "vr1" / "replication.json") == slurp(workdir() / "vr2" / "replication.json"));
}

TEST_CASE("malliavin verdicts") {
  json nig = {{"model", {{"kind", "nig"}, {"mu", -0.25}, {"params", {{"a", 3.0}, {"b", -1.0}, {"delta", 1.0}}}}}};
  const auto cfg = write_config("nig.json", nig);
  const auto r = run("malliavin --config " + cfg.string() + out_flag("mal"));
  CHECK(r.code == 0);
  const auto rep = json::parse(slurp(workdir() / "mal" / "malliavin.json"));
  CHECK(rep["verdict"] == "NotDifferentiable");
  CHECK(rep["truncated_integral"].size() == 6);
}

TEST_CASE("errors exit with status 2") {
  const auto bad = workdir() / "bad.json";
  std::ofstream(bad) << "{ not json";
  auto r = run("check --config " + bad.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("ConfigError") != std::string::npos);
  r = run("check --config " + (workdir() / "missing.json").string());
  CHECK(r.code == 2);
  const auto cfg = write_config("unknown.json", {{"model", {{"kind", "heston"}}}});
  CHECK(run("check --config " + cfg.string()).code == 2);
  CHECK(run("check").code == 2);
  const auto up = write_config("up.json", {{"market", {{"r", 0.0}, {"model", {{"kind", "brownian"}, {"mu", 0.5}, {"sigma", 0.2}}}}}});
  r = run("hedge --config " + up.string() + out_flag("up"));
  CHECK(r.code == 2);
  CHECK(r.out.find("AssumptionError") != std::string::npos);
}
