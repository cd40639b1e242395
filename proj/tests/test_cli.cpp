#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "lplab/cli.hpp"
#include "lplab/error.hpp"
#include "lplab/io.hpp"
#include "lplab/random_field.hpp"

using namespace lplab;
using Json = nlohmann::json;
namespace fs = std::filesystem;

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

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lplab-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json load(const fs::path& p) { return Json::parse(read_text(p.string())); }

}  // namespace

TEST_CASE("FLD1 round trip and corruption") {
  const Grid g(3, 8);
  const auto u = random_solenoidal(g, {2.0, 1, 2, 1.0}, 3);
  const auto bytes = encode_fld1(u);
  CHECK(bytes.size() == 10 + 8 * 3 * 512);
  const auto back = decode_fld1(bytes);
  CHECK(testing::max_abs_diff(u, back) == 0.0);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_fld1(bad), InvalidDataError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_fld1(bad), InvalidDataError);
  bad = bytes;
  bad[6] = 12;  // size 12 is not a power of two
  CHECK_THROWS_AS(decode_fld1(bad), InvalidDataError);
}

TEST_CASE("gen-field") {
  const auto dir = scratch("gen");
  const std::string d = dir.string();
  REQUIRE(run({"gen-field", "--N", "16", "--seed", "7", "--name", "a", "--out-dir", d}).code == cli::kOk);
  REQUIRE(run({"gen-field", "--N", "16", "--seed", "7", "--name", "b", "--out-dir", d}).code == cli::kOk);
  REQUIRE(run({"gen-field", "--N", "16", "--seed", "8", "--name", "c", "--out-dir", d}).code == cli::kOk);
  const auto a = read_text((dir / "a.fld1").string());
  CHECK(a == read_text((dir / "b.fld1").string()));
  CHECK(a != read_text((dir / "c.fld1").string()));

  const Json side = load(dir / "a.json");
  CHECK(side["command"] == "gen-field");
  CHECK(side["profile"]["band"] == Json::array({1, 5}));
  CHECK(side["norms"]["H_n/2"].get<double>() > 0.0);

  const auto r = run({"gen-field", "--N", "16", "--band", "2:4", "--name", "band", "--out-dir", d});
  CHECK(r.code == cli::kOk);
  CHECK(load(dir / "band.json")["profile"]["band"] == Json::array({2, 4}));
  CHECK(r.out.find("B^{n/2+1}_{2,1}") != std::string::npos);

  CHECK(run({"gen-field", "--N", "16", "--amplitude", "0", "--out-dir", d}).code == cli::kValidationError);
  CHECK(run({"gen-field", "--N", "16", "--band", "1:9", "--out-dir", d}).code == cli::kValidationError);
}

TEST_CASE("exit codes") {
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"verify", "--no-such-flag"}).code == cli::kIoError);
  CHECK(run({}).code == cli::kIoError);

  const auto dir = scratch("codes").string();
  const auto unknown = run({"verify", "--id", "nope", "--out-dir", dir});
  CHECK(unknown.code == cli::kValidationError);
  CHECK(unknown.err.find("trilinear") != std::string::npos);

  const auto bad = run({"verify", "--id", "prop-5.1", "--s1", "3", "--out-dir", dir});
  CHECK(bad.code == cli::kValidationError);
  CHECK(bad.err.find("s1 < n/2 + 1") != std::string::npos);

  CHECK(run({"verify", "--id", "trilinear", "--all", "--out-dir", dir}).code == cli::kIoError);
  CHECK(run({"simulate", "--init", "file", "--field", dir + "/missing.fld1", "--out-dir", dir}).code == cli::kIoError);
  CHECK(run({"ode", "--eps", "0.6", "--c", "1", "--out-dir", dir}).code == cli::kValidationError);
}

TEST_CASE("verify reports") {
  const auto dir = scratch("verify");
  const std::string d = dir.string();
  const auto r = run({"verify", "--id", "bony-identity", "--svg", "--out-dir", d});
  CHECK(r.code == cli::kOk);
  const Json j = load(dir / "verify-bony-identity.json");
  for (const char* key : {"inequality_id", "kind", "ensemble", "samples", "max_ratio", "quantiles", "c_emp",
                          "violations", "resolution_stability", "config", "version", "command"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["kind"] == "exact");
  CHECK(j["violations"] == 0);
  CHECK(j["max_deviation"].get<double>() < 1e-10);
  CHECK(fs::exists(dir / "verify-bony-identity.svg"));

  const auto lemma = run({"verify", "--id", "lemma-5.2", "--samples", "2000", "--out-dir", d});
  CHECK(lemma.code == cli::kOk);
  const Json l = load(dir / "verify-lemma-5.2.json");
  CHECK(l["kind"] == "explicit");
  CHECK(l["samples"] == 2000);
  CHECK(l["violations"] == 0);
}

TEST_CASE("ode command") {
  const auto dir = scratch("ode");
  const std::string d = dir.string();
  const auto r = run({"ode", "--c", "1", "--gamma", "2", "--dt", "1e-3", "--out-dir", d});
  CHECK(r.code == cli::kOk);
  const Json j = load(dir / "ode.json");
  const double t_num = j["lemma"]["T_num"].get<double>();
  CHECK(t_num >= 0.4975);
  CHECK(t_num <= 0.5025);
  CHECK(r.out.find("saturation: true") != std::string::npos);
  CHECK(fs::exists(dir / "ode.csv"));
  CHECK(fs::exists(dir / "ode.svg"));

  const auto g1 = run({"ode", "--gamma", "1", "--name", "g1", "--out-dir", d});
  CHECK(g1.code == cli::kOk);
  CHECK(load(dir / "g1.json")["lemma"]["theorem_form"].get<std::string>().find("c_{3/2}^-2 t^-1") !=
        std::string::npos);

  const auto w = run({"ode", "--eps", "0.1", "--name", "weak", "--out-dir", d});
  CHECK(w.code == cli::kOk);
  CHECK(w.out.find("Z nonincreasing: true") != std::string::npos);
  const Json wj = load(dir / "weak.json");
  CHECK(wj["weak"]["exponent_error"].get<double>() <= 0.02);
  CHECK(wj["weak"]["tk_note"].get<std::string>().find("T - t_k") != std::string::npos);
}

TEST_CASE("simulate command") {
  const auto dir = scratch("simulate");
  const std::string d = dir.string();
  SUBCASE("Stokes mode energy balance") {
    const auto r = run({"simulate", "--init", "stokes-mode", "--mode", "2", "--N", "16", "--nu", "0.7", "--t-end",
                        "0.1", "--name", "stokes", "--out-dir", d});
    CHECK(r.code == cli::kOk);
    const Json j = load(dir / "stokes.json");
    CHECK(j["checks"]["energy"]["max_residual"].get<double>() < 1e-8);
    CHECK(j["max_divergence"].get<double>() < 1e-12);
    const auto csv = read_text((dir / "stokes.csv").string());
    CHECK(csv.rfind("t,L2,H1,H32,H52,B52_21,res_h32,res_besov\n", 0) == 0);
    CHECK(fs::exists(dir / "stokes-0.fld1"));
    const auto back = read_fld1((dir / "stokes-0.fld1").string());
    CHECK(back.grid().size() == 16);
  }
  SUBCASE("CFL violation aborts with partial output") {
    const auto r = run({"simulate", "--N", "16", "--amplitude", "100", "--dt", "1e-2", "--t-end", "0.5", "--name",
                        "cfl", "--out-dir", d});
    CHECK(r.code == cli::kNumericalAbort);
    const Json j = load(dir / "cfl.json");
    CHECK(j["aborted"] == true);
    CHECK(j["abort_reason"].get<std::string>().find("CFL") != std::string::npos);
    CHECK(fs::exists(dir / "cfl.csv"));
  }
  SUBCASE("explicit constants skip calibration") {
    const auto r = run({"simulate", "--N", "16", "--t-end", "0.01", "--check", "h32", "--c-h32", "1", "--name", "h",
                        "--no-checkpoints", "--out-dir", d});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("calibrating") == std::string::npos);
    const Json j = load(dir / "h.json");
    CHECK(j["checks"]["h32"]["calibrated"] == false);
    CHECK(j["checks"]["h32"]["pre_young"]["violations"] == 0);
    CHECK_FALSE(fs::exists(dir / "h-0.fld1"));
  }
  SUBCASE("bad values") {
    CHECK(run({"simulate", "--N", "16", "--dt", "-1", "--out-dir", d}).code == cli::kValidationError);
    CHECK(run({"simulate", "--N", "16", "--init", "vortex", "--out-dir", d}).code == cli::kValidationError);
    CHECK(run({"simulate", "--N", "16", "--check", "speed", "--out-dir", d}).code == cli::kValidationError);
  }
}

TEST_CASE("config precedence") {
  const auto dir = scratch("config");
  const std::string d = dir.string();
  write_text((dir / "nested.json").string(),
             R"({"simulate": {"N": 16, "t-end": 0.02, "nu": 0.5, "check": ["energy"], "no-checkpoints": true}})");
  const auto r = run({"--config", (dir / "nested.json").string(), "simulate", "--t-end", "0.01", "--out-dir", d});
  CHECK(r.code == cli::kOk);
  const Json j = load(dir / "trajectory.json");
  CHECK(j["config"]["N"] == 16);
  CHECK(j["config"]["nu"] == 0.5);
  CHECK(j["config"]["t-end"] == 0.01);
  CHECK(j["config"]["dt"] == 1e-3);
  CHECK(j["config"]["no-checkpoints"] == true);

  write_text((dir / "flatcfg.json").string(), R"({"N": 16, "seed": 11, "name": "flat"})");
  CHECK(run({"gen-field", "--config", (dir / "flatcfg.json").string(), "--out-dir", d}).code == cli::kOk);
  CHECK(load(dir / "flat.json")["seed"] == 11);

  write_text((dir / "broken.json").string(), "{ not json");
  CHECK(run({"gen-field", "--config", (dir / "broken.json").string()}).code == cli::kIoError);
  CHECK(run({"gen-field", "--config", (dir / "absent.json").string()}).code == cli::kIoError);
}

TEST_CASE("report command") {
  const auto dir = scratch("report");
  const std::string d = dir.string();
  REQUIRE(run({"ode", "--out-dir", d}).code == cli::kOk);
  REQUIRE(run({"gen-field", "--N", "16", "--out-dir", d}).code == cli::kOk);
  const auto r = run({"report", "--dir", d});
  CHECK(r.code == cli::kOk);
  const Json s = load(dir / "summary.json");
  CHECK(s["reports"].size() == 2);
  CHECK(s["status"] == "pass");
  CHECK(run({"report", "--csv", (dir / "ode.csv").string(), "--svg", (dir / "re.svg").string()}).code == cli::kOk);
  CHECK(read_text((dir / "re.svg").string()).find("<svg") == 0);
  CHECK(run({"report", "--dir", d + "/absent"}).code == cli::kIoError);
}
