#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "hestonfwd/config.hpp"
#include "hestonfwd/hestonfwd_c.h"

using namespace hestonfwd;

namespace {

const std::string kSmallRun =
    "model {\n n_nodes 256\n}\nrun {\n n_paths 400\n dump_paths 1\n}\n";

std::filesystem::path tmp_dir(const std::string& tag) {
  const auto p = std::filesystem::temp_directory_path() / ("hf_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(HF_CLI_PATH) + " " + args +
                              " >/dev/null 2>/dev/null")
                                 .c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("serialization round trip is canonical") {
  const ScenarioConfig c = default_config();
  const std::string s1 = serialize_config(c);
  const std::string s2 = serialize_config(parse_config(s1));
  CHECK(s1 == s2);
  const std::string s3 = serialize_config(parse_config(kSmallRun));
  CHECK(s3 == serialize_config(parse_config(s3)));
}

TEST_CASE("curve expressions parse, normalize, and format") {
  CHECK(format_curve_expr(parse_curve_expr("2*const(3)")) == "const(6)");
  CHECK(format_curve_expr(parse_curve_expr("const(1)+0.5*kernel(0.25)")) ==
        "const(1)+0.5*kernel(0.25)");
  CHECK_THROWS_AS(parse_curve_expr("wiggle(1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_curve_expr("onb(0)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_curve_expr("const(1,2)"), std::invalid_argument);
}

TEST_CASE("unknown keys and malformed blocks are rejected") {
  CHECK_THROWS_AS(parse_config("model {\n frobnicate 3\n}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("sideband {\n}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("model {\n tau abc\n}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("model {\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("tau 1\n"), std::invalid_argument);
}

TEST_CASE("scenario construction validates geometry") {
  // delivery window would overrun the grid extension
  CHECK_THROWS_AS(build_scenario(parse_config(
                      "model {\n n_nodes 256\n extension 8\n}\n")),
                  std::invalid_argument);
  const BuiltScenario sc = build_scenario(parse_config(kSmallRun));
  CHECK(sc.model.space->n_cells() == 256);
  for (std::size_t i = 0; i < sc.onb.size(); ++i)
    CHECK(inner_product(sc.onb[i], sc.onb[i]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("c api lifecycle, errors, and artifacts") {
  hf_engine* bad = hf_engine_create("model {\n frobnicate 1\n}\n");
  CHECK(bad == nullptr);
  CHECK(std::string(hf_last_error(nullptr)).find("frobnicate") != std::string::npos);

  hf_engine* e = hf_engine_create(kSmallRun.c_str());
  REQUIRE(e != nullptr);
  CHECK(hf_engine_set_seed(e, 99) == HF_OK);
  CHECK(hf_engine_set_threads(e, 0) == HF_ERR_CONFIG);
  CHECK(hf_engine_set_threads(e, 2) == HF_OK);
  CHECK(hf_run(e, "fly") == HF_ERR_CONFIG);
  CHECK(std::string(hf_last_error(e)).find("fly") != std::string::npos);
  REQUIRE(hf_run(e, "price") == HF_OK);
  REQUIRE(hf_artifact_count(e) == 1);
  CHECK(std::string(hf_artifact_name(e, 0)) == "price.csv");
  CHECK(std::string(hf_artifact_content(e, 0)).find("smoothed_call") !=
        std::string::npos);
  CHECK(hf_artifact_name(e, 7) == nullptr);

  const char* canon = hf_config_canonical(e);
  REQUIRE(canon != nullptr);
  CHECK(std::string(canon).find("seed 99") != std::string::npos);
  hf_engine_destroy(e);
}

TEST_CASE("c api json mirrors") {
  hf_engine* e = hf_engine_create(kSmallRun.c_str());
  REQUIRE(e != nullptr);
  hf_engine_set_json(e, 1);
  REQUIRE(hf_run(e, "price") == HF_OK);
  CHECK(hf_artifact_count(e) == 2);
  CHECK(std::string(hf_artifact_name(e, 1)) == "price.json");
  hf_engine_destroy(e);
}

TEST_CASE("cli commands, artifacts, and exit codes") {
  const auto dir = tmp_dir("cli");
  const auto cfg = dir / "scenario.cfg";
  std::ofstream(cfg) << kSmallRun;

  CHECK(run_cli("--config " + cfg.string() + " --print-config simulate") == 0);
  CHECK(run_cli("--config " + cfg.string() + " --out " + (dir / "out").string() +
                " simulate") == 0);
  CHECK(std::filesystem::exists(dir / "out" / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "paths.csv"));

  CHECK(run_cli("--config " + cfg.string() + " --out " + (dir / "v").string() +
                " verify") == 0);
  CHECK(std::filesystem::exists(dir / "v" / "verify.csv"));

  CHECK(run_cli("--wat price") == 2);
  CHECK(run_cli("--config " + (dir / "missing.cfg").string() + " price") == 2);
}

TEST_CASE("cli verify fails under fault injection") {
  const auto dir = tmp_dir("fault");
  const auto cfg = dir / "scenario.cfg";
  std::ofstream(cfg) << kSmallRun << "run {\n fault_inject_kernel 1\n}\n";
  CHECK(run_cli("--config " + cfg.string() + " --out " + (dir / "out").string() +
                " verify") == 1);
  // the artifact is still written and records the failing check
  std::ifstream in(dir / "out" / "verify.csv");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("reproducing_kernel") != std::string::npos);
  CHECK(text.find(",0\n") != std::string::npos);
}
