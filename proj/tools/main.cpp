// Command-line front end. Talks to the engine exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "hestonfwd/hestonfwd_c.h"

namespace {

int fail(hf_engine* eng, const char* what, int code) {
  std::fprintf(stderr, "error: %s: %s\n", what, hf_last_error(eng));
  if (eng) hf_engine_destroy(eng);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forward-curve engine for energy markets with stochastic volatility"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool have_seed = false;
  int threads = 0;
  bool json = false;
  bool print_config = false;

  app.add_option("--config", config_path, "configuration file (omit for defaults)");
  app.add_option("--out", out_dir, "directory for output artifacts")
      ->capture_default_str();
  app.add_option("--seed", seed, "override the run seed")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_option("--threads", threads, "override the thread count");
  app.add_flag("--json", json, "also write JSON mirrors of CSV artifacts");
  app.add_flag("--print-config", print_config,
               "print the canonical resolved configuration and exit");

  for (const char* name : {"simulate", "price", "greeks", "verify"})
    app.add_subcommand(name);
  app.get_subcommand("simulate")->description("path statistics and sample paths");
  app.get_subcommand("price")->description("Monte Carlo option price");
  app.get_subcommand("greeks")->description("sensitivities via the configured estimators");
  app.get_subcommand("verify")->description("self-checks; exit 1 if any check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  hf_engine* eng = config_path.empty() ? hf_engine_create("")
                                       : hf_engine_create_from_file(config_path.c_str());
  if (!eng) return fail(nullptr, "configuration", 2);
  if (have_seed && hf_engine_set_seed(eng, seed) != HF_OK)
    return fail(eng, "seed", 2);
  if (threads > 0 && hf_engine_set_threads(eng, threads) != HF_OK)
    return fail(eng, "threads", 2);
  hf_engine_set_json(eng, json ? 1 : 0);

  if (print_config) {
    const char* text = hf_config_canonical(eng);
    if (!text) return fail(eng, "configuration", 2);
    std::fputs(text, stdout);
    hf_engine_destroy(eng);
    return 0;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const int rc = hf_run(eng, command.c_str());
  if (rc == HF_ERR_CONFIG) return fail(eng, command.c_str(), 2);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  for (std::size_t i = 0; i < hf_artifact_count(eng); ++i) {
    const std::filesystem::path p =
        std::filesystem::path(out_dir) / hf_artifact_name(eng, i);
    std::ofstream out(p, std::ios::binary);
    if (!out) {
      std::fprintf(stderr, "error: cannot write %s\n", p.c_str());
      hf_engine_destroy(eng);
      return 1;
    }
    out << hf_artifact_content(eng, i);
    std::printf("wrote %s\n", p.c_str());
  }

  if (rc != HF_OK) return fail(eng, command.c_str(), 1);
  hf_engine_destroy(eng);
  return 0;
}
