#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hestonfwd/config.hpp"

namespace hestonfwd {

// Runs one of the top-level commands against a parsed scenario and collects
// the resulting artifacts in memory as (filename, content) pairs. Callers
// (the C API, the CLI) decide where the bytes go.
class Engine {
 public:
  explicit Engine(const std::string& config_text);

  void set_seed(std::uint64_t seed) { cfg_.run.seed = seed; }
  void set_threads(int threads);
  void set_json(bool enable) { json_ = enable; }

  std::string canonical_config() const { return serialize_config(cfg_); }

  // Commands: simulate | price | greeks | verify. Unknown commands throw
  // std::invalid_argument. Returns false when a command ran but a check it
  // performs failed (only "verify" can do that); artifacts are populated
  // either way.
  bool run(const std::string& command);

  const std::vector<std::pair<std::string, std::string>>& artifacts() const {
    return artifacts_;
  }

 private:
  void cmd_simulate();
  void cmd_price();
  void cmd_greeks();
  bool cmd_verify();

  ScenarioConfig cfg_;
  bool json_ = false;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

}  // namespace hestonfwd
