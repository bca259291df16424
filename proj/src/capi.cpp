#include "hestonfwd/hestonfwd_c.h"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hestonfwd/engine.hpp"

struct hf_engine {
  hestonfwd::Engine impl;
  std::string last_error;
  std::string canonical;

  explicit hf_engine(const std::string& text) : impl(text) {}
};

namespace {

thread_local std::string g_create_error;

template <class F>
int guarded(hf_engine* e, F&& f) {
  if (!e) return HF_ERR_CONFIG;
  try {
    e->last_error.clear();
    return f();
  } catch (const std::invalid_argument& ex) {
    e->last_error = ex.what();
    return HF_ERR_CONFIG;
  } catch (const std::exception& ex) {
    e->last_error = ex.what();
    return HF_ERR_RUNTIME;
  }
}

}  // namespace

extern "C" {

hf_engine* hf_engine_create(const char* config_text) {
  try {
    g_create_error.clear();
    return new hf_engine(config_text ? config_text : "");
  } catch (const std::exception& ex) {
    g_create_error = ex.what();
    return nullptr;
  }
}

hf_engine* hf_engine_create_from_file(const char* path) {
  try {
    g_create_error.clear();
    if (!path) throw std::invalid_argument("config path is NULL");
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(std::string("cannot open config file '") +
                                         path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return new hf_engine(ss.str());
  } catch (const std::exception& ex) {
    g_create_error = ex.what();
    return nullptr;
  }
}

void hf_engine_destroy(hf_engine* e) { delete e; }

int hf_engine_set_seed(hf_engine* e, uint64_t seed) {
  return guarded(e, [&] {
    e->impl.set_seed(seed);
    return HF_OK;
  });
}

int hf_engine_set_threads(hf_engine* e, int threads) {
  return guarded(e, [&] {
    e->impl.set_threads(threads);
    return HF_OK;
  });
}

int hf_engine_set_json(hf_engine* e, int enable) {
  return guarded(e, [&] {
    e->impl.set_json(enable != 0);
    return HF_OK;
  });
}

int hf_run(hf_engine* e, const char* command) {
  return guarded(e, [&] {
    if (!command) throw std::invalid_argument("command is NULL");
    if (!e->impl.run(command)) {
      e->last_error = "verification failed; see verify.csv";
      return HF_ERR_RUNTIME;
    }
    return HF_OK;
  });
}

size_t hf_artifact_count(const hf_engine* e) {
  return e ? e->impl.artifacts().size() : 0;
}

const char* hf_artifact_name(const hf_engine* e, size_t index) {
  if (!e || index >= e->impl.artifacts().size()) return nullptr;
  return e->impl.artifacts()[index].first.c_str();
}

const char* hf_artifact_content(const hf_engine* e, size_t index) {
  if (!e || index >= e->impl.artifacts().size()) return nullptr;
  return e->impl.artifacts()[index].second.c_str();
}

const char* hf_config_canonical(hf_engine* e) {
  if (!e) return nullptr;
  try {
    e->canonical = e->impl.canonical_config();
    return e->canonical.c_str();
  } catch (const std::exception& ex) {
    e->last_error = ex.what();
    return nullptr;
  }
}

const char* hf_last_error(const hf_engine* e) {
  return e ? e->last_error.c_str() : g_create_error.c_str();
}

}  // extern "C"
