#pragma once

// Shared test helpers: error-kind capture, data directory lookup, and a
// small subprocess runner for exercising the command line binary.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <sys/wait.h>

#include "opmaj/rational.hpp"

namespace opmaj_test {

// Runs fn and reports which error kind it threw, if any.
template <typename F>
std::optional<opmaj::Kind> err_kind(F&& fn) {
  try {
    fn();
  } catch (const opmaj::Error& e) {
    return e.kind;
  }
  return std::nullopt;
}

inline std::string data_dir() {
#ifdef OPMAJ_TEST_DATA_DIR
  return OPMAJ_TEST_DATA_DIR;
#else
  const char* d = std::getenv("OPMAJ_TEST_DATA_DIR");
  return d ? d : "tests/data";
#endif
}

inline std::string data_file(const std::string& name) {
  return data_dir() + "/" + name;
}

struct CliResult {
  int code = -1;
  std::string out;  // stdout and stderr merged
};

inline std::string cli_path() {
#ifdef OPMAJ_CLI_PATH
  return OPMAJ_CLI_PATH;
#else
  const char* p = std::getenv("OPMAJ_CLI_PATH");
  return p ? p : "./build/opmaj";
#endif
}

inline CliResult run_cli(const std::string& args) {
  CliResult r;
  std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int st = pclose(pipe);
  if (WIFEXITED(st)) r.code = WEXITSTATUS(st);
  return r;
}

}  // namespace opmaj_test
