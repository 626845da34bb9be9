#pragma once

// Helpers for driving the CLI binary as a subprocess and for temp-dir file
// work in tests. The binary path comes from the DEEPROTECT_BIN environment
// variable, which CMake points at the built `deeprotect` target.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace support {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string binary_path() {
  const char* bin = std::getenv("DEEPROTECT_BIN");
  return bin ? bin : "";
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Runs `binary_path() + " " + args` with stdout/stderr captured into files
// under `dir` (which must exist). Arguments are passed through a shell, so
// individual args with spaces must be quoted by the caller.
inline RunResult run_cli(const std::string& args, const std::string& dir) {
  RunResult r;
  const std::string out_path = dir + "/_stdout.txt";
  const std::string err_path = dir + "/_stderr.txt";
  const std::string cmd =
      "'" + binary_path() + "' " + args + " > '" + out_path + "' 2> '" + err_path + "'";
  int status = std::system(cmd.c_str());
  if (status == -1) {
    r.exit_code = -1;
  } else {
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -2;
  }
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// Fresh scratch directory under TMPDIR (or /tmp), unique per call.
inline std::string make_temp_dir(const std::string& tag) {
  const char* base = std::getenv("TMPDIR");
  std::string tmpl = std::string(base ? base : "/tmp") + "/deeprotect_" + tag + "_XXXXXX";
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  char* made = mkdtemp(buf.data());
  return made ? std::string(made) : std::string();
}

}  // namespace support
